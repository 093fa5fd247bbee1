#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskflow::cli {

enum ExitCode : int {
  kOk = 0,
  kDomainError = 1,
  kUsageError = 2,
  kIoError = 3,
};

/// Runs one command. `args` excludes the program name. Everything meant for
/// scripts goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace riskflow::cli
