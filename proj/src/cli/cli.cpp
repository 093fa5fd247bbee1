#include "riskflow/cli/cli.hpp"

#include <CLI11.hpp>
#include <signal.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "riskflow/assessment/json.hpp"
#include "riskflow/core/errors.hpp"
#include "riskflow/service/api_service.hpp"
#include "riskflow/snapshots/store.hpp"

namespace fs = std::filesystem;

namespace riskflow::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable inputs and unwritable outputs.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Json, Table };

struct Common {
  Format format = Format::Json;
  bool lenient = false;
  std::string store;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return buffer.str();
}

void write_atomic(const std::string& path, std::string_view contents) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + temp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw IoError("cannot write '" + temp.string() + "'");
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) throw IoError("cannot move output into '" + path + "': " + ec.message());
}

std::string store_path(const Common& common) {
  if (!common.store.empty()) return common.store;
  if (const char* env = std::getenv("RISKFLOW_STORE"); env && *env) return env;
  throw UsageError("no snapshot store: pass --store or set RISKFLOW_STORE");
}

ParsedModel load_model(const std::string& path, const Common& common) {
  return parse_model_document(read_text(path), ParseOptions{common.lenient});
}

// A path to a result/snapshot file, or else a snapshot id in the store.
PropagationResult load_result(const std::string& ref, const Common& common) {
  if (fs::exists(ref)) return parse_result_document(read_text(ref));
  return SnapshotStore(store_path(common)).load(ref).result;
}

std::string fixed(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", value);
  return buffer;
}

std::string fixed(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fixed(values[i]);
  }
  return out + "]";
}

std::string signed_fixed(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%+.4f", value);
  return buffer;
}

void print_json(std::ostream& out, const Json& value) { out << value.dump(2) << '\n'; }

void print_report_table(std::ostream& out, const ValidationReport& report) {
  for (const auto& issue : report.issues) {
    out << to_string(issue.severity) << ' ' << to_string(issue.code);
    if (!issue.ref.empty()) out << " [" << issue.ref << ']';
    out << ": " << issue.message << '\n';
  }
  out << report.error_count() << " errors, " << report.warning_count() << " warnings\n";
}

void print_delta_table(std::ostream& out, const RiskDelta& delta) {
  const auto& names = delta.schema.names();
  std::size_t changed = 0;
  for (const auto& node : delta.nodes) {
    for (std::size_t k = 0; k < node.delta.size(); ++k) {
      if (node.delta[k] == 0.0) continue;
      out << node.id << ' ' << names[k] << ' ' << fixed(node.before[k]) << " -> "
          << fixed(node.after[k]) << " (" << signed_fixed(node.delta[k]) << ")\n";
      ++changed;
    }
  }
  for (const auto& [id, total] : delta.before_only) out << id << " removed, was " << fixed(total.values()) << '\n';
  for (const auto& [id, total] : delta.after_only) out << id << " added, now " << fixed(total.values()) << '\n';
  out << changed << " changed components\n";
}

int cmd_validate(const std::string& model, const Common& common, std::ostream& out) {
  ValidationReport report;
  int code = kOk;
  try {
    report = load_model(model, common).report;
  } catch (const ValidationError& e) {
    report = e.report();
    code = kDomainError;
  }
  if (common.format == Format::Json) {
    print_json(out, report_to_json(report));
  } else {
    print_report_table(out, report);
  }
  return code;
}

struct PropagateArgs {
  std::string model;
  std::string out_path;
  std::string snapshot_store;
  bool snapshot = false;
  std::string label;
  std::string schedule = "priority";
};

int cmd_propagate(const PropagateArgs& args, const Common& common, std::ostream& out) {
  const auto parsed = load_model(args.model, common);
  PropagationOptions options;
  options.schedule = args.schedule == "fifo" ? Schedule::Fifo : Schedule::Priority;
  const auto result = propagate(parsed.graph, options);

  auto document = result_document(result);
  if (!args.snapshot_store.empty() || args.snapshot) {
    Common with_store = common;
    if (!args.snapshot_store.empty()) with_store.store = args.snapshot_store;
    SnapshotStore store(store_path(with_store));
    document["snapshot_id"] = store.save(parsed.graph, result, args.label);
  }
  if (!args.out_path.empty()) write_atomic(args.out_path, document.dump(2) + "\n");

  if (common.format == Format::Json) {
    if (args.out_path.empty()) print_json(out, document);
    else if (document.contains("snapshot_id")) print_json(out, Json{{"snapshot_id", document["snapshot_id"]}});
    return kOk;
  }
  const auto& names = result.schema.names();
  out << "node";
  for (const auto& name : names) out << '\t' << name;
  out << '\n';
  for (const auto& node : result.nodes) {
    out << node.id;
    for (double v : node.risk.total.values()) out << '\t' << fixed(v);
    out << '\n';
  }
  if (document.contains("snapshot_id")) {
    out << "snapshot " << document["snapshot_id"].get<std::string>() << '\n';
  }
  return kOk;
}

struct AssessArgs {
  std::string ref;
  std::vector<std::string> thresholds;
  std::size_t top_k = 0;
  std::string perspective;
  std::string concept_filter;
  std::string causes;
};

int cmd_assess(const AssessArgs& args, const Common& common, std::ostream& out) {
  Thresholds thresholds;
  for (const auto& spec : args.thresholds) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--threshold expects name=value, got '" + spec + "'");
    }
    double value = 0.0;
    const auto text = std::string_view(spec).substr(eq + 1);
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
      throw UsageError("--threshold value in '" + spec + "' is not a number");
    }
    thresholds[spec.substr(0, eq)] = value;
  }
  if (args.top_k > 0 && args.perspective.empty()) throw UsageError("--top-k needs --perspective");

  const auto result = load_result(args.ref, common);
  const auto alerts = assess(result, thresholds);
  std::optional<std::vector<RankedNode>> ranking;
  if (args.top_k > 0) {
    std::optional<std::string_view> filter;
    if (!args.concept_filter.empty()) filter = args.concept_filter;
    ranking = top_k(result, args.top_k, args.perspective, filter);
  }
  std::vector<std::pair<std::string, std::vector<RootCause>>> causes;
  if (!args.causes.empty()) {
    if (!args.perspective.empty()) {
      causes.emplace_back(args.perspective, root_causes(result, args.causes, args.perspective));
    } else {
      for (const auto& name : result.schema.names()) {
        causes.emplace_back(name, root_causes(result, args.causes, name));
      }
    }
  }

  if (common.format == Format::Json) {
    Json body{{"alerts", alerts_to_json(alerts)}};
    if (ranking) body["top_k"] = ranking_to_json(args.perspective, *ranking);
    if (!args.causes.empty()) {
      Json list = Json::array();
      for (const auto& [name, c] : causes) list.push_back(root_causes_to_json(args.causes, name, c));
      body["root_causes"] = std::move(list);
    }
    print_json(out, body);
    return kOk;
  }
  for (const auto& a : alerts) {
    out << "ALERT " << a.node << ' ' << a.perspective << ' ' << fixed(a.value)
        << " >= " << fixed(a.threshold) << '\n';
  }
  out << alerts.size() << " alerts\n";
  if (ranking) {
    out << "top " << args.top_k << " by " << args.perspective << ":\n";
    for (const auto& r : *ranking) out << "  " << r.id << " (" << r.concept_name << ") " << fixed(r.value) << '\n';
  }
  for (const auto& [name, list] : causes) {
    out << "causes of " << args.causes << " " << name << ":\n";
    for (const auto& c : list) {
      out << "  " << c.leaf << ' ' << fixed(c.value);
      for (const auto& e : c.path) out << ' ' << e.to_string();
      out << '\n';
    }
  }
  return kOk;
}

struct WhatifArgs {
  std::string model;
  std::vector<std::string> actions;
  std::string against;
};

int cmd_whatif(const WhatifArgs& args, const Common& common, std::ostream& out) {
  const auto parsed = load_model(args.model, common);
  std::vector<MitigationAction> actions;
  for (const auto& spec : args.actions) {
    try {
      actions.push_back(parse_action(spec));
    } catch (const OutOfRange&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  const auto outcome = apply_mitigation(parsed.graph, actions);
  const auto before = args.against.empty()
                          ? propagate(parsed.graph)
                          : SnapshotStore(store_path(common)).load(args.against).result;
  const auto after = propagate(outcome.graph);
  const auto delta = diff_results(before, after);

  if (common.format == Format::Json) {
    Json listed = Json::array();
    for (const auto& a : actions) listed.push_back(action_to_json(a));
    Json cascaded = Json::array();
    for (const auto& e : outcome.cascaded_edges) cascaded.push_back(edge_ref_to_json(e));
    print_json(out, Json{{"actions", std::move(listed)},
                         {"cascaded_edges", std::move(cascaded)},
                         {"delta", delta_to_json(delta)}});
    return kOk;
  }
  print_delta_table(out, delta);
  return kOk;
}

int cmd_diff(const std::string& a, const std::string& b, const Common& common, std::ostream& out) {
  const auto delta = SnapshotStore(store_path(common)).diff(a, b);
  if (common.format == Format::Json) {
    print_json(out, delta_to_json(delta));
  } else {
    print_delta_table(out, delta);
  }
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

int cmd_serve(const ServeArgs& args, const Common& common, std::ostream& err) {
  // Signals are taken synchronously on this thread; the server runs on its own.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ApiService service(ServiceOptions{store_path(common), args.cors_origin});
  bool bound = true;
  std::thread server([&] { bound = service.listen(args.host, args.port); });
  service.wait_until_ready();
  err << "riskflow serving on http://" << args.host << ':' << args.port << '\n';

  int received = 0;
  sigwait(&signals, &received);
  service.stop();
  server.join();
  if (!bound) throw IoError("cannot listen on " + args.host + ":" + std::to_string(args.port));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk propagation over abstraction and dependency graphs", "riskflow"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.add_flag("--lenient", common.lenient, "Accept unknown model fields with a warning");
  app.add_option("--store", common.store, "Snapshot store directory (default: $RISKFLOW_STORE)");

  std::string validate_model;
  auto* validate = app.add_subcommand("validate", "Check a model and print its validation report");
  validate->add_option("model", validate_model, "Model file")->required();

  PropagateArgs propagate_args;
  auto* prop = app.add_subcommand("propagate", "Propagate risk and write the result");
  prop->add_option("model", propagate_args.model, "Model file")->required();
  prop->add_option("--out", propagate_args.out_path, "Result file");
  prop->add_option("--snapshot-store", propagate_args.snapshot_store, "Also save a snapshot here");
  prop->add_flag("--snapshot", propagate_args.snapshot, "Also save a snapshot in the default store");
  prop->add_option("--label", propagate_args.label, "Snapshot label");
  prop->add_option("--schedule", propagate_args.schedule, "Worklist order")
      ->check(CLI::IsMember({"priority", "fifo"}));

  AssessArgs assess_args;
  auto* assess_cmd = app.add_subcommand("assess", "Report alerts, rankings and root causes");
  assess_cmd->add_option("ref", assess_args.ref, "Result file or snapshot id")->required();
  assess_cmd->add_option("--threshold", assess_args.thresholds, "Cardinal risk, name=value");
  assess_cmd->add_option("--top-k", assess_args.top_k, "Rank the k riskiest nodes")
      ->check(CLI::PositiveNumber);
  assess_cmd->add_option("--perspective", assess_args.perspective, "Perspective for ranking and causes");
  assess_cmd->add_option("--concept", assess_args.concept_filter, "Restrict ranking to one concept");
  assess_cmd->add_option("--causes", assess_args.causes, "Explain this node's total risk");

  WhatifArgs whatif_args;
  auto* whatif = app.add_subcommand("whatif", "Apply mitigation actions and report the change");
  whatif->add_option("model", whatif_args.model, "Model file")->required();
  whatif->add_option("--action", whatif_args.actions, "zero:<node>, risk:<node>=v,..., ...");
  whatif->add_option("--against", whatif_args.against, "Compare with this snapshot instead");

  std::string diff_a, diff_b;
  auto* diff = app.add_subcommand("diff", "Compare two snapshots");
  diff->add_option("a", diff_a, "Earlier snapshot id")->required();
  diff->add_option("b", diff_b, "Later snapshot id")->required();

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service until interrupted");
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--port", serve_args.port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--cors-origin", serve_args.cors_origin, "Allowed browser origin");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }
  common.format = format == "table" ? Format::Table : Format::Json;

  try {
    if (*validate) return cmd_validate(validate_model, common, out);
    if (*prop) return cmd_propagate(propagate_args, common, out);
    if (*assess_cmd) return cmd_assess(assess_args, common, out);
    if (*whatif) return cmd_whatif(whatif_args, common, out);
    if (*diff) return cmd_diff(diff_a, diff_b, common, out);
    if (*serve) return cmd_serve(serve_args, common, err);
  } catch (const UsageError& e) {
    err << "riskflow: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "riskflow: " << e.what() << '\n';
    return kIoError;
  } catch (const StorageError& e) {
    err << "riskflow: storage: " << e.what() << '\n';
    return kIoError;
  } catch (const ValidationError& e) {
    err << "riskflow: " << e.what() << '\n';
    return kDomainError;
  } catch (const Error& e) {
    err << "riskflow: " << error_code(e) << ": " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run(args, out, err);
}

}  // namespace riskflow::cli
