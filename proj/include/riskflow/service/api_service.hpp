#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace riskflow {

struct ServiceOptions {
  std::filesystem::path store;
  /// Value of Access-Control-Allow-Origin on every response.
  std::string cors_origin = "*";
};

/// HTTP front end over the engine.
///
/// Sessions are immutable values swapped under a lock; every request works on
/// its own copy, so propagation never blocks other readers. What-if requests
/// are stateless: the client owns the action stack and sends it whole, and
/// only a commit (checked against the session version) changes the model.
class ApiService {
 public:
  explicit ApiService(ServiceOptions options);
  ~ApiService();
  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  /// Blocks until stop(). Returns false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (or -1); serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace riskflow
