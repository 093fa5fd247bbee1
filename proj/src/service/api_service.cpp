#include "riskflow/service/api_service.hpp"

#include <httplib.h>

#include <charconv>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "riskflow/assessment/json.hpp"
#include "riskflow/core/errors.hpp"
#include "riskflow/snapshots/store.hpp"

namespace riskflow {
namespace {

// Immutable once published; mutations publish a new Session.
struct Session {
  RiskGraph base;
  std::vector<MitigationAction> committed;
  RiskGraph current;
  std::uint64_t version = 0;
};

using SessionPtr = std::shared_ptr<const Session>;

// Raised by handlers for HTTP-level failures that have no domain error class.
struct HttpError {
  int status;
  std::string code;
  std::string message;
  Json detail;
};

int status_for(const std::exception& e) {
  if (dynamic_cast<const NotFound*>(&e)) return 404;
  if (dynamic_cast<const StorageError*>(&e)) return 500;
  if (dynamic_cast<const Error*>(&e)) return 400;
  return 500;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message,
                Json detail = nullptr) {
  Json error{{"code", code}, {"message", message}};
  if (!detail.is_null()) error["detail"] = std::move(detail);
  send_json(res, status, Json{{"error", std::move(error)}});
}

double parse_number(const std::string& text, const std::string& what) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw HttpError{400, "bad_request", "malformed number '" + text + "' for " + what, nullptr};
  }
  return value;
}

bool flag(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return false;
  const auto value = req.get_param_value(name);
  return value.empty() || value == "true" || value == "1";
}

Json request_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  return parse_json_text(req.body);
}

}  // namespace

struct ApiService::Impl {
  ServiceOptions options;
  SnapshotStore store;
  httplib::Server server;
  mutable std::shared_mutex mutex;
  std::map<std::string, SessionPtr, std::less<>> sessions;

  explicit Impl(ServiceOptions opts) : options(std::move(opts)), store(options.store) { routes(); }

  SessionPtr session(const std::string& id) const {
    std::shared_lock lock(mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw NotFound("unknown model '" + id + "'");
    return it->second;
  }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.message, e.detail);
      } catch (const ValidationError& e) {
        send_error(res, 400, "validation", e.what(), report_to_json(e.report()));
      } catch (const std::exception& e) {
        send_error(res, status_for(e), error_code(e), e.what());
      }
    };
  }

  static Json model_payload(const Session& s) {
    Json out = model_to_json(s.current);
    Json committed = Json::array();
    for (const auto& a : s.committed) committed.push_back(action_to_json(a));
    return Json{{"version", s.version}, {"model", std::move(out)}, {"committed", std::move(committed)}};
  }

  Json result_payload(const Session& s, const PropagationResult& result) const {
    auto body = result_document(result);
    body["version"] = s.version;
    return body;
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server.Put("/models/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& id = req.path_params.at("id");
      auto parsed = parse_model_document(req.body);
      std::unique_lock lock(mutex);
      auto& slot = sessions[id];
      // Versions keep counting across re-uploads so stale commits still conflict.
      const std::uint64_t version = slot ? slot->version + 1 : 1;
      slot = std::make_shared<const Session>(
          Session{parsed.graph, {}, std::move(parsed.graph), version});
      send_json(res, 200, Json{{"id", id}, {"version", version},
                               {"report", report_to_json(parsed.report)}});
    }));

    server.Get("/models/:id/graph", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, model_payload(*session(req.path_params.at("id"))));
    }));

    server.Post("/models/:id/propagate",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto s = session(req.path_params.at("id"));
                  const auto result = propagate(s->current);
                  auto body = result_payload(*s, result);
                  if (flag(req, "snapshot")) {
                    body["snapshot_id"] = store.save(s->current, result, req.get_param_value("label"));
                  }
                  send_json(res, 200, body);
                }));

    server.Get("/models/:id/assess", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session(req.path_params.at("id"));
      Thresholds thresholds;
      for (const auto& [key, value] : req.params) {
        if (!key.starts_with("threshold.")) continue;
        thresholds[key.substr(10)] = parse_number(value, key);
      }
      const auto result = propagate(s->current);
      send_json(res, 200, Json{{"version", s->version},
                               {"alerts", alerts_to_json(assess(result, thresholds))}});
    }));

    server.Get("/models/:id/nodes/:node/root-causes",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto s = session(req.path_params.at("id"));
                 const auto& node = req.path_params.at("node");
                 const auto result = propagate(s->current);
                 if (!result.find(node)) throw NotFound("unknown node '" + node + "'");
                 if (req.has_param("perspective")) {
                   const auto perspective = req.get_param_value("perspective");
                   auto body = root_causes_to_json(node, perspective,
                                                   root_causes(result, node, perspective));
                   body["version"] = s->version;
                   send_json(res, 200, body);
                   return;
                 }
                 Json all = Json::array();
                 for (const auto& name : result.schema.names()) {
                   all.push_back(root_causes_to_json(node, name, root_causes(result, node, name)));
                 }
                 send_json(res, 200, Json{{"version", s->version}, {"node", node},
                                          {"perspectives", std::move(all)}});
               }));

    server.Post("/models/:id/whatif", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session(req.path_params.at("id"));
      const auto actions =
          req.body.empty() ? std::vector<MitigationAction>{} : actions_from_json(request_body(req));
      const auto outcome = apply_mitigation(s->current, actions);
      const auto before = propagate(s->current);
      const auto after = propagate(outcome.graph);
      Json cascaded = Json::array();
      for (const auto& e : outcome.cascaded_edges) cascaded.push_back(edge_ref_to_json(e));
      Json body{{"version", s->version},
                {"result", result_document(after)},
                {"delta", delta_to_json(diff_results(before, after))},
                {"cascaded_edges", std::move(cascaded)}};
      if (flag(req, "snapshot")) {
        body["snapshot_id"] = store.save(outcome.graph, after, req.get_param_value("label"));
      }
      send_json(res, 200, body);
    }));

    server.Post("/models/:id/whatif/commit",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto& id = req.path_params.at("id");
                  const auto body = request_body(req);
                  auto version_it = body.find("version");
                  if (version_it == body.end() || !version_it->is_number_unsigned()) {
                    throw HttpError{400, "bad_request", "commit needs the session 'version'", nullptr};
                  }
                  const auto expected = version_it->get<std::uint64_t>();
                  const auto actions =
                      actions_from_json(body.contains("actions") ? body.at("actions") : Json::array());

                  std::unique_lock lock(mutex);
                  auto it = sessions.find(id);
                  if (it == sessions.end()) throw NotFound("unknown model '" + id + "'");
                  const auto& current = *it->second;
                  if (current.version != expected) {
                    throw HttpError{409, "version_conflict",
                                    "model '" + id + "' is at version " +
                                        std::to_string(current.version) + ", not " +
                                        std::to_string(expected),
                                    Json{{"version", current.version}}};
                  }
                  auto outcome = apply_mitigation(current.current, actions);
                  Session next{current.base, current.committed, std::move(outcome.graph),
                               current.version + 1};
                  next.committed.insert(next.committed.end(), actions.begin(), actions.end());
                  it->second = std::make_shared<const Session>(std::move(next));
                  send_json(res, 200, model_payload(*it->second));
                }));

    server.Get("/snapshots", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::optional<TimePoint> from, to;
      if (req.has_param("from")) from = parse_timestamp(req.get_param_value("from"));
      if (req.has_param("to")) to = parse_timestamp(req.get_param_value("to"));
      Json list = Json::array();
      for (const auto& s : store.list(from, to)) {
        list.push_back(
            Json{{"id", s.id}, {"created_at", format_timestamp(s.created_at)}, {"label", s.label}});
      }
      send_json(res, 200, Json{{"snapshots", std::move(list)}});
    }));

    server.Get("/snapshots/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, snapshot_to_json(store.load(req.path_params.at("id"))));
    }));

    server.Get("/snapshots/:a/diff/:b", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, delta_to_json(store.diff(req.path_params.at("a"), req.path_params.at("b"))));
    }));

    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
          send_error(res, 500, "internal", "unhandled server error");
        });
  }
};

ApiService::ApiService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

ApiService::~ApiService() = default;

bool ApiService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ApiService::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool ApiService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ApiService::stop() { impl_->server.stop(); }

void ApiService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace riskflow
