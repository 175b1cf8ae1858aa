#include "muw/service.hpp"

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <pthread.h>
#include <thread>

#include <fmt/format.h>

#include "httplib.h"
#include "muw/classifier.hpp"
#include "muw/explain.hpp"

namespace muw {

ServiceConfig with_env_overrides(ServiceConfig config) {
  if (const char* listen = std::getenv("MUW_LISTEN"); listen != nullptr && *listen != '\0') {
    const std::string_view text(listen);
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorKind::invalid_input, fmt::format("MUW_LISTEN '{}' is not host:port", text), "MUW_LISTEN");
    }
    config.host = std::string(text.substr(0, colon));
    try {
      config.port = std::stoi(std::string(text.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_input, fmt::format("MUW_LISTEN '{}' has a bad port", text), "MUW_LISTEN");
    }
  }
  if (const char* model = std::getenv("MUW_MODEL"); model != nullptr && *model != '\0') config.model_path = model;
  return config;
}

Json classify_response(const ConceptualSpace& space, const Instance& instance, std::optional<double> delta) {
  return to_json(classify(instance, space, ClassifyOptions{delta, std::nullopt}));
}

Json model_summary(const ConceptualSpace& space) {
  Json dims = Json::array();
  for (const auto& spec : space.dimensions) dims.push_back(to_json(spec));
  Json concepts = Json::object();
  for (const auto& [id, c] : space.concepts) {
    Json prototype = Json::object();
    for (const auto& [dim, value] : c.prototype) prototype[dim] = value_to_json(value, space.dimension(dim));
    Json memberships = Json::object();
    for (const auto& [dim, mf] : c.memberships) memberships[dim] = to_json(mf);
    Json weights = Json::array();
    const auto ranking = feature_importance(c);
    for (const auto& r : ranking) {
      weights.push_back({{"dimension", r.dimension}, {"w", c.weights.at(r.dimension)}, {"normalized", r.weight}});
    }
    concepts[id] = {{"prototype", std::move(prototype)},
                    {"memberships", std::move(memberships)},
                    {"weights", std::move(weights)},
                    {"support", c.support}};
  }
  return {{"schema_version", space.schema_version},
          {"dimensions", std::move(dims)},
          {"standardization", to_json(space)["standardization"]},
          {"concepts", std::move(concepts)},
          {"params", {{"epsilon", space.params.epsilon}, {"w_min", space.params.w_min}, {"delta", space.params.delta}}}};
}

Json error_body(const Error& error) {
  return {{"error", {{"kind", to_string(error.kind()), }, {"message", error.what()}, {"field", error.field()}}}};
}

ProbeService::ProbeService(ConceptualSpace space, ServiceConfig config, std::optional<knowledge::KnowledgeFixture> fixture)
    : space_(std::move(space)), config_(std::move(config)), fixture_(std::move(fixture)) {
  const auto violations = validate_space(space_);
  if (!violations.empty()) {
    throw Error(ErrorKind::invalid_model,
                fmt::format("model fails validation: {} ({}/{})", violations.front().message,
                            violations.front().concept_id, violations.front().dimension));
  }
  if (config_.delta && !(*config_.delta >= 0.0 && *config_.delta <= 1.0)) {
    throw Error(ErrorKind::invalid_model, fmt::format("delta {} outside [0, 1]", *config_.delta), "delta");
  }
  hash_ = content_hash(serialize_space(space_));
}

std::optional<double> ProbeService::request_delta(const Json& body) const {
  if (body.contains("delta") && !body["delta"].is_null()) return json_detail::require_number(body["delta"], "delta");
  return config_.delta;
}

HttpReply ProbeService::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const auto reply = [](int status, const Json& doc) { return HttpReply{status, dump_json(doc)}; };
  const bool is_get = method == "GET";
  const bool is_post = method == "POST";
  try {
    if (path == "/v1/health") {
      if (!is_get) return reply(405, {{"error", {{"kind", "method"}, {"message", "use GET"}, {"field", ""}}}});
      return reply(200, {{"status", "ok"}, {"model_hash", hash_}});
    }
    if (path == "/v1/model") {
      if (!is_get) return reply(405, {{"error", {{"kind", "method"}, {"message", "use GET"}, {"field", ""}}}});
      return reply(200, model_summary(space_));
    }
    const bool known = path == "/v1/classify" || path == "/v1/explain" || path == "/v1/whatif" || path == "/v1/extract";
    if (!known) return reply(404, {{"error", {{"kind", "not_found"}, {"message", "no such endpoint"}, {"field", ""}}}});
    if (!is_post) return reply(405, {{"error", {{"kind", "method"}, {"message", "use POST"}, {"field", ""}}}});

    const Json doc = parse_json(body, "request body");
    json_detail::require_object(doc, "");
    if (path == "/v1/classify") {
      const auto instance = instance_from_json(json_detail::require(doc, "instance", ""), space_.dimensions, "instance");
      return reply(200, classify_response(space_, instance, request_delta(doc)));
    }
    if (path == "/v1/explain") {
      const auto instance = instance_from_json(json_detail::require(doc, "instance", ""), space_.dimensions, "instance");
      ExplainOptions options;
      options.classify.delta = request_delta(doc);
      return reply(200, to_json(explain(instance, space_, options), space_));
    }
    if (path == "/v1/whatif") {
      auto request = whatif_request_from_json(doc, space_);
      if (!request.delta) request.delta = config_.delta;
      return reply(200, to_json(whatif(request, space_)));
    }
    // /v1/extract
    if (!fixture_) {
      return reply(404, {{"error", {{"kind", "not_found"}, {"message", "no knowledge fixtures configured"}, {"field", ""}}}});
    }
    const auto label = json_detail::require_string(json_detail::require(doc, "label", ""), "label");
    std::vector<std::string> dims = knowledge::default_utilisation_dims();
    if (doc.contains("dims")) {
      dims.clear();
      for (const auto& d : json_detail::require_array(doc["dims"], "dims")) dims.push_back(json_detail::require_string(d, "dims"));
    }
    return reply(200, knowledge::to_json(knowledge::ground_utilisation(label, dims, *fixture_)));
  } catch (const Error& e) {
    return reply(e.kind() == ErrorKind::schema ? 400 : 422, error_body(e));
  }
}

void ProbeService::mount(httplib::Server& server) const {
  const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply = handle(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  for (const auto* path : {"/v1/health", "/v1/model"}) server.Get(path, forward);
  for (const auto* path : {"/v1/classify", "/v1/explain", "/v1/whatif", "/v1/extract"}) server.Post(path, forward);

  const auto allowed = [this](const std::string& origin) {
    return std::any_of(config_.cors_allow.begin(), config_.cors_allow.end(),
                       [&](const std::string& a) { return a == "*" || a == origin; });
  };
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_post_routing_handler([allowed](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    if (origin.empty() || !allowed(origin)) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Vary", "Origin");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(dump_json({{"error", {{"kind", "http"}, {"message", fmt::format("HTTP {}", res.status)}, {"field", ""}}}}),
                    "application/json");
  });
}

int serve(const ServiceConfig& config, std::ostream& log) {
  std::optional<ProbeService> service;
  try {
    if (config.model_path.empty()) throw Error(ErrorKind::invalid_input, "no model path given");
    std::optional<knowledge::KnowledgeFixture> fixture;
    for (const auto& path : config.fixture_paths) {
      if (!fixture) fixture.emplace();
      knowledge::merge_fixture(*fixture, knowledge::load_fixture(path));
    }
    service.emplace(load_space(config.model_path), config, std::move(fixture));
  } catch (const Error& e) {
    log << dump_json(error_body(e));
    return 2;
  }

  // Signals are consumed by a dedicated thread so shutdown runs outside signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  service->mount(server);
  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  });

  log << fmt::format("serving {} on {}:{} (model {})\n", config.model_path.string(), config.host, config.port,
                     service->model_hash());
  log.flush();
  const bool ok = server.listen(config.host, config.port);
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  if (!ok) {
    log << fmt::format("could not listen on {}:{}\n", config.host, config.port);
    return 2;
  }
  return 0;
}

}  // namespace muw
