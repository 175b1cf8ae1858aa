#pragma once

// HTTP probing service. Every endpoint reads the loaded model and never
// writes it; what-if overrides live only for the duration of a request.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "muw/core.hpp"
#include "muw/json_io.hpp"
#include "muw/knowledge.hpp"

namespace httplib {
class Server;
}

namespace muw {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path model_path;
  /// Overrides the model's delta for requests that do not carry one.
  std::optional<double> delta;
  std::vector<std::filesystem::path> fixture_paths;
  bool live_knowledge = false;
  std::filesystem::path knowledge_cache;
  /// Origins allowed to call the API from a browser; "*" allows all.
  std::vector<std::string> cors_allow;
};

/// Applies MUW_LISTEN ("host:port") and MUW_MODEL when set.
ServiceConfig with_env_overrides(ServiceConfig config);

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Shared by the CLI and the HTTP endpoint so both emit identical bytes.
Json classify_response(const ConceptualSpace& space, const Instance& instance, std::optional<double> delta);
Json model_summary(const ConceptualSpace& space);
Json error_body(const Error& error);

class ProbeService {
 public:
  /// Throws invalid_model if the space fails validation or the delta is out of [0, 1].
  ProbeService(ConceptualSpace space, ServiceConfig config, std::optional<knowledge::KnowledgeFixture> fixture = {});

  [[nodiscard]] HttpReply handle(std::string_view method, std::string_view path, std::string_view body) const;
  void mount(httplib::Server& server) const;

  [[nodiscard]] const std::string& model_hash() const noexcept { return hash_; }
  [[nodiscard]] const ConceptualSpace& space() const noexcept { return space_; }

 private:
  [[nodiscard]] std::optional<double> request_delta(const Json& body) const;

  ConceptualSpace space_;
  ServiceConfig config_;
  std::optional<knowledge::KnowledgeFixture> fixture_;
  std::string hash_;
};

/// Loads the model, binds and serves until SIGINT/SIGTERM. Returns a process exit code.
int serve(const ServiceConfig& config, std::ostream& log);

}  // namespace muw
