#include "doctest.h"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include <unistd.h>

#include "httplib.h"
#include "muw/knowledge_sources.hpp"
#include "support.hpp"

using namespace muw;
using namespace muw::knowledge;

namespace {

Json conceptnet_body() {
  const auto edge = [](std::string end_term, std::string end_label, double weight, std::string dataset) {
    return Json{{"start", {{"@id", "/c/en/forklift"}, {"term", "/c/en/forklift"}, {"label", "forklift"}}},
                {"end", {{"@id", end_term}, {"term", end_term}, {"label", end_label}}},
                {"rel", {{"@id", "/r/UsedFor"}, {"label", "UsedFor"}}},
                {"weight", weight},
                {"dataset", dataset},
                {"sources", Json::array({{{"contributor", "/s/contributor/omcs/someone"}}})}};
  };
  Json body{{"edges", Json::array()}};
  body["edges"].push_back(edge("/c/en/lift_heavy_thing", "lifting heavy things", 3.0, "/d/conceptnet/4/en"));
  body["edges"].push_back(edge("/c/en/carry_load", "carrying loads", 2.5, "/d/wordnet/3.1"));
  body["edges"].push_back(edge("/c/fr/soulever", "soulever", 2.0, "/d/conceptnet/4/fr"));
  return body;
}

/// Local stand-in for the ConceptNet API on an ephemeral port.
struct FakeConceptNet {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  std::string last_query;

  FakeConceptNet() {
    server.Get("/query", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_query = req.get_param_value("start") + " " + req.get_param_value("rel");
      res.set_content(conceptnet_body().dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeConceptNet() {
    server.stop();
    thread.join();
  }
  [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("muw-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("lexname table") {
  CHECK(lexname_for(6) == "noun.artifact");
  CHECK(lexname_for(31) == "verb.cognition");
  CHECK(lexname_for(35) == "verb.contact");
  CHECK(lexname_for(38) == "verb.motion");
  CHECK(lexname_for(99) == "unknown");
}

TEST_CASE("parse a WordNet data line") {
  std::string id;
  SynsetEntry entry;
  const std::vector<std::string> names;
  REQUIRE(parse_wordnet_data_line("03482001 06 n 02 hammer 1 cock 0 001 @ 03932203 n 0000 | gun part", names, id, entry));
  CHECK(id == "03482001-n");
  CHECK(entry.lexname == "noun.artifact");
  CHECK(entry.lemmas == std::vector<std::string>{"hammer", "cock"});
  CHECK_FALSE(parse_wordnet_data_line("  1 licence text", names, id, entry));
  CHECK_THROWS_AS(parse_wordnet_data_line("03482001 06 n 05 hammer 1 | short", names, id, entry), Error);
}

TEST_CASE("read a WordNet dump directory") {
  const auto wn = read_wordnet_database(testing::source_path("tests/data/wordnet"));
  REQUIRE(wn.wordnet.count("hammer"));
  CHECK(wn.wordnet.at("hammer").size() == 3);
  CHECK(select_synset("hammer", wn) == "03481172-n");
  CHECK(select_synset("drill", wn) == "03239726-n");
  CHECK(synset_lemmas("01441100-v", wn) == std::vector<std::string>{"drill", "bore"});
  CHECK(has_verb_reading("bore", wn));
  CHECK(filter_physical(std::vector<std::string>{"lift", "think"}, wn) == std::vector<std::string>{"lift"});
  CHECK_THROWS_AS(read_wordnet_database(testing::source_path("tests/golden")), Error);
}

TEST_CASE("parse a ConceptNet response") {
  const auto edges = parse_conceptnet_response(conceptnet_body());
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].start == "forklift");
  CHECK(edges[0].relation == "UsedFor");
  CHECK(edges[0].end == "lifting heavy things");
  CHECK(edges[0].weight == 3.0);
  CHECK(edges[0].source == EdgeSource::crowd);
  CHECK(edges[1].source == EdgeSource::wordnet);
  CHECK_THROWS_AS(parse_conceptnet_response(Json::object()), Error);
}

TEST_CASE("ConceptNet client queries, caches and rate limits") {
  FakeConceptNet fake;
  ConceptNetConfig config;
  config.base_url = fake.url();
  config.cache_dir = fresh_dir("cache");
  config.min_interval = std::chrono::milliseconds(150);
  ConceptNetClient client(config);

  const auto start = std::chrono::steady_clock::now();
  const auto first = client.usedfor_edges("forklift");
  CHECK(first.size() == 2);
  CHECK(fake.last_query == "/c/en/forklift /r/UsedFor");
  CHECK(std::filesystem::exists(config.cache_dir / "conceptnet-usedfor-forklift.json"));

  // cache hit: no new request
  const auto again = client.usedfor_edges("forklift");
  CHECK(again == first);
  CHECK(fake.hits == 1);
  CHECK(client.network_requests() == 1);

  // second network request waits out the interval
  client.usedfor_edges("pallet_jack");
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(fake.hits == 2);
  CHECK(elapsed >= std::chrono::milliseconds(150));

  // the cache is a valid fixture file
  const auto cached = load_fixture(config.cache_dir / "conceptnet-usedfor-forklift.json");
  CHECK(cached.conceptnet_edges == first);
  std::filesystem::remove_all(config.cache_dir);
}

TEST_CASE("live edges feed the same pipeline") {
  FakeConceptNet fake;
  ConceptNetConfig config;
  config.base_url = fake.url();
  config.min_interval = std::chrono::milliseconds(0);
  ConceptNetClient client(config);
  const auto base = load_fixture(testing::source_path("data/kb"));
  const auto live = with_live_edges(base, "forklift", client);
  const auto g = ground_utilisation("forklift", default_utilisation_dims(), live);
  // the fake serves a wordnet-sourced edge, which takes precedence
  CHECK(g.provenance == Provenance::wordnet_edge);
  CHECK(g.verbs == std::vector<std::string>{"carry"});
  CHECK(g.dims.at("lift") == 0);
}

TEST_CASE("unreachable ConceptNet is reported") {
  ConceptNetConfig config;
  config.base_url = "http://127.0.0.1:1";
  config.timeout = std::chrono::seconds(2);
  ConceptNetClient client(config);
  CHECK_THROWS_AS(client.usedfor_edges("drill"), Error);
}
