#include "muw/cli.hpp"

#include <filesystem>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "muw/classifier.hpp"
#include "muw/explain.hpp"
#include "muw/json_io.hpp"
#include "muw/knowledge.hpp"
#include "muw/knowledge_sources.hpp"
#include "muw/learning.hpp"
#include "muw/scenegen.hpp"
#include "muw/service.hpp"

namespace muw {
namespace {

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
}

std::optional<double> opt(double value, const CLI::Option* option) {
  if (option->count() == 0) return std::nullopt;
  return value;
}

Instance read_instance(const std::string& path, const ConceptualSpace& space) {
  return instance_from_json(read_json_file(path), space.dimensions, "instance");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpretable conceptual-space classifier", "muw"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded synthetic dataset");
  std::string gen_fixture, gen_config, gen_out;
  std::uint64_t gen_seed = 0;
  bool gen_list = false;
  auto* gen_fixture_opt = gen->add_option("--fixture", gen_fixture, "Built-in scene name");
  auto* gen_config_opt = gen->add_option("--config", gen_config, "Scene configuration JSON")->check(CLI::ExistingFile);
  gen_fixture_opt->excludes(gen_config_opt);
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Override the scene's seed");
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  gen->add_flag("--list", gen_list, "List built-in scenes");

  // train
  auto* tr = app.add_subcommand("train", "Learn a model from labelled data");
  std::string tr_data, tr_csv, tr_schema, tr_out;
  TrainingConfig tr_config;
  auto* tr_data_opt = tr->add_option("--data", tr_data, "Dataset JSON")->check(CLI::ExistingFile);
  auto* tr_csv_opt = tr->add_option("--csv", tr_csv, "Dataset CSV")->check(CLI::ExistingFile);
  auto* tr_schema_opt = tr->add_option("--schema", tr_schema, "Dimension schema for --csv")->check(CLI::ExistingFile);
  tr_data_opt->excludes(tr_csv_opt);
  tr_csv_opt->needs(tr_schema_opt);
  tr->add_option("--out", tr_out, "Model output file (default stdout)");
  tr->add_option("--min-support", tr_config.min_support, "Minimum instances per label")->capture_default_str();
  tr->add_option("--delta", tr_config.delta, "Disputable threshold stored in the model")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tr->add_option("--width-min", tr_config.width_min)->check(CLI::PositiveNumber)->capture_default_str();
  tr->add_option("--w-min", tr_config.w_min)->check(CLI::Range(0.0, 1.0))->capture_default_str();

  // classify / explain
  std::string model_path, instance_path;
  double delta = 0.0;
  double min_typicality = 0.0;
  auto* cl = app.add_subcommand("classify", "Classify one instance");
  cl->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  cl->add_option("--instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  auto* cl_delta = cl->add_option("--delta", delta, "Disputable threshold")->check(CLI::Range(0.0, 1.0));
  auto* cl_reject = cl->add_option("--min-typicality", min_typicality, "Reject below this typicality");

  auto* ex = app.add_subcommand("explain", "Classify and explain one instance");
  std::size_t ex_factors = 2;
  ex->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  ex->add_option("--instance", instance_path, "Instance JSON")->required()->check(CLI::ExistingFile);
  auto* ex_delta = ex->add_option("--delta", delta, "Disputable threshold")->check(CLI::Range(0.0, 1.0));
  ex->add_option("--factors", ex_factors, "Factor sentences in the rationale")->capture_default_str();

  // whatif
  auto* wi = app.add_subcommand("whatif", "Re-classify under weight, membership or value overrides");
  std::string wi_request;
  wi->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  wi->add_option("--request", wi_request, "What-if request JSON")->required()->check(CLI::ExistingFile);

  // extract
  auto* kx = app.add_subcommand("extract", "Ground a label's utilisation dimensions");
  std::string kx_label, kx_wordnet, kx_cache, kx_url = knowledge::ConceptNetConfig{}.base_url;
  std::vector<std::string> kx_fixtures;
  std::vector<std::string> kx_dims = knowledge::default_utilisation_dims();
  bool kx_live = false;
  kx->add_option("--label", kx_label, "Object label, e.g. forklift")->required();
  kx->add_option("--fixtures", kx_fixtures, "Fixture files or directories");
  kx->add_option("--dims", kx_dims, "Utilisation dimensions")->delimiter(',')->capture_default_str();
  kx->add_option("--wordnet-dir", kx_wordnet, "WordNet dict directory")->check(CLI::ExistingDirectory);
  kx->add_flag("--live", kx_live, "Query ConceptNet for UsedFor edges");
  kx->add_option("--cache", kx_cache, "ConceptNet response cache directory");
  kx->add_option("--conceptnet-url", kx_url, "ConceptNet base URL")->capture_default_str();

  // serve
  auto* sv = app.add_subcommand("serve", "Serve the probing API");
  ServiceConfig sv_config;
  std::string sv_listen, sv_model;
  double sv_delta = 0.0;
  std::vector<std::string> sv_fixtures;
  sv->add_option("--model", sv_model, "Model JSON (or MUW_MODEL)");
  sv->add_option("--listen", sv_listen, "host:port (or MUW_LISTEN)");
  auto* sv_delta_opt = sv->add_option("--delta", sv_delta, "Default disputable threshold")->check(CLI::Range(0.0, 1.0));
  sv->add_option("--fixtures", sv_fixtures, "Knowledge fixtures enabling /v1/extract");
  sv->add_option("--cors", sv_config.cors_allow, "Allowed browser origins");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (gen_list) {
        for (const auto& name : scenegen::builtin_fixture_names()) out << name << '\n';
        return kExitOk;
      }
      if (gen_fixture.empty() && gen_config.empty()) {
        err << "gen: one of --fixture or --config is required\n";
        return kExitUsage;
      }
      auto config = gen_config.empty() ? scenegen::builtin_fixture(gen_fixture)
                                       : scenegen::scene_config_from_json(read_json_file(gen_config));
      if (gen_seed_opt->count() > 0) config.seed = gen_seed;
      emit(dump_json(to_json(scenegen::generate(config))), gen_out, out);
      return kExitOk;
    }
    if (tr->parsed()) {
      if (tr_data.empty() && tr_csv.empty()) {
        err << "train: one of --data or --csv is required\n";
        return kExitUsage;
      }
      const Dataset data =
          tr_data.empty() ? dataset_from_csv(read_text_file(tr_csv), read_json_file(tr_schema)) : load_dataset(tr_data);
      emit(serialize_space(train(data, tr_config)), tr_out, out);
      return kExitOk;
    }
    if (cl->parsed()) {
      const auto space = load_space(model_path);
      const auto instance = read_instance(instance_path, space);
      if (cl_reject->count() > 0) {
        out << dump_json(to_json(classify(instance, space, ClassifyOptions{opt(delta, cl_delta), min_typicality})));
      } else {
        out << dump_json(classify_response(space, instance, opt(delta, cl_delta)));
      }
      return kExitOk;
    }
    if (ex->parsed()) {
      const auto space = load_space(model_path);
      ExplainOptions options;
      options.classify.delta = opt(delta, ex_delta);
      options.rationale_factors = ex_factors;
      out << dump_json(to_json(explain(read_instance(instance_path, space), space, options), space));
      return kExitOk;
    }
    if (wi->parsed()) {
      const auto space = load_space(model_path);
      out << dump_json(to_json(whatif(whatif_request_from_json(read_json_file(wi_request), space), space)));
      return kExitOk;
    }
    if (kx->parsed()) {
      knowledge::KnowledgeFixture fixture;
      if (!kx_wordnet.empty()) knowledge::merge_fixture(fixture, knowledge::read_wordnet_database(kx_wordnet));
      for (const auto& path : kx_fixtures) knowledge::merge_fixture(fixture, knowledge::load_fixture(path));
      if (kx_live) {
        knowledge::ConceptNetConfig cn;
        cn.base_url = kx_url;
        cn.cache_dir = kx_cache;
        knowledge::ConceptNetClient client(cn);
        fixture = knowledge::with_live_edges(fixture, kx_label, client);
      }
      out << dump_json(knowledge::to_json(knowledge::ground_utilisation(kx_label, kx_dims, fixture)));
      return kExitOk;
    }
    if (sv->parsed()) {
      sv_config = with_env_overrides(sv_config);
      if (!sv_model.empty()) sv_config.model_path = sv_model;
      if (!sv_listen.empty()) {
        const auto colon = sv_listen.rfind(':');
        if (colon == std::string::npos) {
          err << "serve: --listen expects host:port\n";
          return kExitUsage;
        }
        sv_config.host = sv_listen.substr(0, colon);
        sv_config.port = std::stoi(sv_listen.substr(colon + 1));
      }
      if (sv_delta_opt->count() > 0) sv_config.delta = sv_delta;
      for (const auto& f : sv_fixtures) sv_config.fixture_paths.emplace_back(f);
      return serve(sv_config, err);
    }
  } catch (const Error& e) {
    err << dump_json(error_body(e));
    return kExitData;
  } catch (const std::exception& e) {
    err << dump_json({{"error", {{"kind", "internal"}, {"message", e.what()}, {"field", ""}}}});
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace muw
