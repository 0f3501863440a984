#include "urbanembed/cli/app.hpp"

#include "urbanembed/cli/run_config.hpp"
#include "urbanembed/error.hpp"
#include "urbanembed/eval/clustering.hpp"
#include "urbanembed/eval/regression.hpp"
#include "urbanembed/graph/graphs.hpp"
#include "urbanembed/model/benchmark.hpp"
#include "urbanembed/train/checkpoint.hpp"
#include "urbanembed/train/export.hpp"
#include "urbanembed/train/model.hpp"
#include "urbanembed/train/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace urbanembed::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raw flag values; only flags the user actually passed are applied.
struct Flags {
  std::string config_path;
  std::string data_dir;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t epochs = 0, dim = 0, heads = 0, memory = 0;
  double beta = 0.0;
  double learning_rate = 0.0;
  std::string ablate;
  bool disable_cleansing = false, plain_attention = false, self_attention_fusion = false, no_dual_stage = false;
  bool normalize_losses = false;
  bool dump_graphs = false;

  std::size_t regions = 0, districts = 0, poi_categories = 0, checkin_categories = 0, trips = 0;
  double noise = 0.0;
  bool deterministic_trips = false;

  std::map<std::string, CLI::Option*> opts;
  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_output_flag(CLI::App* cmd, Flags& f, bool required) {
  auto* o = cmd->add_option("--out", f.out, "Output directory (must exist)");
  if (required) o->required();
  f.opts["out"] = o;
}

void add_train_flags(CLI::App* cmd, Flags& f) {
  f.opts["config"] = cmd->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  f.opts["seed"] = cmd->add_option("--seed", f.seed, "Random seed");
  f.opts["epochs"] = cmd->add_option("--epochs", f.epochs, "Training epochs");
  f.opts["dim"] = cmd->add_option("--dim", f.dim, "Embedding dimension d");
  f.opts["heads"] = cmd->add_option("--heads", f.heads, "Attention heads T (must divide d)");
  f.opts["memory"] = cmd->add_option("--memory", f.memory, "Memory units H");
  f.opts["beta"] = cmd->add_option("--beta", f.beta, "Residual weight in [0, 1]");
  f.opts["lr"] = cmd->add_option("--lr", f.learning_rate, "Adam learning rate");
  f.opts["ablate"] = cmd->add_option("--ablate", f.ablate, "Variant: full, w/o-GCL, w/o-MGAM, w/o-AFM, w/o-DSGF");
  f.opts["disable-cleansing"] = cmd->add_flag("--disable-cleansing", f.disable_cleansing, "Same as --ablate w/o-GCL");
  f.opts["plain-attention"] = cmd->add_flag("--use-plain-attention", f.plain_attention, "Same as --ablate w/o-MGAM");
  f.opts["self-attention-fusion"] =
      cmd->add_flag("--use-self-attention-fusion", f.self_attention_fusion, "Same as --ablate w/o-AFM");
  f.opts["no-dual-stage"] = cmd->add_flag("--no-dual-stage", f.no_dual_stage, "Same as --ablate w/o-DSGF");
  f.opts["normalize-losses"] =
      cmd->add_flag("--normalize-losses", f.normalize_losses, "Divide L_ODP by the trip count and L_FP, L_SP by N^2");
}

void add_data_flags(CLI::App* cmd, Flags& f) {
  f.opts["data"] = cmd->add_option("--data", f.data_dir, "Dataset directory (regions/trips/poi/checkins/targets CSV)")
                       ->check(CLI::ExistingDirectory);
  f.opts["regions"] = cmd->add_option("--regions", f.regions, "Generator: number of regions");
  f.opts["districts"] = cmd->add_option("--districts", f.districts, "Generator: number of districts");
  f.opts["poi-categories"] = cmd->add_option("--poi-categories", f.poi_categories, "Generator: POI categories");
  f.opts["checkin-categories"] =
      cmd->add_option("--checkin-categories", f.checkin_categories, "Generator: check-in categories");
  f.opts["trips"] = cmd->add_option("--trips", f.trips, "Generator: number of trips");
  f.opts["noise"] = cmd->add_option("--noise", f.noise, "Generator: noise level in [0, 1]");
  f.opts["deterministic-trips"] =
      cmd->add_flag("--deterministic-trips", f.deterministic_trips, "Generator: fixed destination per origin");
}

bool any_generator_flag(const Flags& f) {
  for (const char* name : {"regions", "districts", "poi-categories", "checkin-categories", "trips", "noise",
                           "deterministic-trips"}) {
    if (f.given(name)) return true;
  }
  return false;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
}

// Defaults, then the config file, then explicit flags.
RunConfig resolve(const Flags& f, bool wants_data) {
  RunConfig rc;
  if (f.given("config")) rc = run_config_from_json(read_json_file(f.config_path), rc);
  TrainConfig& t = rc.train;
  if (f.given("seed")) t.seed = f.seed;
  if (f.given("epochs")) t.epochs = f.epochs;
  if (f.given("dim")) t.dim = f.dim;
  if (f.given("heads")) t.heads = f.heads;
  if (f.given("memory")) t.memory = f.memory;
  if (f.given("beta")) t.beta = f.beta;
  if (f.given("lr")) t.learning_rate = f.learning_rate;
  if (f.given("normalize-losses")) t.normalize_losses = true;

  std::vector<Ablation> chosen;
  if (f.given("ablate")) {
    const auto parsed = parse_ablation(f.ablate);
    if (!parsed) throw std::invalid_argument("unknown ablation '" + f.ablate + "'");
    chosen.push_back(*parsed);
  }
  if (f.given("disable-cleansing")) chosen.push_back(Ablation::NoGraphCleansing);
  if (f.given("plain-attention")) chosen.push_back(Ablation::PlainAttention);
  if (f.given("self-attention-fusion")) chosen.push_back(Ablation::SelfAttentionFusion);
  if (f.given("no-dual-stage")) chosen.push_back(Ablation::NoDualStageFusion);
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  if (chosen.size() > 1) throw std::invalid_argument("only one ablation switch may be active per run");
  if (chosen.size() == 1) t.ablation = chosen.front();

  if (f.given("out")) rc.out = f.out;
  if (f.given("dump-graphs")) rc.dump_graphs = true;

  if (!wants_data) return rc;
  if (f.given("data")) rc.data_dir = f.data_dir;
  if (any_generator_flag(f)) {
    if (rc.data_dir) throw std::invalid_argument("generator flags cannot be combined with a dataset directory");
    rc.generator = rc.generator.value_or(CityConfig{});
  }
  if (!rc.data_dir && !rc.generator) rc.generator = CityConfig{};
  if (rc.generator) {
    CityConfig& g = *rc.generator;
    if (f.given("regions")) g.n_regions = f.regions;
    if (f.given("districts")) g.n_districts = f.districts;
    if (f.given("poi-categories")) g.n_poi_categories = f.poi_categories;
    if (f.given("checkin-categories")) g.n_checkin_categories = f.checkin_categories;
    if (f.given("trips")) g.n_trips = f.trips;
    if (f.given("noise")) g.noise_level = f.noise;
    if (f.given("deterministic-trips")) g.deterministic_trips = true;
    if (f.given("seed")) g.seed = f.seed;
  }
  rc.validate();
  return rc;
}

void require_output_dir(const fs::path& dir) {
  if (dir.empty()) throw std::invalid_argument("--out is required");
  if (!fs::is_directory(dir)) throw std::invalid_argument("output directory does not exist: " + dir.string());
}

Dataset obtain_dataset(const RunConfig& rc) {
  if (rc.data_dir) return load_dataset(DatasetPaths::in_directory(*rc.data_dir));
  return generate_city(*rc.generator);
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json loss_json(const LossRecord& r) {
  return json{{"epoch", r.epoch}, {"l_odp", r.odp},         {"l_fp", r.fp},         {"l_sp", r.sp},
              {"total", r.total}, {"raw_odp", r.raw_odp}, {"raw_fp", r.raw_fp}, {"raw_sp", r.raw_sp}};
}

EpochCallback progress(std::ostream& err, std::size_t epochs, const std::string& label) {
  const std::size_t every = std::max<std::size_t>(1, epochs / 10);
  return [&err, every, epochs, label](const LossRecord& r) {
    if (r.epoch == 1 || r.epoch % every == 0 || r.epoch == epochs) {
      err << label << "epoch " << r.epoch << "/" << epochs << " loss " << r.total << " (odp " << r.odp << ", fp "
          << r.fp << ", sp " << r.sp << ")\n";
    }
  };
}

int cmd_generate(const Flags& f, std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(f, true);
  if (rc.data_dir) throw std::invalid_argument("generate takes generator settings, not --data");
  require_output_dir(rc.out);
  const Dataset data = generate_city(*rc.generator);
  write_dataset(data, rc.out);
  const json manifest{{"generator", to_json(*rc.generator)},
                      {"seed", rc.generator->seed},
                      {"files", {"regions.csv", "trips.csv", "poi.csv", "checkins.csv", "targets.csv"}}};
  write_json(manifest, rc.out / "manifest.json");
  err << "wrote " << data.n_regions() << " regions and " << data.trips.size() << " trips to " << rc.out.string()
      << "\n";
  out << json{{"command", "generate"}, {"out", rc.out.string()}, {"manifest", manifest}}.dump() << '\n';
  return kSuccess;
}

json train_and_write(const RunConfig& rc, const Dataset& data, std::ostream& err, const std::string& label) {
  const GraphSet graphs = build_graphs(data);
  if (rc.dump_graphs) dump_graphs(graphs, rc.out);
  const ParameterSet initial = init_params(rc.train, data.n_regions());
  err << label << "training " << to_string(rc.train.ablation) << " on " << data.n_regions() << " regions, "
      << initial.scalar_count() << " parameters in " << initial.size() << " tensors\n";
  const TrainResult result = train(graphs, data.trips.size(), rc.train, progress(err, rc.train.epochs, label));

  const json effective = to_json(rc);
  save_checkpoint(Checkpoint{rc.train, result.params, data.n_regions()}, rc.out / "checkpoint.json");
  write_loss_log(result.log, rc.out / "loss_log.csv");
  const EmbeddingTable table = make_embedding_table(data.regions, result.views);
  write_embeddings_csv(table, rc.out / "embeddings.csv");
  write_json(embeddings_to_json(table, json{{"config", effective}}), rc.out / "embeddings.json");
  write_json(effective, rc.out / "run_config.json");

  json summary{{"command", "train"},
               {"variant", to_string(rc.train.ablation)},
               {"n_regions", data.n_regions()},
               {"n_parameters", result.params.scalar_count()},
               {"epochs", rc.train.epochs},
               {"config", effective}};
  if (!result.log.empty()) {
    summary["first"] = loss_json(result.log.front());
    summary["final"] = loss_json(result.log.back());
  }
  return summary;
}

int cmd_train(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(f, true);
  require_output_dir(rc.out);
  const Dataset data = obtain_dataset(rc);
  out << train_and_write(rc, data, err, "").dump() << '\n';
  return kSuccess;
}

int cmd_embed(const Flags& f, const std::string& checkpoint_path, std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(f, true);
  require_output_dir(rc.out);
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  rc.train = ck.config;
  const Dataset data = obtain_dataset(rc);
  if (data.n_regions() != ck.n_regions) {
    throw DataError("checkpoint was trained on " + std::to_string(ck.n_regions) + " regions, dataset has " +
                    std::to_string(data.n_regions()));
  }
  const GraphSet graphs = build_graphs(data);
  if (rc.dump_graphs) dump_graphs(graphs, rc.out);
  const auto views = embed(ck.params, graphs, data.trips.size(), ck.config);
  const EmbeddingTable table = make_embedding_table(data.regions, views);
  const json effective = to_json(rc);
  write_embeddings_csv(table, rc.out / "embeddings.csv");
  write_json(embeddings_to_json(table, json{{"config", effective}}), rc.out / "embeddings.json");
  err << "embedded " << data.n_regions() << " regions\n";
  out << json{{"command", "embed"}, {"n_regions", data.n_regions()}, {"columns", table.columns.size()},
              {"config", effective}}
             .dump()
      << '\n';
  return kSuccess;
}

json regression_json(const RegressionReport& r) {
  return json{{"task", r.task},           {"mae", r.mae},   {"rmse", r.rmse}, {"r2", r.r2},
              {"l1_weight", r.l1_weight}, {"folds", r.folds}};
}

struct EvalFlags {
  std::string embeddings;
  std::string data_dir;
  std::size_t folds = 5;
  std::size_t clusters = 0;
};

int cmd_evaluate(const Flags& f, const EvalFlags& ef, std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(f, false);
  if (!rc.out.empty()) require_output_dir(rc.out);
  const std::uint64_t seed = rc.train.seed;
  const EmbeddingTable table = read_embeddings_csv(ef.embeddings);
  const Dataset data = load_dataset(DatasetPaths::in_directory(ef.data_dir));
  const Matrix x = align_rows(table, data.regions);

  json reports = json::array();
  json warnings = json::array();
  const auto& targets = data.targets;
  const Vector checkin = Eigen::Map<const Vector>(targets.checkin_total.data(),
                                                  static_cast<Eigen::Index>(targets.checkin_total.size()));
  reports.push_back(regression_json(kfold_regress(x, checkin, ef.folds, {}, seed, "checkin")));
  if (targets.crime_count) {
    const Vector crime = Eigen::Map<const Vector>(targets.crime_count->data(),
                                                  static_cast<Eigen::Index>(targets.crime_count->size()));
    reports.push_back(regression_json(kfold_regress(x, crime, ef.folds, {}, seed, "crime")));
  } else {
    warnings.push_back("targets have no crime_count column; crime prediction skipped");
    err << "warning: no crime_count column, skipping crime prediction\n";
  }
  if (data.regions.districts) {
    const auto& labels = *data.regions.districts;
    const std::size_t k = ef.clusters > 0 ? ef.clusters : std::set<int>(labels.begin(), labels.end()).size();
    const ClusteringReport c = evaluate_clustering(x, labels, k, seed);
    reports.push_back(json{{"task", "land_use"}, {"clusters", c.clusters}, {"nmi", c.nmi}, {"ari", c.ari}});
    if (!rc.out.empty()) {
      std::ofstream a(rc.out / "assignments.csv");
      if (!a) throw std::runtime_error("cannot write assignments.csv");
      a << "region_id,cluster\n";
      for (std::size_t i = 0; i < c.assignments.size(); ++i) a << data.regions.ids[i] << ',' << c.assignments[i] << '\n';
    }
  } else {
    warnings.push_back("regions.csv has no district column; land-use clustering skipped");
    err << "warning: no district labels, skipping land-use clustering\n";
  }

  json result{{"command", "evaluate"}, {"reports", reports}, {"warnings", warnings},
              {"config", {{"seed", seed}, {"folds", ef.folds}, {"embeddings", ef.embeddings}, {"data", ef.data_dir}}}};
  if (!rc.out.empty()) {
    for (const auto& r : reports) write_json(r, rc.out / ("report_" + r.at("task").get<std::string>() + ".json"));
  }
  out << result.dump() << '\n';
  return kSuccess;
}

struct BenchFlags {
  std::vector<std::size_t> sizes{256, 1024};
  std::size_t runs = 5;
};

int cmd_benchmark(const Flags& f, const BenchFlags& bf, std::ostream& out, std::ostream& err) {
  const RunConfig rc = resolve(f, false);
  json rows = json::array();
  const std::vector<FusionTiming> timings =
      time_fusion(bf.sizes, rc.train.dim, rc.train.memory, bf.runs, 3, rc.train.seed);
  err << "regions  attentive_ms  self_attention_ms\n";
  for (const FusionTiming& t : timings) {
    err << t.regions << "  " << t.attentive_ms << "  " << t.self_attention_ms << "\n";
    rows.push_back(
        json{{"regions", t.regions}, {"attentive_ms", t.attentive_ms}, {"self_attention_ms", t.self_attention_ms}});
  }
  json result{{"command", "benchmark"}, {"timings", rows}, {"dim", rc.train.dim}, {"memory", rc.train.memory},
              {"runs", bf.runs}};
  if (timings.size() >= 2) {
    const auto& a = timings.front();
    const auto& b = timings.back();
    result["ratios"] = json{{"from", a.regions},
                            {"to", b.regions},
                            {"attentive", b.attentive_ms / a.attentive_ms},
                            {"self_attention", b.self_attention_ms / a.self_attention_ms}};
  }
  out << result.dump() << '\n';
  return kSuccess;
}

int cmd_ablate(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig base = resolve(f, true);
  require_output_dir(base.out);
  const Dataset data = obtain_dataset(base);
  json runs = json::array();
  for (Ablation a : {Ablation::None, Ablation::NoGraphCleansing, Ablation::PlainAttention,
                     Ablation::SelfAttentionFusion, Ablation::NoDualStageFusion}) {
    RunConfig rc = base;
    rc.train.ablation = a;
    std::string dir = to_string(a);
    std::replace(dir.begin(), dir.end(), '/', '_');
    rc.out = base.out / dir;
    fs::create_directories(rc.out);
    runs.push_back(train_and_write(rc, data, err, "[" + to_string(a) + "] "));
  }
  out << json{{"command", "ablate"}, {"runs", runs}}.dump() << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view urban region embedding: generate, train, embed, evaluate, benchmark, ablate", "urbanembed"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  Flags gen, tr, em, ev, be, ab;
  auto* generate = app.add_subcommand("generate", "Write a synthetic city as CSV files plus manifest.json");
  add_train_flags(generate, gen);
  add_data_flags(generate, gen);
  add_output_flag(generate, gen, true);

  auto* train_cmd = app.add_subcommand("train", "Train and write checkpoint, loss log and embeddings");
  add_train_flags(train_cmd, tr);
  add_data_flags(train_cmd, tr);
  add_output_flag(train_cmd, tr, false);
  tr.opts["dump-graphs"] = train_cmd->add_flag("--dump-graphs", tr.dump_graphs, "Also write graph_<view>.csv");

  std::string checkpoint_path;
  auto* embed_cmd = app.add_subcommand("embed", "Embed a dataset with a saved checkpoint");
  embed_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint.json from train")
      ->required()
      ->check(CLI::ExistingFile);
  add_train_flags(embed_cmd, em);
  add_data_flags(embed_cmd, em);
  add_output_flag(embed_cmd, em, false);
  em.opts["dump-graphs"] = embed_cmd->add_flag("--dump-graphs", em.dump_graphs, "Also write graph_<view>.csv");

  EvalFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Regression and clustering reports for an embeddings CSV");
  evaluate->add_option("--embeddings", eval_flags.embeddings, "embeddings.csv")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--data", eval_flags.data_dir, "Dataset directory with targets and regions")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate->add_option("--folds", eval_flags.folds, "Cross-validation folds")->capture_default_str();
  evaluate->add_option("--clusters", eval_flags.clusters, "K-means clusters (default: number of districts)");
  ev.opts["config"] = evaluate->add_option("--config", ev.config_path, "JSON config file")->check(CLI::ExistingFile);
  ev.opts["seed"] = evaluate->add_option("--seed", ev.seed, "Random seed");
  add_output_flag(evaluate, ev, false);

  BenchFlags bench_flags;
  auto* benchmark = app.add_subcommand("benchmark", "Time memory-attention fusion against self-attention");
  benchmark->add_option("--sizes", bench_flags.sizes, "Region counts")->delimiter(',')->capture_default_str();
  benchmark->add_option("--runs", bench_flags.runs, "Timed runs per size (median reported)")->capture_default_str();
  add_train_flags(benchmark, be);

  auto* ablate = app.add_subcommand("ablate", "Train the full model and every ablation variant");
  add_train_flags(ablate, ab);
  add_data_flags(ablate, ab);
  add_output_flag(ablate, ab, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out, err);
    if (train_cmd->parsed()) return cmd_train(tr, out, err);
    if (embed_cmd->parsed()) return cmd_embed(em, checkpoint_path, out, err);
    if (evaluate->parsed()) return cmd_evaluate(ev, eval_flags, out, err);
    if (benchmark->parsed()) return cmd_benchmark(be, bench_flags, out, err);
    if (ablate->parsed()) return cmd_ablate(ab, out, err);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace urbanembed::cli
