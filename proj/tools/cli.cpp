#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempheno/io.hpp"
#include "tempheno/metrics.hpp"
#include "tempheno/optimizer.hpp"
#include "tempheno/synthgen.hpp"

namespace tempheno::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads {"train": {"rank": 4}, ...}; nested objects become option sections.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      input >> doc;
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(doc, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& node, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

std::optional<std::string> config_argument(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

struct Globals {
  bool json_output = false;
  std::string out_dir = ".";
};

struct TrainFlags {
  std::string data;
  std::string durations;
  std::string truth_model;
  std::string truth_pathways;
  std::string report_csv;
  double test_fraction = 0.3;
  HyperParams hp;
};

struct GenerateFlags {
  GenConfig gen;
  std::size_t duration_max = 0;
  std::string format = "csv";
  std::string noise;
  double lambda = 0.0;
  double deletion_p = 0.0;
};

struct ProjectFlags {
  std::string model;
  std::string data;
  std::string durations;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
};

struct EvaluateFlags {
  ProjectFlags project;
  std::string pathways;
  std::string truth_model;
  std::string truth_pathways;
};

struct CompareFlags {
  std::vector<std::string> models;
};

struct InspectFlags {
  std::string model;
  bool no_svg = false;
};

void add_hyperparameter_flags(CLI::App* cmd, HyperParams& hp) {
  cmd->add_option("-R,--rank", hp.rank, "Number of phenotypes")->capture_default_str();
  cmd->add_option("-w,--window", hp.window, "Phenotype length in time steps")
      ->capture_default_str();
  cmd->add_option("--alpha", hp.sparsity_weight, "Sparsity weight")->capture_default_str();
  cmd->add_option("--beta", hp.nonsuccession_weight, "Non-succession weight")
      ->capture_default_str();
  cmd->add_option("--lr", hp.learning_rate, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", hp.batch_size, "Individuals per mini-batch")->capture_default_str();
  cmd->add_option("--epochs", hp.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--seed", hp.rng_seed, "Random seed")->capture_default_str();
  cmd->add_option("--log-epsilon", hp.log_epsilon, "Clamp inside logarithms")
      ->capture_default_str();
}

io::LoadOptions load_options(const std::string& durations,
                             std::optional<std::vector<std::string>> features = std::nullopt) {
  io::LoadOptions options;
  if (!durations.empty()) options.durations_path = durations;
  options.feature_whitelist = std::move(features);
  return options;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void emit_json(const Globals& g, std::ostream& out, const json& payload) {
  if (g.json_output) out << payload.dump(2) << '\n';
}

// Pathways of `ids` taken from a truth pathway file, in the order of `ids`.
std::optional<PathwayCollection> pathways_for(const io::PathwayFile& file,
                                              const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < file.individual_ids.size(); ++k) index[file.individual_ids[k]] = k;
  PathwayCollection out;
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) return std::nullopt;
    out.matrices.push_back(file.pathways[it->second]);
  }
  return out;
}

int cmd_generate(const Globals& g, const GenerateFlags& f, std::ostream& out) {
  GenConfig cfg = f.gen;
  if (f.duration_max > 0) cfg.duration_range = std::make_pair(cfg.duration, f.duration_max);
  SyntheticDataset ds = cfg.repeated > 0 ? generate_repeated_event_phenotypes(cfg) : generate(cfg);

  json summary = {{"command", "generate"},
                  {"individuals", ds.data.individuals()},
                  {"features", ds.data.features()},
                  {"events", ds.data.count_ones()}};
  IrregularTensor written = ds.data;
  if (!f.noise.empty()) {
    NoiseSpec spec;
    if (f.noise == "additive") {
      spec.kind = NoiseKind::Additive;
      spec.additive_lambda = f.lambda;
    } else if (f.noise == "destructive") {
      spec.kind = NoiseKind::Destructive;
      spec.destructive_p = f.deletion_p;
    } else {
      throw Error(ErrorCode::InvalidArgument, "--noise must be additive or destructive");
    }
    Rng rng(mix_seed(cfg.seed, 0x6e6f697365ULL));
    NoisyData noisy = add_noise(ds.data, spec, rng);
    written = std::move(noisy.data);
    summary["noise_level"] = noisy.level;
    summary["flipped"] = noisy.flipped;
  }

  const fs::path dir(g.out_dir);
  const io::EventFormat format = f.format == "jsonl" ? io::EventFormat::Jsonl : io::EventFormat::Csv;
  const fs::path events = dir / (format == io::EventFormat::Jsonl ? "events.jsonl" : "events.csv");
  io::save_events(events, written, format);

  io::ModelFile truth;
  truth.phenotypes = ds.phenotypes;
  truth.hyperparameters.rank = cfg.rank;
  truth.hyperparameters.window = cfg.window;
  truth.provenance.seed = cfg.seed;
  truth.provenance.dataset_digest = io::dataset_digest(ds.data);
  io::save_model(dir / "truth_model.json", truth);
  io::save_pathways(dir / "truth_pathways.json",
                    io::PathwayFile{ds.data.individual_ids, cfg.window, ds.pathways});

  summary["events_path"] = events.string();
  out << "generated " << ds.data.individuals() << " individuals, " << ds.data.features()
      << " features, " << written.count_ones() << " events -> " << events.string() << '\n';
  emit_json(g, out, summary);
  return kExitOk;
}

int cmd_train(const Globals& g, const TrainFlags& f, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  std::optional<io::ModelFile> truth;
  std::optional<std::vector<std::string>> features;
  if (!f.truth_model.empty()) {
    truth = io::load_model(f.truth_model);
    features = truth->phenotypes.feature_names;
  }
  const IrregularTensor x = io::load_events(f.data, load_options(f.durations, features));
  require_valid(x);

  TrainConfig cfg;
  cfg.hp = f.hp;
  cfg.check();
  Rng split_rng(mix_seed(cfg.hp.rng_seed, 0x73706c6974ULL));
  const Split parts = split(x, f.test_fraction, split_rng);

  const fs::path dir(g.out_dir);
  TrainedModel model;
  try {
    model = train(parts.train, cfg);
  } catch (const NonFiniteLossError& e) {
    io::save_model(dir / "model_last_finite.json",
                   io::make_model_file(e.last_finite(), x, parts.train));
    err << "last finite state written to " << (dir / "model_last_finite.json").string() << '\n';
    throw;
  }

  io::RunReport report;
  report.command = "train";
  report.hyperparameters = cfg.hp;
  report.test_fraction = f.test_fraction;
  report.train_individuals = parts.train.individuals();
  report.test_individuals = parts.test.individuals();
  report.dataset_digest = io::dataset_digest(x);
  report.loss_history = model.loss_history;
  report.fit_x_train =
      fit(parts.train.matrices, reconstruct_all(model.phenotypes, model.pathways));
  const PathwayCollection test_pathways = project(model, parts.test, cfg);
  report.fit_x_test = fit(parts.test.matrices, reconstruct_all(model.phenotypes, test_pathways));

  if (truth) {
    const AlignedFit aligned = fit_p(truth->phenotypes, model.phenotypes);
    report.fit_p = aligned.fit;
    if (!f.truth_pathways.empty()) {
      const io::PathwayFile truth_w = io::load_pathways(f.truth_pathways);
      if (auto matched = pathways_for(truth_w, parts.train.individual_ids)) {
        report.fit_w = fit_w(truth->phenotypes, *matched, model.phenotypes, model.pathways);
      }
    }
  }

  io::save_model(dir / "model.json", io::make_model_file(model, x, parts.train));
  io::save_pathways(dir / "train_pathways.json",
                    io::PathwayFile{parts.train.individual_ids, cfg.hp.window, model.pathways});
  io::save_pathways(dir / "test_pathways.json",
                    io::PathwayFile{parts.test.individual_ids, cfg.hp.window, test_pathways});
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  io::write_text(dir / "report.json", io::to_json(report) + "\n");
  if (!f.report_csv.empty()) io::append_report_csv(f.report_csv, report);

  out << "trained R=" << cfg.hp.rank << " w=" << cfg.hp.window << " on "
      << parts.train.individuals() << " individuals (" << parts.test.individuals()
      << " held out)\n"
      << "  FIT_X train " << fixed(*report.fit_x_train) << "  test " << fixed(*report.fit_x_test);
  if (report.fit_p) out << "  FIT_P " << fixed(*report.fit_p);
  if (report.fit_w) out << "  FIT_W " << fixed(*report.fit_w);
  out << "\n  final loss " << fixed(model.loss_history.back().loss.total, 3) << "  ("
      << fixed(report.wall_seconds, 2) << " s)\n";
  if (g.json_output) out << io::to_json(report) << '\n';
  return kExitOk;
}

struct Projected {
  io::ModelFile model;
  IrregularTensor data;
  PathwayCollection pathways;
  TrainConfig config;
};

Projected run_projection(const ProjectFlags& f) {
  Projected p;
  p.model = io::load_model(f.model);
  p.data = io::load_events(f.data, load_options(f.durations, p.model.phenotypes.feature_names));
  require_valid(p.data);
  p.config.hp = p.model.hyperparameters;
  if (f.epochs) p.config.hp.epochs = *f.epochs;
  if (f.learning_rate) p.config.hp.learning_rate = *f.learning_rate;
  if (f.beta) p.config.hp.nonsuccession_weight = *f.beta;
  if (f.seed) p.config.hp.rng_seed = *f.seed;
  Rng rng(mix_seed(p.config.hp.rng_seed, 0x70726f6aULL));
  p.pathways = project(p.model.phenotypes, p.data, p.config, rng);
  return p;
}

void add_projection_flags(CLI::App* cmd, ProjectFlags& f) {
  cmd->add_option("--model", f.model, "Model file")->required();
  cmd->add_option("--data", f.data, "Events file (.csv or .jsonl)")->required();
  cmd->add_option("--durations", f.durations, "Durations sidecar for CSV events");
  cmd->add_option("--epochs", f.epochs, "Projection epochs (default: model's)");
  cmd->add_option("--lr", f.learning_rate, "Projection learning rate (default: model's)");
  cmd->add_option("--beta", f.beta, "Non-succession weight (default: model's)");
  cmd->add_option("--seed", f.seed, "Seed for the pathway initialization");
}

int cmd_project(const Globals& g, const ProjectFlags& f, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  Projected p = run_projection(f);
  const double fit_x = fit(p.data.matrices, reconstruct_all(p.model.phenotypes, p.pathways));
  const std::string digest = io::dataset_digest(p.data);
  const bool known = digest == p.model.provenance.dataset_digest ||
                     digest == p.model.provenance.train_digest;

  const fs::path dir(g.out_dir);
  io::save_pathways(dir / "pathways.json",
                    io::PathwayFile{p.data.individual_ids, p.model.phenotypes.window(), p.pathways});
  io::RunReport report;
  report.command = "project";
  report.fit_x_test = fit_x;
  report.hyperparameters = p.config.hp;
  report.test_individuals = p.data.individuals();
  report.dataset_digest = digest;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  io::write_text(dir / "project_report.json", io::to_json(report) + "\n");

  if (known) {
    err << "note: dataset digest matches the model's training data\n";
  }
  out << "projected " << p.data.individuals() << " individuals  FIT_X " << fixed(fit_x) << '\n';
  emit_json(g, out,
            {{"command", "project"},
             {"fit_x", fit_x},
             {"dataset_digest", digest},
             {"matches_training_data", known},
             {"pathways", (dir / "pathways.json").string()}});
  return kExitOk;
}

int cmd_evaluate(const Globals& g, const EvaluateFlags& f, std::ostream& out) {
  io::ModelFile model = io::load_model(f.project.model);
  IrregularTensor data;
  PathwayCollection learned;
  if (!f.pathways.empty()) {
    data = io::load_events(f.project.data,
                           load_options(f.project.durations, model.phenotypes.feature_names));
    require_valid(data);
    const io::PathwayFile file = io::load_pathways(f.pathways);
    auto matched = pathways_for(file, data.individual_ids);
    if (!matched) {
      throw Error(ErrorCode::ShapeMismatch, "pathway file does not cover every individual");
    }
    learned = std::move(*matched);
  } else {
    Projected p = run_projection(f.project);
    data = std::move(p.data);
    learned = std::move(p.pathways);
  }

  FitReport report = fit_report(data.matrices, reconstruct_all(model.phenotypes, learned));
  if (!f.truth_model.empty()) {
    const io::ModelFile truth = io::load_model(f.truth_model);
    const AlignedFit aligned = fit_p(truth.phenotypes, model.phenotypes);
    report.fit_p = aligned.fit;
    report.matching = aligned.assignment;
    if (!f.truth_pathways.empty()) {
      const io::PathwayFile truth_w = io::load_pathways(f.truth_pathways);
      if (auto matched = pathways_for(truth_w, data.individual_ids)) {
        report.fit_w = fit_w(truth.phenotypes, *matched, model.phenotypes, learned);
      }
    }
  }

  json j = {{"command", "evaluate"}, {"fit_x", report.fit_x}};
  j["fit_p"] = report.fit_p ? json(*report.fit_p) : json(nullptr);
  j["fit_w"] = report.fit_w ? json(*report.fit_w) : json(nullptr);
  j["matching"] = report.matching ? json(*report.matching) : json(nullptr);
  json per = json::array();
  for (std::size_t k = 0; k < report.per_individual_frobenius.size(); ++k) {
    per.push_back({{"individual_id", data.individual_ids.at(k)},
                   {"error", report.per_individual_frobenius[k].error},
                   {"norm", report.per_individual_frobenius[k].norm}});
  }
  j["per_individual_frobenius"] = std::move(per);
  io::write_text(fs::path(g.out_dir) / "evaluation.json", j.dump(2) + "\n");

  out << "FIT_X " << fixed(report.fit_x);
  if (report.fit_p) out << "  FIT_P " << fixed(*report.fit_p);
  if (report.fit_w) out << "  FIT_W " << fixed(*report.fit_w);
  out << '\n';
  emit_json(g, out, j);
  return kExitOk;
}

int cmd_compare(const Globals& g, const CompareFlags& f, std::ostream& out) {
  if (f.models.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "compare needs at least two model files");
  }
  std::vector<io::ModelFile> models;
  for (const auto& path : f.models) models.push_back(io::load_model(path));

  const std::size_t count = models.size();
  std::vector<std::vector<double>> similarity(count, std::vector<double>(count, 1.0));
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      const double s = match_phenotypes(models[a].phenotypes, models[b].phenotypes).similarity;
      similarity[a][b] = s;
      similarity[b][a] = s;
    }
  }
  json j = {{"command", "compare"}, {"models", f.models}, {"similarity", similarity}};
  json diversities = json::array();
  out << "similarity\n";
  for (std::size_t a = 0; a < count; ++a) {
    out << "  [" << a << "]";
    for (std::size_t b = 0; b < count; ++b) out << ' ' << fixed(similarity[a][b]);
    out << "  " << f.models[a] << '\n';
  }
  out << "diversity\n";
  for (std::size_t a = 0; a < count; ++a) {
    if (models[a].phenotypes.rank() >= 2) {
      const double d = diversity(models[a].phenotypes);
      diversities.push_back(d);
      out << "  [" << a << "] " << fixed(d) << '\n';
    } else {
      diversities.push_back(nullptr);
      out << "  [" << a << "] n/a (rank 1)\n";
    }
  }
  j["diversity"] = std::move(diversities);
  io::write_text(fs::path(g.out_dir) / "compare.json", j.dump(2) + "\n");
  emit_json(g, out, j);
  return kExitOk;
}

int cmd_inspect(const Globals& g, const InspectFlags& f, std::ostream& out) {
  const io::ModelFile model = io::load_model(f.model);
  const auto& names = model.phenotypes.feature_names;
  json files = json::array();
  for (std::size_t r = 0; r < model.phenotypes.rank(); ++r) {
    const std::string title = "phenotype " + std::to_string(r);
    out << io::render_text(model.phenotypes[r], names, title) << '\n';
    if (!f.no_svg) {
      const fs::path svg = fs::path(g.out_dir) / ("phenotype_" + std::to_string(r) + ".svg");
      io::write_text(svg, io::render_svg(model.phenotypes[r], names, title));
      files.push_back(svg.string());
    }
  }
  emit_json(g, out, {{"command", "inspect"}, {"rank", model.phenotypes.rank()}, {"svg", files}});
  return kExitOk;
}

void report_error(const Globals& g, std::ostream& err, const std::string& code,
                  const std::string& message, int exit_code) {
  if (g.json_output) {
    err << json{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump()
        << '\n';
  } else {
    err << "error: " << message << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal phenotype discovery by sliding-window tensor decomposition", "tempheno"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json_output, "Machine-readable JSON output and errors");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.set_config("--config", "", "TOML or JSON file with per-command sections, e.g. [train]");
  if (auto cfg = config_argument(args); cfg && fs::path(*cfg).extension() == ".json") {
    app.config_formatter(std::make_shared<JsonConfig>());
  }

  GenerateFlags gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic dataset with planted phenotypes");
  generate_cmd->add_option("-K,--individuals", gen.gen.individuals)->capture_default_str();
  generate_cmd->add_option("-n,--features", gen.gen.features)->capture_default_str();
  generate_cmd->add_option("-R,--rank", gen.gen.rank)->capture_default_str();
  generate_cmd->add_option("-w,--window", gen.gen.window)->capture_default_str();
  generate_cmd->add_option("-T,--duration", gen.gen.duration, "Duration (minimum when --duration-max is set)")
      ->capture_default_str();
  generate_cmd->add_option("--duration-max", gen.duration_max, "Draw durations uniformly up to this value");
  generate_cmd->add_option("--occurrence-p", gen.gen.occurrence_p)->capture_default_str();
  generate_cmd->add_option("--density", gen.gen.feature_density, "Probability a phenotype cell is 1")
      ->capture_default_str();
  generate_cmd->add_option("--repeated", gen.gen.repeated,
                           "Phenotypes made of one feature repeated over the window")
      ->capture_default_str();
  generate_cmd->add_option("--seed", gen.gen.seed)->capture_default_str();
  generate_cmd->add_option("--format", gen.format)->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  generate_cmd->add_option("--noise", gen.noise, "additive or destructive")
      ->check(CLI::IsMember({"additive", "destructive"}));
  generate_cmd->add_option("--lambda", gen.lambda, "Mean added events per individual");
  generate_cmd->add_option("--p", gen.deletion_p, "Per-event deletion probability");

  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Split, train, project the held-out part and report");
  train_cmd->add_option("--data", train_flags.data, "Events file (.csv or .jsonl)")->required();
  train_cmd->add_option("--durations", train_flags.durations, "Durations sidecar for CSV events");
  add_hyperparameter_flags(train_cmd, train_flags.hp);
  train_cmd->add_option("--test-fraction", train_flags.test_fraction)->capture_default_str();
  train_cmd->add_option("--truth", train_flags.truth_model, "Planted phenotypes, for FIT_P");
  train_cmd->add_option("--truth-pathways", train_flags.truth_pathways, "Planted pathways, for FIT_W");
  train_cmd->add_option("--report-csv", train_flags.report_csv, "Append a summary row to this CSV");

  ProjectFlags project_flags;
  auto* project_cmd = app.add_subcommand("project", "Fit pathways for a dataset with frozen phenotypes");
  add_projection_flags(project_cmd, project_flags);

  EvaluateFlags evaluate_flags;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "FIT_X, and FIT_P/FIT_W against planted truth");
  add_projection_flags(evaluate_cmd, evaluate_flags.project);
  evaluate_cmd->add_option("--pathways", evaluate_flags.pathways, "Use these pathways instead of projecting");
  evaluate_cmd->add_option("--truth-model", evaluate_flags.truth_model);
  evaluate_cmd->add_option("--truth-pathways", evaluate_flags.truth_pathways);

  CompareFlags compare_flags;
  auto* compare_cmd = app.add_subcommand("compare", "Matched similarity and diversity across models");
  compare_cmd->add_option("models", compare_flags.models, "Model files")->required()->expected(2, -1);

  InspectFlags inspect_flags;
  auto* inspect_cmd = app.add_subcommand("inspect", "Render phenotypes as text grids and SVG heatmaps");
  inspect_cmd->add_option("--model", inspect_flags.model)->required();
  inspect_cmd->add_flag("--no-svg", inspect_flags.no_svg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(g, err, "UsageError", e.what(), kExitValidation);
    return kExitValidation;
  }
  try {
    if (*generate_cmd) return cmd_generate(g, gen, out);
    if (*train_cmd) return cmd_train(g, train_flags, out, err);
    if (*project_cmd) return cmd_project(g, project_flags, out, err);
    if (*evaluate_cmd) return cmd_evaluate(g, evaluate_flags, out);
    if (*compare_cmd) return cmd_compare(g, compare_flags, out);
    if (*inspect_cmd) return cmd_inspect(g, inspect_flags, out);
  } catch (const Error& e) {
    const int code = is_numerical(e.code()) ? kExitDivergence : kExitValidation;
    report_error(g, err, std::string(to_string(e.code())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(g, err, "InternalError", e.what(), kExitFailure);
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace tempheno::cli
