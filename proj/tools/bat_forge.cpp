// bat_forge: data generation, training, attacks, evaluation, sweeps and
// representation projection for the fickle/obstinate robustness toolkit.
//
// Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "batforge/attack.hpp"
#include "batforge/config.hpp"
#include "batforge/error.hpp"
#include "batforge/eval.hpp"
#include "batforge/experiment.hpp"
#include "batforge/model.hpp"
#include "batforge/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace batforge;

namespace {

struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string data_dir;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* data_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config with flat dotted keys");
    app->add_option("--set", sets, "Override one key, e.g. --set train.margin=0.5 (repeatable)");
    seed_opt = app->add_option("--seed", seed, "Run seed");
    out_opt = app->add_option("--out-dir", out_dir, "Output directory (paths.out_dir)");
    data_opt = app->add_option("--data-dir", data_dir, "Directory written by gen-data (paths.data_dir)");
  }
};

struct TrainFlags {
  std::string regime;
  double margin = 0, alpha = 0, beta = 0, lambda = 0, learning_rate = 0;
  std::size_t batch_size = 0, epochs = 0, eval_every = 0;
  std::vector<std::pair<CLI::Option*, std::string>> opts;

  void attach(CLI::App* app) {
    opts.emplace_back(app->add_option("--regime", regime, "normal | smooth | bat_pair | bat_triplet"), "train.regime");
    opts.emplace_back(app->add_option("--margin", margin, "Contrastive margin m"), "train.margin");
    opts.emplace_back(app->add_option("--alpha", alpha, "Pairwise fickle weight"), "train.alpha");
    opts.emplace_back(app->add_option("--beta", beta, "Pairwise obstinate weight"), "train.beta");
    opts.emplace_back(app->add_option("--lambda", lambda, "Triplet weight"), "train.lambda");
    opts.emplace_back(app->add_option("--learning-rate", learning_rate, "SGD step size"), "train.learning_rate");
    opts.emplace_back(app->add_option("--batch-size", batch_size, "Mini-batch size"), "train.batch_size");
    opts.emplace_back(app->add_option("--epochs", epochs, "Training epochs"), "train.epochs");
    opts.emplace_back(app->add_option("--eval-every", eval_every, "Epochs between evaluations (0: final only)"),
                      "train.eval_every");
  }

  void apply(RunConfig& cfg) const {
    for (const auto& [opt, key] : opts) {
      if (opt->count() == 0) continue;
      if (key == "train.regime") {
        cfg.set(key, regime);
      } else if (key == "train.margin") {
        cfg.set(key, margin);
      } else if (key == "train.alpha") {
        cfg.set(key, alpha);
      } else if (key == "train.beta") {
        cfg.set(key, beta);
      } else if (key == "train.lambda") {
        cfg.set(key, lambda);
      } else if (key == "train.learning_rate") {
        cfg.set(key, learning_rate);
      } else if (key == "train.batch_size") {
        cfg.set(key, batch_size);
      } else if (key == "train.epochs") {
        cfg.set(key, epochs);
      } else if (key == "train.eval_every") {
        cfg.set(key, eval_every);
      }
    }
  }
};

// Defaults, then the file, then --set, then dedicated flags.
RunConfig build_config(const CommonFlags& common, const TrainFlags* train) {
  RunConfig cfg = common.config.empty() ? RunConfig{} : load_run_config(common.config);
  for (const auto& s : common.sets) cfg.set_assignment(s);
  if (common.seed_opt->count()) cfg.seed = common.seed;
  if (common.out_opt->count()) cfg.paths.out_dir = common.out_dir;
  if (common.data_opt->count()) cfg.paths.data_dir = common.data_dir;
  if (train) train->apply(cfg);
  return cfg;
}

fs::path require_out_dir(const RunConfig& cfg) {
  if (cfg.paths.out_dir.empty()) throw ConfigError("missing required path: paths.out_dir (use --out-dir)");
  return cfg.paths.out_dir;
}

// The output directory is left out so that runs written to different places
// produce identical files.
json effective_config(const RunConfig& cfg) {
  json j = cfg.to_json();
  j.erase("paths.out_dir");
  return j;
}

json asr_json(const AsrSummary& s) {
  json j = {{"eligible", s.eligible}, {"successes", s.successes}};
  j["asr"] = s.eligible > 0 ? json(s.asr) : json(nullptr);
  return j;
}

void print_record(const MetricsRecord& r) {
  std::ostringstream os;
  write_metrics_row(os, r);
  std::cout << os.str();
}

int cmd_gen_data(const RunConfig& cfg) {
  cfg.validate();
  const fs::path out_dir = require_out_dir(cfg);
  const ToyWorld world = generate_toy_dataset(cfg.toy_spec(), cfg.n_train, cfg.n_eval);
  ArtifactWriter out(out_dir);
  write_toy_files(cfg, world, out);
  out.write_json("effective_config.json", effective_config(cfg));
  out.finish("gen-data");
  std::cout << "wrote " << world.train.size() << " train and " << world.eval.size() << " eval examples to "
            << out_dir.string() << '\n';
  return 0;
}

int cmd_train(const RunConfig& cfg, bool save_epochs) {
  cfg.validate();
  const fs::path out_dir = require_out_dir(cfg);
  const Experiment exp = load_experiment(cfg);
  const PerturbationSpace space(exp.vocab, exp.tables, cfg.attack.pos_constraint);
  const EvalSetup setup = make_eval_setup(cfg, exp, space);
  ArtifactWriter out(out_dir);
  auto metrics = out.open("metrics.csv");
  write_metrics_header(metrics);
  const auto on_epoch = [&](std::size_t epoch, const ModelParams& params, const MetricsRecord* record) {
    if (record) {
      write_metrics_row(metrics, *record);
      metrics.flush();
      print_record(*record);
    }
    if (save_epochs) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoints/epoch_%03zu.ckpt", epoch);
      out.add(name);
      save_checkpoint(params, out.path(name));
    }
  };
  const TrainResult result = train(cfg.train_config(), exp.train, initial_model(cfg, exp), exp.tables, &setup, on_epoch);
  metrics.close();
  out.add("model.ckpt");
  save_checkpoint(result.params, out.path("model.ckpt"));
  out.write_json("effective_config.json", effective_config(cfg));
  out.finish("train");
  return 0;
}

std::vector<AttackKind> attack_kinds(const RunConfig& cfg, const std::vector<std::string>& names) {
  std::vector<AttackKind> kinds;
  if (names.empty()) {
    kinds = {AttackKind::synonym, AttackKind::antonym};
    if (cfg.negation_attack) kinds.push_back(AttackKind::negation);
    return kinds;
  }
  for (const auto& n : names) {
    try {
      const AttackKind k = parse_attack(n);
      if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    } catch (const std::exception&) {
      throw ConfigError("--attack: unknown attack '" + n + "' (expected synonym, antonym or negation)");
    }
  }
  return kinds;
}

Dataset limited(const Dataset& data, std::size_t limit) {
  Dataset d;
  d.task = data.task;
  const std::size_t n = limit == 0 ? data.size() : std::min(limit, data.size());
  d.examples.assign(data.examples.begin(), data.examples.begin() + static_cast<std::ptrdiff_t>(n));
  return d;
}

int cmd_attack(const RunConfig& cfg, const std::vector<std::string>& names) {
  cfg.validate();
  const fs::path out_dir = require_out_dir(cfg);
  const auto kinds = attack_kinds(cfg, names);
  const Experiment exp = load_experiment(cfg, false);
  const ModelParams params = load_checkpoint(require_path(cfg, "paths.checkpoint"));
  check_compatible(params, exp.vocab, num_classes(exp.task));
  const PerturbationSpace space(exp.vocab, exp.tables, cfg.attack.pos_constraint);
  AttackConfig acfg = cfg.attack_config();
  acfg.task = exp.task;
  if (acfg.oracle_check && !exp.oracle) throw ConfigError("attack.oracle_check needs a dataset sidecar with an oracle");
  const Dataset data = limited(exp.eval, cfg.asr_limit);
  const ModelClassifier model(params);

  ArtifactWriter out(out_dir);
  json summary = json::object();
  for (AttackKind kind : kinds) {
    const AsrResult res = attack_success_rate(model, data, kind, acfg, space, exp.oracle ? &*exp.oracle : nullptr);
    const std::string name(attack_name(kind));
    {
      auto f = out.open("attacks_" + name + ".ndjson");
      write_attack_log(f, res.outcomes);
    }
    json entry = {{"attempted", res.attempted}, {"eligible", res.eligible}, {"successes", res.successes}};
    entry["asr"] = res.defined() ? json(res.asr()) : json(nullptr);
    summary[name] = entry;
    std::cout << name << ": " << res.successes << "/" << res.eligible << " eligible";
    if (res.defined()) std::cout << " (asr " << res.asr() << ")";
    std::cout << '\n';
  }
  out.write_json("attack_summary.json", summary);
  out.write_json("effective_config.json", effective_config(cfg));
  out.finish("attack");
  return 0;
}

std::size_t epoch_from_name(const fs::path& p, std::size_t fallback) {
  static const std::regex re("epoch_0*([0-9]+)");
  std::smatch m;
  const std::string stem = p.stem().string();
  if (std::regex_search(stem, m, re)) return static_cast<std::size_t>(std::stoull(m[1].str()));
  return fallback;
}

int cmd_eval(const RunConfig& cfg, const std::vector<std::string>& checkpoint_paths, const std::string& regime_label) {
  cfg.validate();
  const fs::path out_dir = require_out_dir(cfg);
  std::vector<fs::path> paths;
  if (checkpoint_paths.empty()) {
    paths.push_back(require_path(cfg, "paths.checkpoint"));
  } else {
    for (const auto& p : checkpoint_paths) {
      if (!fs::exists(p)) throw ConfigError("--checkpoint: file not found: " + p);
      paths.emplace_back(p);
    }
  }
  const Experiment exp = load_experiment(cfg, false);
  const PerturbationSpace space(exp.vocab, exp.tables, cfg.attack.pos_constraint);
  const EvalSetup setup = make_eval_setup(cfg, exp, space);
  std::vector<EpochCheckpoint> checkpoints;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    checkpoints.push_back({epoch_from_name(paths[i], i + 1), load_checkpoint(paths[i])});
  }
  const std::string regime = regime_label.empty() ? std::string(regime_name(cfg.train.regime)) : regime_label;
  const auto records = tradeoff_curve(checkpoints, setup, regime);

  ArtifactWriter out(out_dir);
  {
    auto f = out.open("metrics.csv");
    write_metrics_header(f);
    for (const auto& r : records) write_metrics_row(f, r);
  }
  json details = json::array();
  for (const auto& r : records) {
    details.push_back({{"epoch", r.epoch},
                       {"accuracy", r.accuracy},
                       {"synonym", asr_json(r.synonym)},
                       {"antonym", asr_json(r.antonym)},
                       {"negation", r.negation.evaluated ? asr_json(r.negation) : json(nullptr)},
                       {"mean_d_f", r.mean_d_f},
                       {"mean_d_o", r.mean_d_o},
                       {"probe_size", r.probe_size}});
    print_record(r);
  }
  out.write_json("eval_details.json", details);
  out.write_json("effective_config.json", effective_config(cfg));
  out.finish("eval");
  return 0;
}

const std::map<std::string, std::string>& sweep_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"alpha", "train.alpha"},   {"beta", "train.beta"},           {"lambda", "train.lambda"},
      {"margin", "train.margin"}, {"batch_size", "train.batch_size"}, {"regime", "train.regime"},
      {"seed", "seed"},
  };
  return aliases;
}

struct Grid {
  std::vector<std::string> keys;  // canonical dotted keys, sorted
  std::vector<std::vector<json>> values;
};

Grid parse_grid(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--grid: cannot open " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("--grid: expected a JSON object of key -> list");
  std::map<std::string, std::vector<json>> axes;
  std::set<std::string> allowed;
  for (const auto& [alias, key] : sweep_aliases()) allowed.insert(key);
  for (const auto& [name, list] : j.items()) {
    std::string key = name;
    if (const auto a = sweep_aliases().find(name); a != sweep_aliases().end()) key = a->second;
    if (!allowed.contains(key)) {
      throw ConfigError("--grid: key '" + name + "' is not sweepable (alpha, beta, lambda, margin, batch_size, regime, seed)");
    }
    if (axes.contains(key)) throw ConfigError("--grid: key '" + name + "' given twice");
    if (!list.is_array() || list.empty()) throw ConfigError("--grid: '" + name + "' needs a nonempty list");
    axes[key] = std::vector<json>(list.begin(), list.end());
  }
  if (axes.empty()) throw ConfigError("--grid: empty grid");
  Grid g;
  for (auto& [key, vals] : axes) {
    g.keys.push_back(key);
    g.values.push_back(std::move(vals));
  }
  return g;
}

std::string csv_cell(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

int cmd_sweep(const RunConfig& base, const std::string& grid_path, bool resume) {
  base.validate();
  const fs::path out_dir = require_out_dir(base);
  const Grid grid = parse_grid(grid_path);

  // Expand and validate every cell before running any of them.
  std::size_t total = 1;
  for (const auto& v : grid.values) total *= v.size();
  std::vector<json> cells;
  for (std::size_t c = 0; c < total; ++c) {
    json overrides = json::object();
    std::size_t rest = c;
    for (std::size_t k = grid.keys.size(); k-- > 0;) {
      overrides[grid.keys[k]] = grid.values[k][rest % grid.values[k].size()];
      rest /= grid.values[k].size();
    }
    RunConfig probe = base;
    probe.merge(overrides);
    probe.validate();
    cells.push_back(std::move(overrides));
  }

  std::string header = "cell";
  for (const auto& k : grid.keys) header += "," + k;
  header += ",epoch,regime,accuracy,synonym_asr,antonym_asr,negation_asr,mean_d_f,mean_d_o";

  ArtifactWriter out(out_dir);
  const fs::path csv_path = out.path("sweep.csv");
  // Cell keys only cover the grid values, so a resumed sweep must also share
  // the base configuration.
  const json base_json = effective_config(base);
  const fs::path base_path = out.path("sweep_base.json");
  std::set<std::string> done;
  if (resume && fs::exists(csv_path)) {
    std::ifstream bin(base_path);
    const json previous = json::parse(bin, nullptr, false);
    if (previous != base_json) {
      throw ConfigError("sweep in " + out_dir.string() + " was run with a different base config; use another --out-dir");
    }
    std::ifstream in(csv_path);
    std::string line;
    std::getline(in, line);
    if (line != header) {
      throw ConfigError("sweep.csv in " + out_dir.string() + " was written for a different grid; use another --out-dir");
    }
    while (std::getline(in, line)) {
      if (!line.empty()) done.insert(line.substr(0, line.find(',')));
    }
  }
  std::ofstream csv;
  if (done.empty()) {
    csv.open(csv_path, std::ios::binary | std::ios::trunc);
    csv << header << '\n';
  } else {
    csv.open(csv_path, std::ios::binary | std::ios::app);
  }
  if (!csv) throw Error("cannot write " + csv_path.string());
  csv.flush();
  out.add("sweep.csv");
  out.write_json("sweep_base.json", base_json);

  const Experiment exp = load_experiment(base);
  const PerturbationSpace space(exp.vocab, exp.tables, base.attack.pos_constraint);
  std::size_t ran = 0;
  for (const auto& overrides : cells) {
    const std::string key = fnv_hex(fnv1a64(overrides.dump()));
    if (done.contains(key)) continue;
    RunConfig cfg = base;
    cfg.merge(overrides);
    cfg.train.eval_every = 0;
    const EvalSetup setup = make_eval_setup(cfg, exp, space);
    const TrainResult result = train(cfg.train_config(), exp.train, initial_model(cfg, exp), exp.tables, &setup);
    std::ostringstream row;
    write_metrics_row(row, result.metrics.back());
    csv << key;
    for (const auto& k : grid.keys) csv << ',' << csv_cell(overrides[k]);
    csv << ',' << row.str();
    csv.flush();
    ++ran;
    std::cout << "cell " << key << " " << overrides.dump() << ": " << row.str();
  }
  csv.close();
  std::cout << ran << " cells run, " << (cells.size() - ran) << " already complete\n";
  {
    std::ifstream in(grid_path, std::ios::binary);
    auto f = out.open("grid.json");
    f << in.rdbuf();
  }
  out.write_json("effective_config.json", effective_config(base));
  out.finish("sweep");
  return 0;
}

int cmd_project(const RunConfig& cfg) {
  cfg.validate();
  const fs::path out_dir = require_out_dir(cfg);
  const Experiment exp = load_experiment(cfg, false);
  const ModelParams params = load_checkpoint(require_path(cfg, "paths.checkpoint"));
  check_compatible(params, exp.vocab, num_classes(exp.task));
  const auto sample = select_probe_sample(exp.eval, cfg.probe_size, cfg.require_seed());
  Rng rng = make_rng(cfg.require_seed(), "probe-perturb");
  const auto rows = export_representations(params, sample, exp.tables, rng);
  const auto projection = pca_project(rows);
  const auto dist = representation_distances(rows);

  ArtifactWriter out(out_dir);
  {
    auto f = out.open("projection.csv");
    write_projection_csv(f, projection);
  }
  out.write_json("projection_summary.json", {{"rows", rows.size()},
                                             {"probe_size", sample.size()},
                                             {"rank_deficient", projection.rank_deficient},
                                             {"variance", {projection.variance[0], projection.variance[1]}},
                                             {"mean_d_f", dist.mean_d_f},
                                             {"mean_d_o", dist.mean_d_o},
                                             {"gap", dist.gap()}});
  out.write_json("effective_config.json", effective_config(cfg));
  out.finish("project");
  std::cout << rows.size() << " rows projected; gap " << dist.gap() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bat_forge: fickle/obstinate adversarial robustness experiments on sentence-pair tasks"};
  app.require_subcommand(1);

  CommonFlags gen_common, train_common, attack_common, eval_common, sweep_common, project_common;
  TrainFlags train_flags, sweep_flags;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic oracle-labeled task");
  gen_common.attach(gen);

  auto* tr = app.add_subcommand("train", "Train one model and record per-epoch metrics");
  train_common.attach(tr);
  train_flags.attach(tr);
  bool save_epochs = false;
  tr->add_flag("--save-epochs", save_epochs, "Keep a checkpoint per epoch under checkpoints/");

  auto* at = app.add_subcommand("attack", "Attack a checkpoint and log every outcome as NDJSON");
  attack_common.attach(at);
  std::string attack_checkpoint;
  auto* at_ckpt = at->add_option("--checkpoint", attack_checkpoint, "Model checkpoint (paths.checkpoint)");
  std::vector<std::string> attack_names;
  at->add_option("--attack", attack_names, "synonym, antonym, negation (repeatable)");

  auto* ev = app.add_subcommand("eval", "Accuracy, ASRs and distances for one or more checkpoints");
  eval_common.attach(ev);
  std::vector<std::string> eval_checkpoints;
  ev->add_option("--checkpoint", eval_checkpoints, "Checkpoint(s); epoch_N in the name sets the epoch column");
  std::string eval_regime;
  ev->add_option("--regime", eval_regime, "Label for the regime column");

  auto* sw = app.add_subcommand("sweep", "Train every cell of a hyperparameter grid");
  sweep_common.attach(sw);
  sweep_flags.attach(sw);
  std::string grid_path;
  sw->add_option("--grid", grid_path, "JSON object: key -> list of values")->required();
  bool no_resume = false;
  sw->add_flag("--no-resume", no_resume, "Discard cells already present in sweep.csv");

  auto* pr = app.add_subcommand("project", "Project original/fickle/obstinate representations to 2D");
  project_common.attach(pr);
  std::string project_checkpoint;
  auto* pr_ckpt = pr->add_option("--checkpoint", project_checkpoint, "Model checkpoint (paths.checkpoint)");
  std::size_t probe_size = 0;
  auto* pr_probe = pr->add_option("--probe-size", probe_size, "Examples in the probe sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << '\n' << app.help();
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(build_config(gen_common, nullptr));
    if (tr->parsed()) return cmd_train(build_config(train_common, &train_flags), save_epochs);
    if (at->parsed()) {
      RunConfig cfg = build_config(attack_common, nullptr);
      if (at_ckpt->count()) cfg.paths.checkpoint = attack_checkpoint;
      return cmd_attack(cfg, attack_names);
    }
    if (ev->parsed()) return cmd_eval(build_config(eval_common, nullptr), eval_checkpoints, eval_regime);
    if (sw->parsed()) return cmd_sweep(build_config(sweep_common, &sweep_flags), grid_path, !no_resume);
    if (pr->parsed()) {
      RunConfig cfg = build_config(project_common, nullptr);
      if (pr_ckpt->count()) cfg.paths.checkpoint = project_checkpoint;
      if (pr_probe->count()) cfg.probe_size = probe_size;
      return cmd_project(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
