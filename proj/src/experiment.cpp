#include "batforge/experiment.hpp"

#include <algorithm>
#include <cstdio>

#include "batforge/error.hpp"
#include "batforge/rng.hpp"

namespace batforge {

using nlohmann::json;

namespace {

constexpr std::string_view kDatasetFormat = "batforge-dataset";

void build_synonyms(Experiment& exp, const LexiconConfig& lexicon) {
  exp.tables.synonyms = build_synonym_sets(exp.vocab, lexicon);
}

}  // namespace

Experiment make_toy_experiment(const RunConfig& cfg) {
  cfg.validate();
  ToyWorld world = generate_toy_dataset(cfg.toy_spec(), cfg.n_train, cfg.n_eval);
  Experiment exp;
  exp.task = world.spec.task;
  exp.vocab = std::move(world.vocab);
  exp.tables = std::move(world.tables);
  exp.train = std::move(world.train);
  exp.eval = std::move(world.eval);
  exp.oracle = std::move(world.oracle);
  build_synonyms(exp, cfg.lexicon);
  return exp;
}

json oracle_to_json(const ToyOracle& oracle) {
  return json{{"cluster_of", oracle.clusters()}, {"partner", oracle.partner()}};
}

ToyOracle oracle_from_json(const json& j) {
  try {
    return ToyOracle(TaskKind::nli, j.at("cluster_of").get<std::vector<int>>(),
                     j.at("partner").get<std::vector<std::size_t>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed oracle: ") + e.what());
  }
}

Experiment load_experiment(const RunConfig& cfg, bool need_train) {
  cfg.lexicon.validate();
  Experiment exp;
  exp.task = cfg.task;

  std::optional<ToyOracle> oracle;
  if (const auto sidecar = optional_path(cfg, "paths.dataset")) {
    std::ifstream in(*sidecar);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("format", "") != kDatasetFormat) {
      throw ParseError("not a dataset sidecar: " + sidecar->string());
    }
    try {
      exp.task = parse_task(j.at("task").get<std::string>());
      if (j.contains("oracle")) {
        const ToyOracle raw = oracle_from_json(j.at("oracle"));
        oracle = ToyOracle(exp.task, raw.clusters(), raw.partner());
      }
    } catch (const json::exception& e) {
      throw ParseError("malformed dataset sidecar " + sidecar->string() + ": " + e.what());
    }
  }

  const auto embeddings = require_path(cfg, "paths.embeddings");
  const auto antonyms = require_path(cfg, "paths.antonyms");
  const auto pos = optional_path(cfg, "paths.pos");
  const auto negation = optional_path(cfg, "paths.negation");
  const auto eval_path = require_path(cfg, "paths.eval");
  std::optional<std::filesystem::path> train_path;
  if (need_train) train_path = require_path(cfg, "paths.train");

  exp.vocab = load_embedding_table(embeddings);
  build_synonyms(exp, cfg.lexicon);
  auto ant = load_antonym_lexicon(antonyms, exp.vocab);
  exp.tables.antonyms = std::move(ant.antonyms);
  exp.lexicon_warnings = ant.warnings;
  exp.tables.pos = pos ? load_pos_lexicon(*pos, exp.vocab)
                       : std::vector<std::string>(exp.vocab.size(), std::string(kWildcardTag));
  exp.tables.negations = negation ? load_negation_lexicon(*negation, exp.vocab) : WordSetTable(exp.vocab.size());
  if (train_path) exp.train = load_dataset_tsv(*train_path, exp.vocab, exp.task);
  exp.eval = load_dataset_tsv(eval_path, exp.vocab, exp.task);
  if (oracle) {
    if (oracle->clusters().size() != exp.vocab.size()) throw ParseError("oracle does not match the vocabulary");
    exp.oracle = std::move(oracle);
  }
  return exp;
}

ModelParams initial_model(const RunConfig& cfg, const Experiment& exp) {
  ModelParams p = init_model(exp.vocab, cfg.hidden_size, num_classes(exp.task), cfg.require_seed());
  p.train_embeddings = cfg.train_embeddings;
  return p;
}

EvalSetup make_eval_setup(const RunConfig& cfg, const Experiment& exp, const PerturbationSpace& space) {
  EvalSetup s;
  s.data = &exp.eval;
  s.space = &space;
  s.attack = cfg.attack_config();
  s.attack.task = exp.task;
  s.oracle = exp.oracle ? &*exp.oracle : nullptr;
  s.negation = cfg.negation_attack;
  s.asr_limit = cfg.asr_limit;
  s.probe_size = cfg.probe_size;
  s.seed = cfg.require_seed();
  return s;
}

std::string fnv_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return fnv_hex(h);
}

ArtifactWriter::ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error("cannot create output directory " + root_.string() + ": " + ec.message());
}

std::ofstream ArtifactWriter::open(std::string_view name) {
  const auto p = path(name);
  add(name);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

void ArtifactWriter::add(std::string_view name) {
  const auto p = path(name);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.emplace_back(name);
}

void ArtifactWriter::write_json(std::string_view name, const json& j) {
  auto out = open(name);
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path(name).string());
}

void ArtifactWriter::finish(std::string_view command) {
  auto names = names_;
  std::sort(names.begin(), names.end());
  json artifacts = json::array();
  for (const auto& n : names) {
    const auto p = path(n);
    artifacts.push_back(json{{"path", n},
                             {"bytes", static_cast<std::uint64_t>(std::filesystem::file_size(p))},
                             {"fnv1a64", file_hash(p)}});
  }
  json manifest = {{"command", std::string(command)}, {"artifacts", artifacts}};
  std::ofstream out(path("manifest.json"), std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + root_.string());
  out << manifest.dump(2) << '\n';
}

void write_toy_files(const RunConfig& cfg, const ToyWorld& world, ArtifactWriter& out) {
  {
    auto f = out.open("embeddings.txt");
    write_embedding_table(f, world.vocab);
  }
  {
    auto f = out.open("antonyms.tsv");
    write_antonym_lexicon(f, world.tables, world.vocab);
  }
  {
    auto f = out.open("pos.tsv");
    write_pos_lexicon(f, world.tables, world.vocab);
  }
  {
    auto f = out.open("negation.tsv");
    write_negation_lexicon(f, world.tables, world.vocab);
  }
  {
    auto f = out.open("train.tsv");
    write_dataset_tsv(f, world.train, world.vocab);
  }
  {
    auto f = out.open("eval.tsv");
    write_dataset_tsv(f, world.eval, world.vocab);
  }
  json spec = json::object();
  const json all = cfg.to_json();
  for (const auto& [key, value] : all.items()) {
    if (key.rfind("toy.", 0) == 0) spec[key] = value;
  }
  out.write_json("dataset.json", json{{"format", kDatasetFormat},
                                      {"version", 1},
                                      {"task", std::string(task_name(world.spec.task))},
                                      {"seed", world.spec.seed},
                                      {"spec", spec},
                                      {"n_train", world.train.size()},
                                      {"n_eval", world.eval.size()},
                                      {"oracle", oracle_to_json(world.oracle)}});
}

}  // namespace batforge
