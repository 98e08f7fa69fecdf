#pragma once
// Wiring between a RunConfig and the library: building or loading the data,
// the initial model and the evaluation setup, and writing artifacts with a
// manifest of their hashes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "batforge/attack.hpp"
#include "batforge/config.hpp"
#include "batforge/data.hpp"
#include "batforge/eval.hpp"
#include "batforge/lexicon.hpp"
#include "batforge/model.hpp"

namespace batforge {

struct Experiment {
  TaskKind task = TaskKind::nli;
  Vocabulary vocab;
  SubstitutionTables tables;
  Dataset train;
  Dataset eval;
  std::optional<ToyOracle> oracle;
  std::size_t lexicon_warnings = 0;
};

// The toy task generated in memory. Synonym sets are rebuilt from the
// embeddings with cfg.lexicon, exactly as load_experiment would.
Experiment make_toy_experiment(const RunConfig& cfg);

// Loads vocabulary, lexicons and splits from cfg.paths. The dataset sidecar,
// when present, supplies the task and the oracle. `need_train` = false skips
// the training split.
Experiment load_experiment(const RunConfig& cfg, bool need_train = true);

ModelParams initial_model(const RunConfig& cfg, const Experiment& exp);

// Evaluates on exp.eval. `space` must outlive the returned setup.
EvalSetup make_eval_setup(const RunConfig& cfg, const Experiment& exp, const PerturbationSpace& space);

std::string fnv_hex(std::uint64_t h);
std::string file_hash(const std::filesystem::path& path);

// Collects the files a subcommand writes and produces manifest.json.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(std::string_view name) const { return root_ / name; }
  // Opens root/name for writing (creating parent directories) and registers
  // it; throws Error when the file cannot be created.
  std::ofstream open(std::string_view name);
  void add(std::string_view name);
  void write_json(std::string_view name, const nlohmann::json& j);
  // manifest.json: command and every registered file with size and hash.
  void finish(std::string_view command);

 private:
  std::filesystem::path root_;
  std::vector<std::string> names_;
};

// embeddings.txt, antonyms.tsv, pos.tsv, negation.tsv, train.tsv, eval.tsv
// and the dataset.json sidecar.
void write_toy_files(const RunConfig& cfg, const ToyWorld& world, ArtifactWriter& out);

nlohmann::json oracle_to_json(const ToyOracle& oracle);
ToyOracle oracle_from_json(const nlohmann::json& j);

}  // namespace batforge
