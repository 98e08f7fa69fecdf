#pragma once
// Run configuration: a JSON object with flat dotted keys ("train.margin").
// Command-line flags are applied on top of the file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "batforge/attack.hpp"
#include "batforge/data.hpp"
#include "batforge/lexicon.hpp"
#include "batforge/training.hpp"

namespace batforge {

struct PathConfig {
  // When set, unset file paths default to well-known names inside it.
  std::string data_dir;
  std::string embeddings;
  std::string antonyms;
  std::string pos;
  std::string negation;
  std::string train;
  std::string eval;
  std::string dataset;  // sidecar JSON written by gen-data (task, oracle)
  std::string checkpoint;
  std::string out_dir;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  TaskKind task = TaskKind::nli;
  LexiconConfig lexicon;
  ToyTaskSpec toy;
  std::size_t n_train = 6000;
  std::size_t n_eval = 1500;
  std::size_t hidden_size = 8;
  bool train_embeddings = true;
  TrainConfig train;
  AttackConfig attack;
  bool negation_attack = false;
  std::size_t probe_size = 500;
  std::size_t asr_limit = 0;
  PathConfig paths;

  // Throws ConfigError naming the key on an unknown key or a bad value.
  void set(std::string_view key, const nlohmann::json& value);
  // "key=value"; the value is read as JSON when it parses, else as a string.
  void set_assignment(std::string_view assignment);
  void merge(const nlohmann::json& flat);

  // Every key with its effective value. Loading the result reproduces this
  // configuration.
  nlohmann::json to_json() const;

  // Throws ConfigError("missing required key: seed").
  std::uint64_t require_seed() const;
  // Cross-field checks; does not touch the filesystem.
  void validate() const;

  // Seeds and task copied into the nested configs.
  ToyTaskSpec toy_spec() const;
  TrainConfig train_config() const;
  AttackConfig attack_config() const;
};

std::vector<std::string> config_keys();

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& flat);

// Resolved file path for a `paths.*` key: the explicit value, else
// data_dir/<default name>. Throws ConfigError naming the key when neither is
// available or the file does not exist.
std::filesystem::path require_path(const RunConfig& cfg, std::string_view key);
// Same, but returns nullopt instead of throwing when the key is unset and the
// default file is absent.
std::optional<std::filesystem::path> optional_path(const RunConfig& cfg, std::string_view key);

}  // namespace batforge
