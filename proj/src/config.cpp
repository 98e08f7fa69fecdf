#include "batforge/config.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include "batforge/error.hpp"

namespace batforge {

using nlohmann::json;

namespace {

std::string key_error(std::string_view key, std::string_view what) {
  return std::string(key) + ": " + std::string(what);
}

std::uint64_t as_uint(std::string_view key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(key_error(key, "must be non-negative"));
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(key_error(key, "expected a non-negative integer"));
}

std::size_t as_size(std::string_view key, const json& v) { return static_cast<std::size_t>(as_uint(key, v)); }

double as_double(std::string_view key, const json& v) {
  if (!v.is_number()) throw ConfigError(key_error(key, "expected a number"));
  return v.get<double>();
}

bool as_bool(std::string_view key, const json& v) {
  if (!v.is_boolean()) throw ConfigError(key_error(key, "expected true or false"));
  return v.get<bool>();
}

std::string as_string(std::string_view key, const json& v) {
  if (!v.is_string()) throw ConfigError(key_error(key, "expected a string"));
  return v.get<std::string>();
}

struct Field {
  std::function<void(RunConfig&, std::string_view, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

#define BF_SIZE(member) \
  Field { [](RunConfig& c, std::string_view k, const json& v) { c.member = as_size(k, v); }, [](const RunConfig& c) { return json(c.member); } }
#define BF_DOUBLE(member) \
  Field { [](RunConfig& c, std::string_view k, const json& v) { c.member = as_double(k, v); }, [](const RunConfig& c) { return json(c.member); } }
#define BF_BOOL(member) \
  Field { [](RunConfig& c, std::string_view k, const json& v) { c.member = as_bool(k, v); }, [](const RunConfig& c) { return json(c.member); } }
#define BF_STRING(member) \
  Field { [](RunConfig& c, std::string_view k, const json& v) { c.member = as_string(k, v); }, [](const RunConfig& c) { return json(c.member); } }

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"seed",
       {[](RunConfig& c, std::string_view k, const json& v) { c.seed = as_uint(k, v); },
        [](const RunConfig& c) { return c.seed ? json(*c.seed) : json(nullptr); }}},
      {"task",
       {[](RunConfig& c, std::string_view k, const json& v) {
          const std::string name = as_string(k, v);
          try {
            c.task = parse_task(name);
          } catch (const ConfigError& e) {
            throw ConfigError(key_error(k, e.what()));
          }
        },
        [](const RunConfig& c) { return json(std::string(task_name(c.task))); }}},
      {"lexicon.k", BF_SIZE(lexicon.k)},
      {"lexicon.sim_threshold", BF_DOUBLE(lexicon.sim_threshold)},
      {"toy.n_clusters", BF_SIZE(toy.n_clusters)},
      {"toy.cluster_size", BF_SIZE(toy.cluster_size)},
      {"toy.antonym_pairing",
       {[](RunConfig& c, std::string_view k, const json& v) {
          if (!v.is_array()) throw ConfigError(key_error(k, "expected an array of cluster indices"));
          c.toy.antonym_pairing.clear();
          for (const auto& x : v) c.toy.antonym_pairing.push_back(as_size(k, x));
        },
        [](const RunConfig& c) { return json(c.toy.antonym_pairing); }}},
      {"toy.n_filler", BF_SIZE(toy.n_filler)},
      {"toy.sentence_len", BF_SIZE(toy.sentence_len)},
      {"toy.dim", BF_SIZE(toy.dim)},
      {"toy.partner_similarity", BF_DOUBLE(toy.partner_similarity)},
      {"toy.cluster_spread", BF_DOUBLE(toy.cluster_spread)},
      {"toy.key_skew", BF_DOUBLE(toy.key_skew)},
      {"toy.n_negation_pairs", BF_SIZE(toy.n_negation_pairs)},
      {"toy.label_cue", BF_DOUBLE(toy.label_cue)},
      {"toy.n_train", BF_SIZE(n_train)},
      {"toy.n_eval", BF_SIZE(n_eval)},
      {"model.hidden_size", BF_SIZE(hidden_size)},
      {"model.train_embeddings", BF_BOOL(train_embeddings)},
      {"train.regime",
       {[](RunConfig& c, std::string_view k, const json& v) {
          const std::string name = as_string(k, v);
          try {
            c.train.regime = parse_regime(name);
          } catch (const ConfigError& e) {
            throw ConfigError(key_error(k, e.what()));
          }
        },
        [](const RunConfig& c) { return json(std::string(regime_name(c.train.regime))); }}},
      {"train.epochs", BF_SIZE(train.epochs)},
      {"train.batch_size", BF_SIZE(train.batch_size)},
      {"train.learning_rate", BF_DOUBLE(train.learning_rate)},
      {"train.momentum", BF_DOUBLE(train.momentum)},
      {"train.alpha", BF_DOUBLE(train.alpha)},
      {"train.beta", BF_DOUBLE(train.beta)},
      {"train.lambda", BF_DOUBLE(train.lambda)},
      {"train.margin", BF_DOUBLE(train.margin)},
      {"train.eval_every", BF_SIZE(train.eval_every)},
      {"attack.max_words", BF_SIZE(attack.max_words)},
      {"attack.sem_threshold", BF_DOUBLE(attack.sem_threshold)},
      {"attack.pos_constraint", BF_BOOL(attack.pos_constraint)},
      {"attack.oracle_check", BF_BOOL(attack.oracle_check)},
      {"attack.reverse_importance", BF_BOOL(attack.reverse_importance)},
      {"attack.negation", BF_BOOL(negation_attack)},
      {"eval.probe_size", BF_SIZE(probe_size)},
      {"eval.asr_limit", BF_SIZE(asr_limit)},
      {"paths.data_dir", BF_STRING(paths.data_dir)},
      {"paths.embeddings", BF_STRING(paths.embeddings)},
      {"paths.antonyms", BF_STRING(paths.antonyms)},
      {"paths.pos", BF_STRING(paths.pos)},
      {"paths.negation", BF_STRING(paths.negation)},
      {"paths.train", BF_STRING(paths.train)},
      {"paths.eval", BF_STRING(paths.eval)},
      {"paths.dataset", BF_STRING(paths.dataset)},
      {"paths.checkpoint", BF_STRING(paths.checkpoint)},
      {"paths.out_dir", BF_STRING(paths.out_dir)},
  };
  return table;
}

#undef BF_SIZE
#undef BF_DOUBLE
#undef BF_BOOL
#undef BF_STRING

// Default file names inside paths.data_dir, as written by gen-data.
const std::map<std::string, std::string, std::less<>>& default_names() {
  static const std::map<std::string, std::string, std::less<>> names = {
      {"paths.embeddings", "embeddings.txt"}, {"paths.antonyms", "antonyms.tsv"}, {"paths.pos", "pos.tsv"},
      {"paths.negation", "negation.tsv"},     {"paths.train", "train.tsv"},       {"paths.eval", "eval.tsv"},
      {"paths.dataset", "dataset.json"},      {"paths.checkpoint", "model.ckpt"},
  };
  return names;
}

std::string explicit_path(const RunConfig& cfg, std::string_view key) {
  const json v = fields().at(std::string(key)).get(cfg);
  return v.get<std::string>();
}

}  // namespace

void RunConfig::set(std::string_view key, const json& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key: " + std::string(key));
  it->second.set(*this, key, value);
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set(key, value);
}

void RunConfig::merge(const json& flat) {
  if (!flat.is_object()) throw ConfigError("config must be a JSON object with dotted keys");
  for (const auto& [key, value] : flat.items()) {
    if (key == "seed" && value.is_null()) {
      seed.reset();
      continue;
    }
    set(key, value);
  }
}

json RunConfig::to_json() const {
  json out = json::object();
  for (const auto& [key, field] : fields()) out[key] = field.get(*this);
  return out;
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("missing required key: seed");
  return *seed;
}

void RunConfig::validate() const {
  require_seed();
  lexicon.validate();
  toy_spec().validate();
  train_config().validate();
  attack_config().validate();
  if (hidden_size < 2) throw ConfigError("model.hidden_size must be at least 2");
  if (n_train == 0) throw ConfigError("toy.n_train must be at least 1");
  if (n_eval == 0) throw ConfigError("toy.n_eval must be at least 1");
}

ToyTaskSpec RunConfig::toy_spec() const {
  ToyTaskSpec s = toy;
  s.task = task;
  s.seed = require_seed();
  return s;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t = train;
  t.seed = require_seed();
  return t;
}

AttackConfig RunConfig::attack_config() const {
  AttackConfig a = attack;
  a.task = task;
  return a;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, field] : fields()) keys.push_back(key);
  return keys;
}

RunConfig run_config_from_json(const json& flat) {
  RunConfig cfg;
  cfg.merge(flat);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return run_config_from_json(j);
}

std::optional<std::filesystem::path> optional_path(const RunConfig& cfg, std::string_view key) {
  if (!fields().contains(key)) throw std::invalid_argument("not a path key: " + std::string(key));
  const std::string value = explicit_path(cfg, key);
  if (!value.empty()) {
    if (!std::filesystem::exists(value)) throw ConfigError(std::string(key) + ": file not found: " + value);
    return std::filesystem::path(value);
  }
  const auto name = default_names().find(key);
  if (cfg.paths.data_dir.empty() || name == default_names().end()) return std::nullopt;
  const auto candidate = std::filesystem::path(cfg.paths.data_dir) / name->second;
  if (!std::filesystem::exists(candidate)) return std::nullopt;
  return candidate;
}

std::filesystem::path require_path(const RunConfig& cfg, std::string_view key) {
  if (auto p = optional_path(cfg, key)) return *p;
  const auto name = default_names().find(key);
  if (!cfg.paths.data_dir.empty() && name != default_names().end()) {
    throw ConfigError(std::string(key) + ": file not found: " +
                      (std::filesystem::path(cfg.paths.data_dir) / name->second).string());
  }
  throw ConfigError("missing required path: " + std::string(key));
}

}  // namespace batforge
