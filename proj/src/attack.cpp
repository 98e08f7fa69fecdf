#include "batforge/attack.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <json.hpp>
#include <ostream>
#include <stdexcept>
#include <string>

#include "batforge/error.hpp"
#include "batforge/kernels.hpp"

namespace batforge {

std::string_view attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::synonym:
      return "synonym";
    case AttackKind::antonym:
      return "antonym";
    case AttackKind::negation:
      return "negation";
  }
  return "?";
}

AttackKind parse_attack(std::string_view name) {
  if (name == "synonym") return AttackKind::synonym;
  if (name == "antonym") return AttackKind::antonym;
  if (name == "negation") return AttackKind::negation;
  throw ConfigError("unknown attack '" + std::string(name) + "'");
}

std::string_view failure_name(FailureReason reason) {
  switch (reason) {
    case FailureReason::none:
      return "none";
    case FailureReason::ineligible:
      return "ineligible";
    case FailureReason::no_candidates:
      return "no_candidates";
    case FailureReason::constraints_exhausted:
      return "constraints_exhausted";
    case FailureReason::prediction_unchanged:
      return "prediction_unchanged";
    case FailureReason::prediction_changed:
      return "prediction_changed";
  }
  return "?";
}

FailureReason parse_failure(std::string_view name) {
  for (auto r : {FailureReason::none, FailureReason::ineligible, FailureReason::no_candidates,
                 FailureReason::constraints_exhausted, FailureReason::prediction_unchanged,
                 FailureReason::prediction_changed}) {
    if (failure_name(r) == name) return r;
  }
  throw ParseError("unknown failure reason '" + std::string(name) + "'");
}

Example apply_substitutions(const Example& ex, std::span<const Substitution> subs) {
  Example out = ex;
  for (const auto& s : subs) {
    auto& sentence = out.sentence(s.side);
    if (s.index >= sentence.size()) throw std::out_of_range("substitution position outside the sentence");
    if (sentence[s.index] != s.old_word) throw std::invalid_argument("substitution does not match the sentence");
    sentence[s.index] = s.new_word;
  }
  return out;
}

bool task_eligible(AttackKind kind, TaskKind task, int label) {
  if (kind == AttackKind::synonym) return true;
  if (task == TaskKind::nli) return label != nli_label::neutral;
  return label == paraphrase_label::duplicate;
}

void AttackConfig::validate() const {
  if (!(sem_threshold >= -1.0 && sem_threshold <= 1.0)) {
    throw ConfigError("attack.sem_threshold must lie in [-1, 1]");
  }
}

PerturbationSpace::PerturbationSpace(const Vocabulary& vocab, const SubstitutionTables& tables, bool pos_constraint)
    : vocab_(&vocab), tables_(&tables), pos_constraint_(pos_constraint) {}

std::vector<WordId> PerturbationSpace::candidates(AttackKind kind, WordId word) const {
  std::span<const WordId> pool;
  switch (kind) {
    case AttackKind::synonym:
      pool = tables_->synonyms_of(word);
      break;
    case AttackKind::antonym:
      pool = tables_->antonyms_of(word);
      break;
    case AttackKind::negation:
      pool = tables_->negations_of(word);
      break;
  }
  std::vector<WordId> out;
  const bool check_pos = pos_constraint_ && kind != AttackKind::negation;
  for (WordId c : pool) {
    if (c == word) continue;
    if (check_pos && !pos_compatible(tables_->pos_of(word), tables_->pos_of(c))) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<WordId> PerturbationSpace::candidates(AttackKind kind, const Example& ex, Position pos) const {
  return candidates(kind, ex.sentence(pos.side).at(pos.index));
}

bool PerturbationSpace::has_candidates(AttackKind kind, const Example& ex) const {
  for (const Side side : {Side::premise, Side::hypothesis}) {
    for (WordId w : ex.sentence(side)) {
      if (!candidates(kind, w).empty()) return true;
    }
  }
  return false;
}

double PerturbationSpace::sentence_similarity(const Example& a, const Example& b) const {
  const std::size_t dim = vocab_->dim();
  auto pool = [&](const Example& ex) {
    std::vector<double> v(dim, 0.0);
    const double scale = 1.0 / static_cast<double>(ex.premise.size() + ex.hypothesis.size());
    for (const Side side : {Side::premise, Side::hypothesis}) {
      for (WordId w : ex.sentence(side)) {
        if (!vocab_->is_unknown(w)) kernels::axpy(scale, vocab_->vector(w), v);
      }
    }
    return v;
  };
  const auto va = pool(a);
  const auto vb = pool(b);
  if (!(kernels::dot(va, va) > 0.0) || !(kernels::dot(vb, vb) > 0.0)) return -1.0;
  return cosine_similarity(va, vb);
}

namespace {

std::vector<Position> joint_positions(const Example& ex) {
  std::vector<Position> out;
  out.reserve(ex.premise.size() + ex.hypothesis.size());
  for (std::size_t i = 0; i < ex.premise.size(); ++i) out.push_back({Side::premise, i});
  for (std::size_t i = 0; i < ex.hypothesis.size(); ++i) out.push_back({Side::hypothesis, i});
  return out;
}

Example with_word(const Example& ex, Position pos, WordId w) {
  Example out = ex;
  out.sentence(pos.side)[pos.index] = w;
  return out;
}

// Wraps a classifier so every call is counted.
class CountingModel {
 public:
  explicit CountingModel(const Classifier& model) : model_(model) {}
  std::vector<double> operator()(const Example& ex) {
    ++queries_;
    return model_.probabilities(ex);
  }
  std::size_t queries() const { return queries_; }

 private:
  const Classifier& model_;
  std::size_t queries_ = 0;
};

AttackOutcome fail(AttackOutcome out, FailureReason reason) {
  out.success = false;
  out.failure_reason = reason;
  return out;
}

// Shared body of the obstinate attacks: at most one substitution, success
// when the prediction survives.
AttackOutcome single_substitution_attack(AttackKind kind, const Classifier& model, const Example& ex,
                                         const AttackConfig& cfg, const PerturbationSpace& space,
                                         const ToyOracle* oracle) {
  if (cfg.oracle_check && oracle == nullptr) throw ConfigError("oracle_check requires a toy oracle");
  AttackOutcome out;
  out.example_id = ex.id;
  out.kind = kind;
  CountingModel counted(model);
  const auto p0 = counted(ex);
  out.queries = counted.queries();
  const int pred = argmax(p0);
  if (pred != ex.label || !task_eligible(kind, cfg.task, ex.label)) return fail(out, FailureReason::ineligible);
  if (!space.has_candidates(kind, ex)) return fail(out, FailureReason::no_candidates);

  auto ranking = word_importance_ranking(model, ex, space.vocab().unk_id(), p0[static_cast<std::size_t>(ex.label)]);
  std::size_t queries = counted.queries() + ranking.queries;
  if (cfg.reverse_importance) std::reverse(ranking.ranked.begin(), ranking.ranked.end());
  const int original_oracle = cfg.oracle_check ? oracle->label(ex) : -1;

  bool any_valid = false;
  for (const auto& entry : ranking.ranked) {
    const Position pos = entry.position;
    const WordId old_word = ex.sentence(pos.side)[pos.index];
    for (WordId c : space.candidates(kind, old_word)) {
      Example trial = with_word(ex, pos, c);
      if (cfg.oracle_check && oracle->label(trial) == original_oracle) continue;
      any_valid = true;
      ++queries;
      const auto probs = model.probabilities(trial);
      if (argmax(probs) == pred) {
        out.success = true;
        out.substitutions = {{pos.side, pos.index, old_word, c}};
        out.adversarial = std::move(trial);
        out.queries = queries;
        return out;
      }
    }
  }
  out.queries = queries;
  return fail(out, any_valid ? FailureReason::prediction_changed : FailureReason::constraints_exhausted);
}

}  // namespace

ImportanceRanking word_importance_ranking(const Classifier& model, const Example& ex, WordId unk,
                                          std::optional<double> p_gold) {
  ImportanceRanking result;
  const auto gold = static_cast<std::size_t>(ex.label);
  if (!p_gold) {
    p_gold = model.probabilities(ex).at(gold);
    ++result.queries;
  }
  const auto positions = joint_positions(ex);
  result.ranked.reserve(positions.size());
  for (const Position pos : positions) {
    Example reduced = ex;
    auto& sentence = reduced.sentence(pos.side);
    if (sentence.size() == 1) {
      sentence[0] = unk;
    } else {
      sentence.erase(sentence.begin() + static_cast<std::ptrdiff_t>(pos.index));
    }
    const double p = model.probabilities(reduced).at(gold);
    ++result.queries;
    result.ranked.push_back({pos, *p_gold - p});
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const ImportanceEntry& a, const ImportanceEntry& b) { return a.score > b.score; });
  return result;
}

AttackOutcome synonym_attack(const Classifier& model, const Example& ex, const AttackConfig& cfg,
                             const PerturbationSpace& space, const ToyOracle* oracle) {
  if (cfg.oracle_check && oracle == nullptr) throw ConfigError("oracle_check requires a toy oracle");
  AttackOutcome out;
  out.example_id = ex.id;
  out.kind = AttackKind::synonym;
  const auto p0 = model.probabilities(ex);
  std::size_t queries = 1;
  out.queries = queries;
  const int pred = argmax(p0);
  if (pred != ex.label) return fail(out, FailureReason::ineligible);
  if (!space.has_candidates(AttackKind::synonym, ex)) return fail(out, FailureReason::no_candidates);

  const auto gold = static_cast<std::size_t>(ex.label);
  const auto ranking = word_importance_ranking(model, ex, space.vocab().unk_id(), p0[gold]);
  queries += ranking.queries;
  const int original_oracle = cfg.oracle_check ? oracle->label(ex) : -1;
  const std::size_t budget = cfg.max_words == 0 ? ranking.ranked.size() : cfg.max_words;

  Example current = ex;
  bool any_valid = false;
  for (const auto& entry : ranking.ranked) {
    if (out.substitutions.size() >= budget) break;
    const Position pos = entry.position;
    const WordId old_word = ex.sentence(pos.side)[pos.index];
    std::optional<Example> best;
    std::vector<double> best_probs;
    WordId best_word = old_word;
    double best_p = std::numeric_limits<double>::infinity();
    for (WordId c : space.candidates(AttackKind::synonym, old_word)) {
      Example trial = with_word(current, pos, c);
      if (space.sentence_similarity(ex, trial) < cfg.sem_threshold) continue;
      if (cfg.oracle_check && oracle->label(trial) != original_oracle) continue;
      any_valid = true;
      auto probs = model.probabilities(trial);
      ++queries;
      if (probs[gold] < best_p) {
        best_p = probs[gold];
        best = std::move(trial);
        best_probs = std::move(probs);
        best_word = c;
      }
    }
    if (!best) continue;
    current = std::move(*best);
    out.substitutions.push_back({pos.side, pos.index, old_word, best_word});
    if (argmax(best_probs) != pred) {
      out.success = true;
      out.adversarial = std::move(current);
      out.queries = queries;
      return out;
    }
  }
  out.queries = queries;
  out.substitutions.clear();
  return fail(out, any_valid ? FailureReason::prediction_unchanged : FailureReason::constraints_exhausted);
}

AttackOutcome antonym_attack(const Classifier& model, const Example& ex, const AttackConfig& cfg,
                             const PerturbationSpace& space, const ToyOracle* oracle) {
  return single_substitution_attack(AttackKind::antonym, model, ex, cfg, space, oracle);
}

AttackOutcome negation_attack(const Classifier& model, const Example& ex, const AttackConfig& cfg,
                              const PerturbationSpace& space, const ToyOracle* oracle) {
  return single_substitution_attack(AttackKind::negation, model, ex, cfg, space, oracle);
}

AttackOutcome run_attack(AttackKind kind, const Classifier& model, const Example& ex, const AttackConfig& cfg,
                         const PerturbationSpace& space, const ToyOracle* oracle) {
  switch (kind) {
    case AttackKind::synonym:
      return synonym_attack(model, ex, cfg, space, oracle);
    case AttackKind::antonym:
      return antonym_attack(model, ex, cfg, space, oracle);
    case AttackKind::negation:
      return negation_attack(model, ex, cfg, space, oracle);
  }
  throw std::invalid_argument("unknown attack kind");
}

PerturbedExample random_synonym_perturb(const Example& ex, const SubstitutionTables& tables, Rng& rng) {
  PerturbedExample out{ex, {}};
  for (const Side side : {Side::premise, Side::hypothesis}) {
    auto& sentence = out.example.sentence(side);
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      const auto set = tables.synonyms_of(sentence[i]);
      if (set.size() <= 1) continue;
      const WordId pick = set[uniform_index(rng, set.size())];
      if (pick != sentence[i]) {
        out.substitutions.push_back({side, i, sentence[i], pick});
        sentence[i] = pick;
      }
    }
  }
  return out;
}

std::optional<PerturbedExample> random_antonym_perturb(const Example& ex, const SubstitutionTables& tables,
                                                       Rng& rng) {
  std::vector<Position> eligible;
  for (const auto pos : joint_positions(ex)) {
    if (!tables.antonyms_of(ex.sentence(pos.side)[pos.index]).empty()) eligible.push_back(pos);
  }
  if (eligible.empty()) return std::nullopt;
  const Position pos = eligible[uniform_index(rng, eligible.size())];
  const WordId old_word = ex.sentence(pos.side)[pos.index];
  const auto set = tables.antonyms_of(old_word);
  const WordId pick = set[uniform_index(rng, set.size())];
  PerturbedExample out{with_word(ex, pos, pick), {{pos.side, pos.index, old_word, pick}}};
  return out;
}

void write_attack_log(std::ostream& out, std::span<const AttackOutcome> outcomes) {
  for (const auto& o : outcomes) {
    nlohmann::ordered_json j;
    j["id"] = o.example_id;
    j["attack"] = attack_name(o.kind);
    j["success"] = o.success;
    auto subs = nlohmann::ordered_json::array();
    for (const auto& s : o.substitutions) {
      nlohmann::ordered_json js;
      js["side"] = s.side == Side::premise ? "premise" : "hypothesis";
      js["position"] = s.index;
      js["old"] = s.old_word;
      js["new"] = s.new_word;
      subs.push_back(std::move(js));
    }
    j["substitutions"] = std::move(subs);
    j["queries"] = o.queries;
    if (o.success) {
      j["failure_reason"] = nullptr;
    } else {
      j["failure_reason"] = failure_name(o.failure_reason);
    }
    out << j.dump() << '\n';
  }
}

std::vector<AttackOutcome> read_attack_log(std::istream& in) {
  std::vector<AttackOutcome> outcomes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AttackOutcome o;
      o.example_id = j.at("id").get<std::int64_t>();
      o.kind = parse_attack(j.at("attack").get<std::string>());
      o.success = j.at("success").get<bool>();
      for (const auto& js : j.at("substitutions")) {
        Substitution s;
        const auto side = js.at("side").get<std::string>();
        if (side != "premise" && side != "hypothesis") throw ParseError("bad side '" + side + "'");
        s.side = side == "premise" ? Side::premise : Side::hypothesis;
        s.index = js.at("position").get<std::size_t>();
        s.old_word = js.at("old").get<WordId>();
        s.new_word = js.at("new").get<WordId>();
        o.substitutions.push_back(s);
      }
      o.queries = j.at("queries").get<std::size_t>();
      const auto& reason = j.at("failure_reason");
      o.failure_reason = reason.is_null() ? FailureReason::none : parse_failure(reason.get<std::string>());
      outcomes.push_back(std::move(o));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("attack log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return outcomes;
}

}  // namespace batforge
