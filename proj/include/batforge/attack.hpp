#pragma once
// Word-substitution attacks. Fickle examples come from synonym substitutions
// that flip the prediction; obstinate examples come from a single antonym
// (or negation) substitution that leaves the prediction unchanged. Also the
// random samplers used for smoothing and balanced training.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "batforge/data.hpp"
#include "batforge/lexicon.hpp"
#include "batforge/model.hpp"
#include "batforge/rng.hpp"

namespace batforge {

enum class AttackKind { synonym, antonym, negation };

std::string_view attack_name(AttackKind kind);
AttackKind parse_attack(std::string_view name);

enum class FailureReason {
  none,
  ineligible,             // misclassified, or the label is excluded for this attack
  no_candidates,          // empty perturbation space
  constraints_exhausted,  // every candidate violated a constraint
  prediction_unchanged,   // fickle attack could not flip the prediction
  prediction_changed,     // obstinate attack could not keep the prediction
};

std::string_view failure_name(FailureReason reason);
FailureReason parse_failure(std::string_view name);

struct Position {
  Side side = Side::premise;
  std::size_t index = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Substitution {
  Side side = Side::premise;
  std::size_t index = 0;
  WordId old_word = 0;
  WordId new_word = 0;

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

struct PerturbedExample {
  Example example;
  std::vector<Substitution> substitutions;
};

// Throws std::out_of_range or std::invalid_argument when a substitution does
// not fit the example.
Example apply_substitutions(const Example& ex, std::span<const Substitution> subs);

// Task rule deciding which labels an attack may target: obstinate attacks skip
// neutral pairs (nli) and non-duplicates (paraphrase).
bool task_eligible(AttackKind kind, TaskKind task, int label);

struct AttackConfig {
  TaskKind task = TaskKind::nli;
  // Synonym substitution budget; 0 means the whole input.
  std::size_t max_words = 0;
  double sem_threshold = 0.8;
  bool pos_constraint = true;
  // Toy data only: candidates must keep (fickle) or change (obstinate) the
  // oracle label.
  bool oracle_check = false;
  // Obstinate attacks visit positions from least to most important.
  bool reverse_importance = false;

  void validate() const;
};

// The allowed substitutions per position, and the sentence-similarity measure
// (cosine of mean-pooled static embeddings over premise and hypothesis).
class PerturbationSpace {
 public:
  PerturbationSpace(const Vocabulary& vocab, const SubstitutionTables& tables, bool pos_constraint);

  // Replacement ids for `word`, ascending, never `word` itself.
  std::vector<WordId> candidates(AttackKind kind, WordId word) const;
  std::vector<WordId> candidates(AttackKind kind, const Example& ex, Position pos) const;
  bool has_candidates(AttackKind kind, const Example& ex) const;

  // Returns -1 when either input pools to the zero vector.
  double sentence_similarity(const Example& a, const Example& b) const;

  const Vocabulary& vocab() const { return *vocab_; }
  const SubstitutionTables& tables() const { return *tables_; }
  bool pos_constraint() const { return pos_constraint_; }

 private:
  const Vocabulary* vocab_;
  const SubstitutionTables* tables_;
  bool pos_constraint_;
};

struct ImportanceEntry {
  Position position;
  double score = 0.0;
};

struct ImportanceRanking {
  std::vector<ImportanceEntry> ranked;
  std::size_t queries = 0;
};

// score(i) = p_gold(x) - p_gold(x without word i), sorted descending with ties
// going to the lower joint index (premise first). Deleting the only word of
// a sentence substitutes `unk` instead. Passing p_gold saves one query.
ImportanceRanking word_importance_ranking(const Classifier& model, const Example& ex, WordId unk,
                                          std::optional<double> p_gold = std::nullopt);

struct AttackOutcome {
  std::int64_t example_id = 0;
  AttackKind kind = AttackKind::synonym;
  bool success = false;
  std::optional<Example> adversarial;
  std::vector<Substitution> substitutions;
  std::size_t queries = 0;
  FailureReason failure_reason = FailureReason::none;
};

// `oracle` is required when cfg.oracle_check is set.
AttackOutcome synonym_attack(const Classifier& model, const Example& ex, const AttackConfig& cfg,
                             const PerturbationSpace& space, const ToyOracle* oracle = nullptr);
AttackOutcome antonym_attack(const Classifier& model, const Example& ex, const AttackConfig& cfg,
                             const PerturbationSpace& space, const ToyOracle* oracle = nullptr);
AttackOutcome negation_attack(const Classifier& model, const Example& ex, const AttackConfig& cfg,
                              const PerturbationSpace& space, const ToyOracle* oracle = nullptr);
AttackOutcome run_attack(AttackKind kind, const Classifier& model, const Example& ex, const AttackConfig& cfg,
                         const PerturbationSpace& space, const ToyOracle* oracle = nullptr);

// Every position replaced by a uniform draw from its synonym set (which
// includes the word itself). Substitutions list only actual changes.
PerturbedExample random_synonym_perturb(const Example& ex, const SubstitutionTables& tables, Rng& rng);

// One uniformly chosen position with a nonempty antonym set, replaced by a
// uniform draw from that set; nullopt when no position qualifies.
std::optional<PerturbedExample> random_antonym_perturb(const Example& ex, const SubstitutionTables& tables,
                                                       Rng& rng);

// NDJSON attack log: {id, attack, success, substitutions, queries, failure_reason}
void write_attack_log(std::ostream& out, std::span<const AttackOutcome> outcomes);
std::vector<AttackOutcome> read_attack_log(std::istream& in);

}  // namespace batforge
