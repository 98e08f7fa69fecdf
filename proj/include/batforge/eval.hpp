#pragma once
// Accuracy, attack success rates, per-checkpoint tradeoff records and the
// representation-geometry probe.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "batforge/attack.hpp"
#include "batforge/data.hpp"
#include "batforge/model.hpp"

namespace batforge {

// Fraction of examples whose argmax equals the label. Throws on an empty set.
double accuracy(const Classifier& model, const Dataset& data);

struct AsrResult {
  AttackKind kind = AttackKind::synonym;
  std::size_t attempted = 0;
  std::size_t eligible = 0;  // correct, task-eligible, nonempty space
  std::size_t successes = 0;
  std::vector<AttackOutcome> outcomes;

  bool defined() const { return eligible > 0; }
  // NaN when undefined.
  double asr() const;
};

// Attacks every example (concurrently; outcomes keep dataset order).
AsrResult attack_success_rate(const Classifier& model, const Dataset& data, AttackKind kind,
                              const AttackConfig& cfg, const PerturbationSpace& space,
                              const ToyOracle* oracle = nullptr);

// Recomputes the counts from logged outcomes.
AsrResult asr_from_outcomes(AttackKind kind, std::span<const AttackOutcome> outcomes);

struct AsrSummary {
  double asr = 0.0;  // NaN when eligible == 0
  std::size_t eligible = 0;
  std::size_t successes = 0;
  bool evaluated = false;
};

struct MetricsRecord {
  std::size_t epoch = 0;
  std::string regime;
  double accuracy = 0.0;
  AsrSummary synonym;
  AsrSummary antonym;
  AsrSummary negation;
  double mean_d_f = 0.0;
  double mean_d_o = 0.0;
  std::size_t probe_size = 0;

  double gap() const { return mean_d_o - mean_d_f; }
};

enum class Group { original, fickle, obstinate };
std::string_view group_name(Group g);

struct RepresentationRow {
  std::int64_t id = 0;
  Group group = Group::original;
  std::vector<double> representation;
};

// n examples drawn without replacement (kept in dataset order), skipping
// neutral pairs for nli.
std::vector<Example> select_probe_sample(const Dataset& data, std::size_t n, std::uint64_t seed);

// Per example: the original, one random synonym perturbation and, when some
// word has antonyms, one random antonym perturbation.
std::vector<RepresentationRow> export_representations(const ModelParams& params, std::span<const Example> sample,
                                                      const SubstitutionTables& tables, Rng& rng);

struct DistanceSummary {
  double mean_d_f = 0.0;
  double mean_d_o = 0.0;
  std::size_t fickle_rows = 0;
  std::size_t obstinate_rows = 0;

  double gap() const { return mean_d_o - mean_d_f; }
};

// Mean cosine distance from each original to its own perturbed rows.
DistanceSummary representation_distances(std::span<const RepresentationRow> rows);

struct ProjectedPoint {
  std::int64_t id = 0;
  Group group = Group::original;
  double x = 0.0;
  double y = 0.0;
};

struct ProjectionOutput {
  std::vector<ProjectedPoint> points;
  bool rank_deficient = false;
  double variance[2] = {0.0, 0.0};
};

// Mean-centered projection onto the top two principal directions, found by
// power iteration (fixed start vector, 200 iterations, deflation). Throws
// on fewer than 3 rows.
ProjectionOutput pca_project(std::span<const RepresentationRow> rows);

struct EvalSetup {
  const Dataset* data = nullptr;
  const PerturbationSpace* space = nullptr;
  AttackConfig attack;
  const ToyOracle* oracle = nullptr;
  bool negation = false;
  std::size_t asr_limit = 0;   // attack at most this many examples; 0 = all
  std::size_t probe_size = 500;
  std::uint64_t seed = 0;
};

MetricsRecord evaluate_model(const ModelParams& params, const EvalSetup& setup, std::size_t epoch,
                             const std::string& regime);

struct EpochCheckpoint {
  std::size_t epoch = 0;
  ModelParams params;
};

// One record per checkpoint, sorted by epoch. Throws on an empty list or a
// checkpoint that does not fit the vocabulary.
std::vector<MetricsRecord> tradeoff_curve(std::span<const EpochCheckpoint> checkpoints, const EvalSetup& setup,
                                          const std::string& regime);

// epoch,regime,accuracy,synonym_asr,antonym_asr,negation_asr,mean_d_f,mean_d_o
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRecord& r);

// id,group,x,y
void write_projection_csv(std::ostream& out, const ProjectionOutput& projection);

}  // namespace batforge
