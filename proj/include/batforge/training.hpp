#pragma once
// The four training regimes: plain cross-entropy, synonym-smoothing
// augmentation, and the two contrastive BAT losses.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "batforge/data.hpp"
#include "batforge/eval.hpp"
#include "batforge/lexicon.hpp"
#include "batforge/model.hpp"

namespace batforge {

enum class Regime { normal, smooth, bat_pair, bat_triplet };

std::string_view regime_name(Regime r);
// Throws ConfigError on an unknown name.
Regime parse_regime(std::string_view name);

struct TrainConfig {
  Regime regime = Regime::normal;
  std::size_t epochs = 15;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double alpha = 1.0;
  double beta = 1.2;
  double lambda = 1.0;
  double margin = 1.0;  // within [0, 2], the range of the cosine distance
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;  // 0 disables per-epoch evaluation

  void validate() const;
  LossSpec loss_spec() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<MetricsRecord> metrics;
};

// Called after every epoch with the current parameters; `record` is null on
// epochs that were not evaluated.
using EpochCallback = std::function<void(std::size_t epoch, const ModelParams& params, const MetricsRecord* record)>;

// Shuffles with the "shuffle" stream and draws perturbations from the
// "perturb" stream, so the batch order does not depend on the regime.
// `eval` may be null. Throws Error with epoch and batch context when the loss
// goes non-finite.
TrainResult train(const TrainConfig& cfg, const Dataset& train_data, ModelParams params,
                  const SubstitutionTables& tables, const EvalSetup* eval = nullptr,
                  const EpochCallback& on_epoch = {});

// The items one batch is built from under `regime`. Exposed for tests.
std::vector<TrainingItem> make_training_items(Regime regime, std::span<const Example* const> batch,
                                              const SubstitutionTables& tables, Rng& rng);

}  // namespace batforge
