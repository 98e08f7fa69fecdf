#include "batforge/training.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "batforge/attack.hpp"
#include "batforge/error.hpp"

namespace batforge {

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::normal:
      return "normal";
    case Regime::smooth:
      return "smooth";
    case Regime::bat_pair:
      return "bat_pair";
    case Regime::bat_triplet:
      return "bat_triplet";
  }
  return "?";
}

Regime parse_regime(std::string_view name) {
  for (auto r : {Regime::normal, Regime::smooth, Regime::bat_pair, Regime::bat_triplet}) {
    if (regime_name(r) == name) return r;
  }
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("train.epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("train.batch_size must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train.learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must be in [0, 1)");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("train.alpha must be non-negative");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("train.beta must be non-negative");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("train.lambda must be non-negative");
  if (!(margin >= 0.0 && margin <= 2.0)) throw ConfigError("train.margin must be in [0, 2]");
}

LossSpec TrainConfig::loss_spec() const {
  LossSpec s;
  switch (regime) {
    case Regime::normal:
    case Regime::smooth:
      s.kind = LossKind::cross_entropy;
      break;
    case Regime::bat_pair:
      s.kind = LossKind::bat_pair;
      break;
    case Regime::bat_triplet:
      s.kind = LossKind::bat_triplet;
      break;
  }
  s.alpha = alpha;
  s.beta = beta;
  s.lambda = lambda;
  s.margin = margin;
  return s;
}

std::vector<TrainingItem> make_training_items(Regime regime, std::span<const Example* const> batch,
                                              const SubstitutionTables& tables, Rng& rng) {
  std::vector<TrainingItem> items;
  items.reserve(batch.size());
  for (const Example* ex : batch) {
    TrainingItem item;
    switch (regime) {
      case Regime::normal:
        item.original = *ex;
        break;
      case Regime::smooth:
        item.original = random_synonym_perturb(*ex, tables, rng).example;
        break;
      case Regime::bat_pair:
      case Regime::bat_triplet: {
        item.original = *ex;
        auto fickle = random_synonym_perturb(*ex, tables, rng);
        // An unchanged copy would only pull the representation onto itself.
        if (!fickle.substitutions.empty()) item.fickle = std::move(fickle.example);
        if (auto obstinate = random_antonym_perturb(*ex, tables, rng)) item.obstinate = std::move(obstinate->example);
        break;
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

TrainResult train(const TrainConfig& cfg, const Dataset& train_data, ModelParams params,
                  const SubstitutionTables& tables, const EvalSetup* eval, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_data.examples.empty()) throw Error("empty training set");
  if (params.shape.classes != train_data.num_classes()) throw Error("shape mismatch: class count differs from task");

  const LossSpec spec = cfg.loss_spec();
  Rng shuffle_rng = make_rng(cfg.seed, "shuffle");
  Rng perturb_rng = make_rng(cfg.seed, "perturb");

  ModelParams velocity = ModelParams::zeros(params.shape);
  std::vector<std::size_t> order(train_data.size());
  std::vector<const Example*> batch;
  TrainResult result;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_range(order.begin(), order.end(), shuffle_rng);
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_data.examples[order[i]]);
      const auto items = make_training_items(cfg.regime, batch, tables, perturb_rng);

      GradientResult g;
      try {
        g = compute_gradients(params, items, spec);
      } catch (const Error& e) {
        throw Error("epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index) + ": " + e.what());
      }

      auto p = params.buffers();
      auto v = velocity.buffers();
      const auto gr = std::as_const(g.grad).buffers();
      for (std::size_t b = 0; b < p.size(); ++b) {
        if (b == 0 && !params.train_embeddings) continue;
        for (std::size_t k = 0; k < p[b].size(); ++k) {
          v[b][k] = cfg.momentum * v[b][k] + gr[b][k];
          p[b][k] -= cfg.learning_rate * v[b][k];
        }
      }
    }

    const bool due = eval != nullptr && ((cfg.eval_every != 0 && epoch % cfg.eval_every == 0) || epoch == cfg.epochs);
    if (due) {
      result.metrics.push_back(evaluate_model(params, *eval, epoch, std::string(regime_name(cfg.regime))));
    }
    if (on_epoch) on_epoch(epoch, params, due ? &result.metrics.back() : nullptr);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace batforge
