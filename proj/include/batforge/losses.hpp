#pragma once
// Per-example loss terms of the training regimes. A missing (masked)
// perturbed variant contributes exactly zero to the loss and its gradient.

#include <optional>
#include <span>
#include <vector>

namespace batforge {

// 1 - cosine similarity, in [0, 2]. Throws Error("degenerate vector") on a
// zero-norm input.
double cosine_distance(std::span<const double> a, std::span<const double> b);

struct TermRow {
  double ce = 0.0;               // -log p(y | x) on the original
  std::optional<double> d_f;     // d(x, fickle variant)
  std::optional<double> d_o;     // d(x, obstinate variant)
};

using BatchTerms = std::vector<TermRow>;

// ce + alpha d_f + beta max(0, m - d_o)
double pairwise_row(const TermRow& row, double alpha, double beta, double margin);
// ce + lambda max(0, d_f + (m - d_o)), masked parts replaced by 0 inside the hinge
double triplet_row(const TermRow& row, double lambda, double margin);

// Batch means. Throw std::invalid_argument on an empty batch.
double cross_entropy_loss(std::span<const TermRow> rows);
double pairwise_loss(std::span<const TermRow> rows, double alpha, double beta, double margin);
double triplet_loss(std::span<const TermRow> rows, double lambda, double margin);

// Partial derivatives of one row's contrastive part with respect to d_f and
// d_o. A hinge sitting exactly at its kink is treated as inactive.
struct DistanceWeights {
  double d_f = 0.0;
  double d_o = 0.0;
};

DistanceWeights pairwise_weights(const TermRow& row, double alpha, double beta, double margin);
DistanceWeights triplet_weights(const TermRow& row, double lambda, double margin);

}  // namespace batforge
