#include "batforge/losses.hpp"

#include <algorithm>
#include <stdexcept>

#include "batforge/lexicon.hpp"

namespace batforge {

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

namespace {

double obstinate_gap(const TermRow& row, double margin) { return row.d_o ? margin - *row.d_o : 0.0; }

double triplet_argument(const TermRow& row, double margin) {
  return row.d_f.value_or(0.0) + obstinate_gap(row, margin);
}

template <typename RowFn>
double batch_mean(std::span<const TermRow> rows, RowFn&& fn) {
  if (rows.empty()) throw std::invalid_argument("loss of an empty batch");
  double total = 0.0;
  for (const auto& row : rows) total += fn(row);
  return total / static_cast<double>(rows.size());
}

}  // namespace

double pairwise_row(const TermRow& row, double alpha, double beta, double margin) {
  double loss = row.ce;
  if (row.d_f) loss += alpha * *row.d_f;
  if (row.d_o) loss += beta * std::max(0.0, margin - *row.d_o);
  return loss;
}

double triplet_row(const TermRow& row, double lambda, double margin) {
  if (!row.d_f && !row.d_o) return row.ce;
  return row.ce + lambda * std::max(0.0, triplet_argument(row, margin));
}

double cross_entropy_loss(std::span<const TermRow> rows) {
  return batch_mean(rows, [](const TermRow& r) { return r.ce; });
}

double pairwise_loss(std::span<const TermRow> rows, double alpha, double beta, double margin) {
  return batch_mean(rows, [&](const TermRow& r) { return pairwise_row(r, alpha, beta, margin); });
}

double triplet_loss(std::span<const TermRow> rows, double lambda, double margin) {
  return batch_mean(rows, [&](const TermRow& r) { return triplet_row(r, lambda, margin); });
}

DistanceWeights pairwise_weights(const TermRow& row, double alpha, double beta, double margin) {
  DistanceWeights w;
  if (row.d_f) w.d_f = alpha;
  if (row.d_o && margin - *row.d_o > 0.0) w.d_o = -beta;
  return w;
}

DistanceWeights triplet_weights(const TermRow& row, double lambda, double margin) {
  DistanceWeights w;
  if ((!row.d_f && !row.d_o) || !(triplet_argument(row, margin) > 0.0)) return w;
  if (row.d_f) w.d_f = lambda;
  if (row.d_o) w.d_o = -lambda;
  return w;
}

}  // namespace batforge
