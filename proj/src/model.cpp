#include "batforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "batforge/error.hpp"
#include "batforge/kernels.hpp"
#include "batforge/rng.hpp"

namespace batforge {

ModelParams ModelParams::zeros(const ModelShape& shape) {
  ModelParams p;
  p.shape = shape;
  p.embedding.assign(shape.vocab_rows * shape.dim, 0.0);
  p.w1.assign(shape.hidden * shape.feature_size(), 0.0);
  p.b1.assign(shape.hidden, 0.0);
  p.w2.assign(shape.hidden * shape.classes, 0.0);
  p.b2.assign(shape.classes, 0.0);
  return p;
}

std::array<std::span<double>, 5> ModelParams::buffers() { return {embedding, w1, b1, w2, b2}; }

std::array<std::span<const double>, 5> ModelParams::buffers() const { return {embedding, w1, b1, w2, b2}; }

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& b : buffers()) n += b.size();
  return n;
}

ModelParams init_model(const Vocabulary& vocab, std::size_t hidden_size, std::size_t classes,
                       std::uint64_t seed) {
  if (hidden_size < 2) throw ConfigError("model.hidden_size must be at least 2");
  if (classes < 2) throw ConfigError("model needs at least 2 classes");
  ModelShape shape{vocab.size() + 1, vocab.dim(), hidden_size, classes};
  ModelParams p = ModelParams::zeros(shape);
  std::copy(vocab.data().begin(), vocab.data().end(), p.embedding.begin());

  Rng rng = make_rng(seed, "init");
  auto fill = [&](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& x : w) x = a * (2.0 * uniform01(rng) - 1.0);
  };
  fill(p.w1, shape.feature_size(), hidden_size);
  fill(p.w2, hidden_size, classes);
  return p;
}

void check_compatible(const ModelParams& params, const Vocabulary& vocab, std::size_t classes) {
  const ModelShape& s = params.shape;
  if (s.vocab_rows != vocab.size() + 1 || s.dim != vocab.dim() || s.classes != classes) {
    throw Error("shape mismatch: checkpoint has vocab " + std::to_string(s.vocab_rows - 1) + ", dim " +
                std::to_string(s.dim) + ", classes " + std::to_string(s.classes) + "; task has vocab " +
                std::to_string(vocab.size()) + ", dim " + std::to_string(vocab.dim()) + ", classes " +
                std::to_string(classes));
  }
}

int argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

int ForwardOutput::predicted() const { return argmax(probs); }

namespace {

struct Activations {
  std::vector<double> u, v, feature, rep, logits, probs;
  double log_norm = 0.0;  // log-sum-exp of the logits
};

kernels::ConstMatrixView w1_view(const ModelParams& p) {
  return {p.w1.data(), p.shape.hidden, p.shape.feature_size()};
}
kernels::ConstMatrixView w2_view(const ModelParams& p) { return {p.w2.data(), p.shape.hidden, p.shape.classes}; }

void mean_pool(const ModelParams& p, const std::vector<WordId>& sentence, std::vector<double>& out) {
  if (sentence.empty()) throw Error("empty sentence");
  const std::size_t dim = p.shape.dim;
  out.assign(dim, 0.0);
  const double scale = 1.0 / static_cast<double>(sentence.size());
  for (WordId w : sentence) {
    if (w < 0 || static_cast<std::size_t>(w) >= p.shape.vocab_rows) {
      throw std::out_of_range("token id " + std::to_string(w) + " outside the model vocabulary");
    }
    kernels::axpy(scale, {p.embedding.data() + static_cast<std::size_t>(w) * dim, dim}, out);
  }
}

void run_forward(const ModelParams& p, const Example& ex, Activations& a) {
  const std::size_t dim = p.shape.dim;
  mean_pool(p, ex.premise, a.u);
  mean_pool(p, ex.hypothesis, a.v);
  a.feature.resize(4 * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    a.feature[i] = a.u[i];
    a.feature[dim + i] = a.v[i];
    a.feature[2 * dim + i] = std::abs(a.u[i] - a.v[i]);
    a.feature[3 * dim + i] = a.u[i] * a.v[i];
  }
  a.rep = p.b1;
  kernels::gemv(w1_view(p), a.feature, a.rep);
  for (auto& x : a.rep) x = std::tanh(x);
  a.logits = p.b2;
  kernels::gemv_t(w2_view(p), a.rep, a.logits);
  const double mx = *std::max_element(a.logits.begin(), a.logits.end());
  a.probs.resize(a.logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < a.logits.size(); ++k) {
    a.probs[k] = std::exp(a.logits[k] - mx);
    total += a.probs[k];
  }
  for (auto& x : a.probs) x /= total;
  a.log_norm = mx + std::log(total);
}

// Accumulates into grad the contribution of one forward pass, given the
// upstream gradient on the logits (optional) and on the representation.
void run_backward(const ModelParams& p, const Example& ex, const Activations& a,
                  std::span<const double> dlogits, std::vector<double> drep, ModelParams& grad) {
  const std::size_t dim = p.shape.dim;
  const std::size_t hidden = p.shape.hidden;
  if (!dlogits.empty()) {
    kernels::ger(1.0, a.rep, dlogits, {grad.w2.data(), hidden, p.shape.classes});
    kernels::axpy(1.0, dlogits, grad.b2);
    kernels::gemv(w2_view(p), dlogits, drep);
  }
  for (std::size_t h = 0; h < hidden; ++h) drep[h] *= 1.0 - a.rep[h] * a.rep[h];
  kernels::ger(1.0, drep, a.feature, {grad.w1.data(), hidden, p.shape.feature_size()});
  kernels::axpy(1.0, drep, grad.b1);
  if (!p.train_embeddings) return;

  std::vector<double> dfeat(4 * dim, 0.0);
  kernels::gemv_t(w1_view(p), drep, dfeat);
  std::vector<double> du(dim), dv(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double diff = a.u[i] - a.v[i];
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    du[i] = dfeat[i] + sign * dfeat[2 * dim + i] + a.v[i] * dfeat[3 * dim + i];
    dv[i] = dfeat[dim + i] - sign * dfeat[2 * dim + i] + a.u[i] * dfeat[3 * dim + i];
  }
  auto scatter = [&](const std::vector<WordId>& sentence, const std::vector<double>& d) {
    const double scale = 1.0 / static_cast<double>(sentence.size());
    for (WordId w : sentence) {
      kernels::axpy(scale, d, {grad.embedding.data() + static_cast<std::size_t>(w) * dim, dim});
    }
  };
  scatter(ex.premise, du);
  scatter(ex.hypothesis, dv);
}

// d(1 - cos(a, b)) / da, scaled by `weight`, added to out.
void add_distance_gradient(std::span<const double> a, std::span<const double> b, double weight,
                           std::vector<double>& out) {
  const double aa = kernels::dot(a, a);
  const double bb = kernels::dot(b, b);
  const double norm = std::sqrt(aa) * std::sqrt(bb);
  const double cos = kernels::dot(a, b) / norm;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] -= weight * (b[i] / norm - cos * a[i] / aa);
}

double row_loss(const TermRow& row, const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::bat_pair:
      return pairwise_row(row, spec.alpha, spec.beta, spec.margin);
    case LossKind::bat_triplet:
      return triplet_row(row, spec.lambda, spec.margin);
    case LossKind::cross_entropy:
      break;
  }
  return row.ce;
}

double batch_loss(std::span<const TermRow> rows, const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::bat_pair:
      return pairwise_loss(rows, spec.alpha, spec.beta, spec.margin);
    case LossKind::bat_triplet:
      return triplet_loss(rows, spec.lambda, spec.margin);
    case LossKind::cross_entropy:
      break;
  }
  return cross_entropy_loss(rows);
}

GradientResult run_batch(const ModelParams& params, std::span<const TrainingItem> batch, const LossSpec& spec,
                         bool with_gradient) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  GradientResult result;
  if (with_gradient) result.grad = ModelParams::zeros(params.shape);
  result.terms.reserve(batch.size());
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const bool contrastive = spec.kind != LossKind::cross_entropy;

  Activations orig, fick, obst;
  for (const auto& item : batch) {
    run_forward(params, item.original, orig);
    const auto y = static_cast<std::size_t>(item.original.label);
    if (y >= params.shape.classes) throw std::out_of_range("label outside the model's classes");
    TermRow row;
    row.ce = orig.log_norm - orig.logits[y];
    if (contrastive && item.fickle) {
      run_forward(params, *item.fickle, fick);
      row.d_f = cosine_distance(orig.rep, fick.rep);
    }
    if (contrastive && item.obstinate) {
      run_forward(params, *item.obstinate, obst);
      row.d_o = cosine_distance(orig.rep, obst.rep);
    }
    if (!std::isfinite(row_loss(row, spec))) {
      throw Error("non-finite loss at example id " + std::to_string(item.original.id));
    }

    if (with_gradient) {
      DistanceWeights w;
      if (spec.kind == LossKind::bat_pair) w = pairwise_weights(row, spec.alpha, spec.beta, spec.margin);
      if (spec.kind == LossKind::bat_triplet) w = triplet_weights(row, spec.lambda, spec.margin);

      std::vector<double> dlogits(orig.probs);
      dlogits[y] -= 1.0;
      for (auto& g : dlogits) g *= inv_batch;
      std::vector<double> drep(params.shape.hidden, 0.0);
      if (w.d_f != 0.0) {
        std::vector<double> dvar(params.shape.hidden, 0.0);
        add_distance_gradient(orig.rep, fick.rep, w.d_f * inv_batch, drep);
        add_distance_gradient(fick.rep, orig.rep, w.d_f * inv_batch, dvar);
        run_backward(params, *item.fickle, fick, {}, std::move(dvar), result.grad);
      }
      if (w.d_o != 0.0) {
        std::vector<double> dvar(params.shape.hidden, 0.0);
        add_distance_gradient(orig.rep, obst.rep, w.d_o * inv_batch, drep);
        add_distance_gradient(obst.rep, orig.rep, w.d_o * inv_batch, dvar);
        run_backward(params, *item.obstinate, obst, {}, std::move(dvar), result.grad);
      }
      run_backward(params, item.original, orig, dlogits, std::move(drep), result.grad);
    }
    result.terms.push_back(row);
  }
  result.loss = batch_loss(result.terms, spec);
  if (!std::isfinite(result.loss)) throw Error("non-finite batch loss");
  return result;
}

}  // namespace

ForwardOutput forward(const ModelParams& params, const Example& ex) {
  Activations a;
  run_forward(params, ex, a);
  return {std::move(a.rep), std::move(a.logits), std::move(a.probs)};
}

GradientResult compute_gradients(const ModelParams& params, std::span<const TrainingItem> batch,
                                 const LossSpec& spec) {
  return run_batch(params, batch, spec, true);
}

double evaluate_loss(const ModelParams& params, std::span<const TrainingItem> batch, const LossSpec& spec) {
  return run_batch(params, batch, spec, false).loss;
}

}  // namespace batforge
