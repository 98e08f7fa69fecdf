#include "batforge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "batforge/error.hpp"
#include "batforge/kernels.hpp"
#include "batforge/losses.hpp"
#include "batforge/parallel.hpp"

namespace batforge {

double accuracy(const Classifier& model, const Dataset& data) {
  if (data.examples.empty()) throw Error("accuracy of an empty dataset");
  std::vector<char> correct(data.examples.size(), 0);
  parallel_for(data.examples.size(), [&](std::size_t i) {
    const auto& ex = data.examples[i];
    correct[i] = argmax(model.probabilities(ex)) == ex.label ? 1 : 0;
  });
  std::size_t hits = 0;
  for (char c : correct) hits += static_cast<std::size_t>(c);
  return static_cast<double>(hits) / static_cast<double>(data.examples.size());
}

double AsrResult::asr() const {
  if (!defined()) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(successes) / static_cast<double>(eligible);
}

AsrResult asr_from_outcomes(AttackKind kind, std::span<const AttackOutcome> outcomes) {
  AsrResult r;
  r.kind = kind;
  for (const auto& o : outcomes) {
    ++r.attempted;
    if (o.failure_reason == FailureReason::ineligible || o.failure_reason == FailureReason::no_candidates) continue;
    ++r.eligible;
    if (o.success) ++r.successes;
  }
  return r;
}

AsrResult attack_success_rate(const Classifier& model, const Dataset& data, AttackKind kind,
                              const AttackConfig& cfg, const PerturbationSpace& space, const ToyOracle* oracle) {
  if (data.examples.empty()) throw Error("attack success rate of an empty dataset");
  std::vector<AttackOutcome> outcomes(data.examples.size());
  parallel_for(data.examples.size(), [&](std::size_t i) {
    outcomes[i] = run_attack(kind, model, data.examples[i], cfg, space, oracle);
  });
  AsrResult r = asr_from_outcomes(kind, outcomes);
  r.outcomes = std::move(outcomes);
  return r;
}

std::string_view group_name(Group g) {
  switch (g) {
    case Group::original:
      return "original";
    case Group::fickle:
      return "fickle";
    case Group::obstinate:
      return "obstinate";
  }
  return "?";
}

std::vector<Example> select_probe_sample(const Dataset& data, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    if (data.task == TaskKind::nli && data.examples[i].label == nli_label::neutral) continue;
    pool.push_back(i);
  }
  Rng rng = make_rng(seed, "probe");
  shuffle_range(pool.begin(), pool.end(), rng);
  pool.resize(std::min(n, pool.size()));
  std::sort(pool.begin(), pool.end());
  std::vector<Example> out;
  out.reserve(pool.size());
  for (std::size_t i : pool) out.push_back(data.examples[i]);
  return out;
}

std::vector<RepresentationRow> export_representations(const ModelParams& params, std::span<const Example> sample,
                                                      const SubstitutionTables& tables, Rng& rng) {
  std::vector<RepresentationRow> rows;
  rows.reserve(3 * sample.size());
  for (const auto& ex : sample) {
    rows.push_back({ex.id, Group::original, forward(params, ex).representation});
    const auto fickle = random_synonym_perturb(ex, tables, rng);
    rows.push_back({ex.id, Group::fickle, forward(params, fickle.example).representation});
    if (const auto obstinate = random_antonym_perturb(ex, tables, rng)) {
      rows.push_back({ex.id, Group::obstinate, forward(params, obstinate->example).representation});
    }
  }
  return rows;
}

DistanceSummary representation_distances(std::span<const RepresentationRow> rows) {
  DistanceSummary s;
  const RepresentationRow* anchor = nullptr;
  double sum_f = 0.0;
  double sum_o = 0.0;
  for (const auto& row : rows) {
    if (row.group == Group::original) {
      anchor = &row;
      continue;
    }
    if (anchor == nullptr || anchor->id != row.id) throw Error("perturbed row without its original");
    const double d = cosine_distance(anchor->representation, row.representation);
    if (row.group == Group::fickle) {
      sum_f += d;
      ++s.fickle_rows;
    } else {
      sum_o += d;
      ++s.obstinate_rows;
    }
  }
  if (s.fickle_rows) s.mean_d_f = sum_f / static_cast<double>(s.fickle_rows);
  if (s.obstinate_rows) s.mean_d_o = sum_o / static_cast<double>(s.obstinate_rows);
  return s;
}

namespace {

constexpr int kPowerIterations = 200;

void normalize_in_place(std::vector<double>& v, double& norm) {
  norm = std::sqrt(kernels::dot(v, v));
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
}

// Largest-magnitude component made positive so the output does not depend
// on the sign the iteration happened to settle on.
void fix_sign(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

std::vector<double> start_vector(std::size_t d) {
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + 1.0 / static_cast<double>(i + 2);
  double n;
  normalize_in_place(v, n);
  return v;
}

// Power iteration on cov restricted to the complement of `against`.
std::vector<double> dominant_direction(const std::vector<double>& cov, std::size_t d,
                                       const std::vector<double>* against, double& eigenvalue) {
  kernels::ConstMatrixView c{cov.data(), d, d};
  auto v = start_vector(d);
  auto project_out = [&](std::vector<double>& x) {
    if (against) kernels::axpy(-kernels::dot(x, *against), *against, x);
  };
  project_out(v);
  double norm;
  normalize_in_place(v, norm);
  if (!(norm > 0.0)) {
    eigenvalue = 0.0;
    return std::vector<double>(d, 0.0);
  }
  std::vector<double> next(d);
  for (int it = 0; it < kPowerIterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    kernels::gemv(c, v, next);
    project_out(next);
    normalize_in_place(next, norm);
    if (!(norm > 0.0)) {
      eigenvalue = 0.0;
      return std::vector<double>(d, 0.0);
    }
    v.swap(next);
  }
  std::fill(next.begin(), next.end(), 0.0);
  kernels::gemv(c, v, next);
  eigenvalue = kernels::dot(v, next);
  return v;
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

ProjectionOutput pca_project(std::span<const RepresentationRow> rows) {
  if (rows.size() < 3) throw Error("projection needs at least 3 rows");
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().representation.size();
  for (const auto& r : rows) {
    if (r.representation.size() != d) throw Error("representation rows of unequal length");
  }
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) kernels::axpy(1.0 / static_cast<double>(n), r.representation, mean);
  std::vector<double> centered(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[i * d + j] = rows[i].representation[j] - mean[j];
  }
  std::vector<double> cov(d * d, 0.0);
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> x(centered.data() + i * d, d);
    kernels::ger(scale, x, x, {cov.data(), d, d});
  }

  double lambda1 = 0.0;
  double lambda2 = 0.0;
  auto axis1 = dominant_direction(cov, d, nullptr, lambda1);
  // Deflate the first direction before searching for the second.
  std::vector<double> deflated = cov;
  kernels::ger(-lambda1, axis1, axis1, {deflated.data(), d, d});
  auto axis2 = dominant_direction(deflated, d, &axis1, lambda2);

  ProjectionOutput out;
  const double trace_scale = std::max(lambda1, std::numeric_limits<double>::min());
  if (!(lambda1 > 0.0)) {
    out.rank_deficient = true;
    std::fill(axis1.begin(), axis1.end(), 0.0);
    std::fill(axis2.begin(), axis2.end(), 0.0);
  } else if (!(lambda2 > 1e-12 * trace_scale)) {
    out.rank_deficient = true;
    std::fill(axis2.begin(), axis2.end(), 0.0);
  }
  fix_sign(axis1);
  fix_sign(axis2);

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> x(centered.data() + i * d, d);
    xs[i] = kernels::dot(x, axis1);
    ys[i] = kernels::dot(x, axis2);
  }
  if (sample_variance(ys) > sample_variance(xs)) xs.swap(ys);
  out.variance[0] = sample_variance(xs);
  out.variance[1] = sample_variance(ys);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.points.push_back({rows[i].id, rows[i].group, xs[i], ys[i]});
  return out;
}

MetricsRecord evaluate_model(const ModelParams& params, const EvalSetup& setup, std::size_t epoch,
                             const std::string& regime) {
  if (setup.data == nullptr || setup.space == nullptr) throw std::invalid_argument("incomplete eval setup");
  const ModelClassifier model(params);
  MetricsRecord r;
  r.epoch = epoch;
  r.regime = regime;
  r.accuracy = accuracy(model, *setup.data);

  Dataset attacked;
  attacked.task = setup.data->task;
  const std::size_t limit = setup.asr_limit == 0 ? setup.data->size() : std::min(setup.asr_limit, setup.data->size());
  attacked.examples.assign(setup.data->examples.begin(),
                           setup.data->examples.begin() + static_cast<std::ptrdiff_t>(limit));
  auto summarize = [&](AttackKind kind) {
    const auto res = attack_success_rate(model, attacked, kind, setup.attack, *setup.space, setup.oracle);
    return AsrSummary{res.asr(), res.eligible, res.successes, true};
  };
  r.synonym = summarize(AttackKind::synonym);
  r.antonym = summarize(AttackKind::antonym);
  if (setup.negation) {
    r.negation = summarize(AttackKind::negation);
  } else {
    r.negation.asr = std::numeric_limits<double>::quiet_NaN();
  }

  const auto sample = select_probe_sample(*setup.data, setup.probe_size, setup.seed);
  Rng rng = make_rng(setup.seed, "probe-perturb");
  const auto rows = export_representations(params, sample, setup.space->tables(), rng);
  const auto dist = representation_distances(rows);
  r.mean_d_f = dist.mean_d_f;
  r.mean_d_o = dist.mean_d_o;
  r.probe_size = sample.size();
  return r;
}

std::vector<MetricsRecord> tradeoff_curve(std::span<const EpochCheckpoint> checkpoints, const EvalSetup& setup,
                                          const std::string& regime) {
  if (checkpoints.empty()) throw Error("tradeoff curve needs at least one checkpoint");
  std::vector<const EpochCheckpoint*> order;
  for (const auto& c : checkpoints) {
    check_compatible(c.params, setup.space->vocab(), setup.data->num_classes());
    order.push_back(&c);
  }
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->epoch < b->epoch; });
  std::vector<MetricsRecord> out;
  out.reserve(order.size());
  for (const auto* c : order) out.push_back(evaluate_model(c->params, setup, c->epoch, regime));
  return out;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_metrics_header(std::ostream& out) {
  out << "epoch,regime,accuracy,synonym_asr,antonym_asr,negation_asr,mean_d_f,mean_d_o\n";
}

void write_metrics_row(std::ostream& out, const MetricsRecord& r) {
  out << r.epoch << ',' << r.regime << ',' << fmt(r.accuracy) << ',' << fmt(r.synonym.asr) << ','
      << fmt(r.antonym.asr) << ',' << fmt(r.negation.asr) << ',' << fmt(r.mean_d_f) << ',' << fmt(r.mean_d_o)
      << '\n';
}

void write_projection_csv(std::ostream& out, const ProjectionOutput& projection) {
  out << "id,group,x,y\n";
  for (const auto& p : projection.points) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f", p.x, p.y);
    out << p.id << ',' << group_name(p.group) << ',' << buf << '\n';
  }
}

}  // namespace batforge
