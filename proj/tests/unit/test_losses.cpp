#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "batforge/error.hpp"
#include "batforge/losses.hpp"

using namespace batforge;

namespace {

constexpr double kTol = 1e-9;

TermRow row(double ce, std::optional<double> d_f, std::optional<double> d_o) { return TermRow{ce, d_f, d_o}; }

}  // namespace

TEST_CASE("cosine distance") {
  const std::vector<double> a{1, 2, 3}, b{-1, -2, -3}, c{3, 0, -1}, z{0, 0, 0};
  CHECK(std::abs(cosine_distance(a, a)) < kTol);
  CHECK(std::abs(cosine_distance(a, b) - 2.0) < kTol);
  CHECK(std::abs(cosine_distance(a, c) - 1.0) < kTol);
  CHECK_THROWS_AS(cosine_distance(a, z), Error);
}

TEST_CASE("pairwise loss formula") {
  CHECK(std::abs(pairwise_row(row(0, 0.2, 0.4), 1.0, 1.2, 1.0) - 0.92) < kTol);
  // Hinge inactive once d_o reaches the margin.
  CHECK(std::abs(pairwise_row(row(0, 0.2, 1.0), 1.0, 1.2, 1.0) - 0.2) < kTol);
  CHECK(std::abs(pairwise_row(row(0, 0.2, 1.7), 1.0, 1.2, 1.0) - 0.2) < kTol);
  // Masking.
  CHECK(pairwise_row(row(0.7, std::nullopt, std::nullopt), 1.0, 1.2, 1.0) == 0.7);
  CHECK(std::abs(pairwise_row(row(0.7, std::nullopt, 0.4), 1.0, 1.2, 1.0) - (0.7 + 0.72)) < kTol);
  CHECK(std::abs(pairwise_row(row(0.7, 0.3, std::nullopt), 1.0, 1.2, 1.0) - 1.0) < kTol);

  const std::vector<TermRow> batch{row(0.5, 0.2, 0.4), row(0.1, std::nullopt, std::nullopt)};
  CHECK(std::abs(pairwise_loss(batch, 1.0, 1.2, 1.0) - (1.42 + 0.1) / 2.0) < kTol);
  CHECK(std::abs(cross_entropy_loss(batch) - 0.3) < kTol);
  CHECK_THROWS_AS(pairwise_loss(std::vector<TermRow>{}, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("triplet loss formula") {
  CHECK(std::abs(triplet_row(row(0, 0.1, 0.9), 1.0, 1.0) - 0.2) < kTol);
  CHECK(triplet_row(row(0, 0.1, 1.1), 1.0, 1.0) == 0.0);
  CHECK(triplet_row(row(0, 0.1, 1.5), 1.0, 1.0) == 0.0);
  // Only the obstinate variant masked: m - d_o is replaced by 0.
  CHECK(std::abs(triplet_row(row(0, 0.3, std::nullopt), 1.0, 1.0) - 0.3) < kTol);
  // Only the fickle variant masked.
  CHECK(std::abs(triplet_row(row(0, std::nullopt, 0.6), 1.0, 1.0) - 0.4) < kTol);
  CHECK(triplet_row(row(0.4, std::nullopt, std::nullopt), 2.0, 1.0) == 0.4);
  CHECK(std::abs(triplet_row(row(0.25, 0.5, 0.5), 2.0, 1.0) - 2.25) < kTol);
  const std::vector<TermRow> batch{row(0, 0.1, 0.9), row(1, 0.3, std::nullopt)};
  CHECK(std::abs(triplet_loss(batch, 1.0, 1.0) - 0.75) < kTol);
  CHECK_THROWS_AS(triplet_loss(std::vector<TermRow>{}, 1, 1), std::invalid_argument);
}

TEST_CASE("losses are nondecreasing in their weights") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> d(0.0, 2.0), w(0.0, 3.0), ce(0.0, 4.0);
  for (int t = 0; t < 2000; ++t) {
    std::vector<TermRow> rows;
    for (int i = 0; i < 4; ++i) {
      std::optional<double> df, dob;
      if (g() % 4) df = d(g);
      if (g() % 4) dob = d(g);
      rows.push_back(row(ce(g), df, dob));
    }
    const double m = d(g), a = w(g), b = w(g), l = w(g), step = w(g);
    const double base = pairwise_loss(rows, a, b, m);
    CHECK(pairwise_loss(rows, a + step, b, m) >= base);
    CHECK(pairwise_loss(rows, a, b + step, m) >= base);
    CHECK(triplet_loss(rows, l + step, m) >= triplet_loss(rows, l, m));
  }
}

TEST_CASE("distance weights") {
  const auto p = pairwise_weights(row(0, 0.2, 0.4), 1.0, 1.2, 1.0);
  CHECK(p.d_f == 1.0);
  CHECK(p.d_o == -1.2);
  // At the kink the hinge is inactive.
  CHECK(pairwise_weights(row(0, 0.2, 1.0), 1.0, 1.2, 1.0).d_o == 0.0);
  CHECK(triplet_weights(row(0, 0.1, 1.1), 1.0, 1.0).d_f == 0.0);
  CHECK(triplet_weights(row(0, 0.1, 1.1), 1.0, 1.0).d_o == 0.0);
  const auto t = triplet_weights(row(0, 0.1, 0.9), 2.0, 1.0);
  CHECK(t.d_f == 2.0);
  CHECK(t.d_o == -2.0);
  const auto masked = triplet_weights(row(0, std::nullopt, std::nullopt), 2.0, 1.0);
  CHECK(masked.d_f == 0.0);
  CHECK(masked.d_o == 0.0);
  CHECK(pairwise_weights(row(0, std::nullopt, 0.1), 1.0, 1.2, 1.0).d_f == 0.0);

  // Weights match finite differences of the row loss away from kinks.
  std::mt19937_64 g(10);
  std::uniform_real_distribution<double> d(0.05, 1.95);
  const double h = 1e-6;
  for (int i = 0; i < 500; ++i) {
    const TermRow r = row(0.3, d(g), d(g));
    const double m = 1.0;
    const auto wp = pairwise_weights(r, 0.7, 1.3, m);
    const auto wt = triplet_weights(r, 1.1, m);
    auto shift = [&](double df, double dob) { return row(r.ce, *r.d_f + df, *r.d_o + dob); };
    if (std::abs(m - *r.d_o) > 1e-3) {
      CHECK(std::abs((pairwise_row(shift(0, h), 0.7, 1.3, m) - pairwise_row(shift(0, -h), 0.7, 1.3, m)) / (2 * h) -
                     wp.d_o) < 1e-6);
    }
    CHECK(std::abs((pairwise_row(shift(h, 0), 0.7, 1.3, m) - pairwise_row(shift(-h, 0), 0.7, 1.3, m)) / (2 * h) -
                   wp.d_f) < 1e-6);
    if (std::abs(*r.d_f + m - *r.d_o) > 1e-3) {
      CHECK(std::abs((triplet_row(shift(h, 0), 1.1, m) - triplet_row(shift(-h, 0), 1.1, m)) / (2 * h) - wt.d_f) <
            1e-6);
      CHECK(std::abs((triplet_row(shift(0, h), 1.1, m) - triplet_row(shift(0, -h), 1.1, m)) / (2 * h) - wt.d_o) <
            1e-6);
    }
  }
}
