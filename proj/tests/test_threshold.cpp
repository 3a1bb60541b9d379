#include <random>

#include "diffhash/error.hpp"
#include "diffhash/threshold.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace diffhash;

namespace {

using RawPairs = std::vector<std::pair<double, double>>;

std::vector<ProjectedPair> to_projected(const RawPairs& raw) {
  std::vector<ProjectedPair> out;
  for (const auto& [a, b] : raw) out.push_back({a, b});
  return out;
}

RawPairs random_raw(std::mt19937_64& gen, std::size_t count, double shift, bool quantize) {
  std::normal_distribution<double> nd(shift, 1.0);
  RawPairs out;
  for (std::size_t i = 0; i < count; ++i) {
    double a = nd(gen), b = nd(gen);
    if (quantize) {
      a = std::round(a * 4) / 4;
      b = std::round(b * 4) / 4;
    }
    out.push_back({a, b});
  }
  return out;
}

}  // namespace

TEST_CASE("rate_curves hand example") {
  const std::vector<ProjectedPair> pos{{0.5, 0.6}};
  const std::vector<ProjectedPair> neg{{-0.5, 0.7}};
  const RateCurves c = rate_curves(pos, neg);
  bool found = false;
  for (std::size_t k = 0; k < c.candidates.size(); ++k) {
    if (c.candidates[k] == 0.0) {
      found = true;
      CHECK(c.fnr[k] == 0.0);
      CHECK(c.fpr[k] == 0.0);
    }
  }
  CHECK(found);
  const ThresholdChoice best = choose_threshold(c, 25.0);
  CHECK(best.objective == 0.0);
  CHECK(best.threshold == 0.0);
}

TEST_CASE("rate_curves structure") {
  std::mt19937_64 gen(4);
  const auto pos = to_projected(random_raw(gen, 30, 0.0, true));
  const auto neg = to_projected(random_raw(gen, 40, 0.5, true));
  const RateCurves c = rate_curves(pos, neg);
  CHECK(c.candidates.size() == c.fnr.size());
  CHECK(c.candidates.size() == c.fpr.size());
  for (std::size_t k = 1; k < c.candidates.size(); ++k) CHECK(c.candidates[k - 1] < c.candidates[k]);
  for (std::size_t k = 0; k < c.candidates.size(); ++k) {
    CHECK(c.fnr[k] >= 0.0);
    CHECK(c.fnr[k] <= 1.0);
    CHECK(c.fpr[k] >= 0.0);
    CHECK(c.fpr[k] <= 1.0);
  }
  // Outermost thresholds put every value on one side: no false negatives,
  // every negative collides.
  CHECK(c.fnr.front() == 0.0);
  CHECK(c.fpr.front() == 1.0);
  CHECK(c.fnr.back() == 0.0);
  CHECK(c.fpr.back() == 1.0);
}

TEST_CASE("identical positive projections never split") {
  const std::vector<ProjectedPair> pos{{0.2, 0.2}, {-1.0, -1.0}, {3.0, 3.0}};
  const std::vector<ProjectedPair> neg{{0.0, 1.0}, {-2.0, 2.0}};
  const RateCurves c = rate_curves(pos, neg);
  for (double f : c.fnr) CHECK(f == 0.0);
}

TEST_CASE("rate_curves matches direct sign evaluation") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const RawPairs pos = random_raw(gen, 100, 0.0, trial % 2 == 0);
    const RawPairs neg = random_raw(gen, 100, 0.3, trial % 2 == 0);
    const RateCurves c = rate_curves(to_projected(pos), to_projected(neg));
    for (std::size_t k = 0; k < c.candidates.size(); ++k) {
      const auto [fnr, fpr] = oracle::rates(pos, neg, c.candidates[k]);
      CHECK(c.fnr[k] == fnr);
      CHECK(c.fpr[k] == fpr);
    }
  }
}

TEST_CASE("rate_curves rejects empty input") {
  const std::vector<ProjectedPair> one{{0.0, 1.0}};
  CHECK_THROWS_AS(rate_curves({}, one), InputError);
  CHECK_THROWS_AS(rate_curves(one, {}), InputError);
}

TEST_CASE("choose_threshold tie-breaking") {
  SUBCASE("zero-objective candidate wins") {
    const RateCurves c{{-1.0, 0.5, 2.0}, {0.2, 0.0, 0.1}, {0.5, 0.0, 0.1}};
    CHECK(optimal_threshold(c, 25.0) == 0.5);
  }
  SUBCASE("smaller |a| wins, then the smaller value") {
    const RateCurves c{{-0.7, -0.3, 0.3, 0.9}, {0.0, 0.0, 0.0, 0.0}, {0.5, 0.1, 0.1, 0.5}};
    CHECK(optimal_threshold(c, 1.0) == -0.3);
    const RateCurves d{{-0.7, -0.3, 0.1, 0.3}, {0.0, 0.0, 0.0, 0.0}, {0.5, 0.1, 0.1, 0.1}};
    CHECK(optimal_threshold(d, 1.0) == 0.1);
  }
  SUBCASE("huge alpha minimizes FNR first") {
    // Candidate 0 has the best FPR but worse FNR; candidates 1 and 2 share the
    // minimal FNR and differ in FPR.
    const RateCurves c{{-1.0, 0.0, 1.0}, {0.2, 0.1, 0.1}, {0.0, 0.9, 0.4}};
    CHECK(optimal_threshold(c, 1e9) == 1.0);
    CHECK(optimal_threshold(c, 1.0) == -1.0);
  }
}

TEST_CASE("choose_threshold is the exhaustive optimum and shift-equivariant") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const RawPairs pos = random_raw(gen, 40, 0.0, false);
    const RawPairs neg = random_raw(gen, 60, 0.2, false);
    const double alpha = trial % 3 == 0 ? 25.0 : 2.0;
    const RateCurves c = rate_curves(to_projected(pos), to_projected(neg));
    const ThresholdChoice best = choose_threshold(c, alpha);
    for (std::size_t k = 0; k < c.candidates.size(); ++k) CHECK(best.objective <= alpha * c.fnr[k] + c.fpr[k]);

    // Shifting projections by t shifts the optimum by -t (same bits).
    const double t = 0.25;  // exactly representable; sums below stay exact enough
    RawPairs pos_s = pos, neg_s = neg;
    for (auto& [a, b] : pos_s) a += t, b += t;
    for (auto& [a, b] : neg_s) a += t, b += t;
    const ThresholdChoice shifted = choose_threshold(rate_curves(to_projected(pos_s), to_projected(neg_s)), alpha);
    CHECK(shifted.objective == doctest::Approx(best.objective));
    const auto [fnr, fpr] = oracle::rates(pos_s, neg_s, shifted.threshold);
    CHECK(alpha * fnr + fpr == doctest::Approx(best.objective));
  }
}
