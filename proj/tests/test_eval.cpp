#include <cmath>
#include <random>
#include <sstream>

#include "diffhash/error.hpp"
#include "diffhash/eval.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace diffhash;

namespace {

std::vector<std::size_t> random_distances(std::mt19937_64& gen, std::size_t count, std::size_t m, double p) {
  std::binomial_distribution<std::size_t> bd(m, p);
  std::vector<std::size_t> out(count);
  for (auto& d : out) d = bd(gen);
  return out;
}

std::vector<double> euclid(const DescriptorSet& d, const PairSet& s) {
  std::vector<double> out;
  for (const IndexPair& p : s.pairs) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d.dim(); ++j) {
      const double diff = d.row(p.first)[j] - d.row(p.second)[j];
      acc += diff * diff;
    }
    out.push_back(std::sqrt(acc));
  }
  return out;
}

}  // namespace

TEST_CASE("roc by hand") {
  const std::vector<std::size_t> pos{0, 1, 1, 3};
  const std::vector<std::size_t> neg{1, 2, 4, 4};
  const RocCurve c = roc(pos, neg, 4);
  CHECK(c.m == 4);
  CHECK(c.tpr == std::vector<double>{0.25, 0.75, 0.75, 1.0, 1.0});
  CHECK(c.fpr == std::vector<double>{0.0, 0.25, 0.5, 0.5, 1.0});
  CHECK(auc(c) == doctest::Approx(oracle::rank_auc(pos, neg)).epsilon(1e-12));
  CHECK_THROWS_AS(roc({}, neg, 4), InputError);
  CHECK_THROWS_AS(roc(pos, std::vector<std::size_t>{5}, 4), InputError);
}

TEST_CASE("roc and auc agree with brute-force oracles") {
  std::mt19937_64 gen(61);
  for (std::size_t m : {1u, 8u, 32u, 64u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto pos = random_distances(gen, 150, m, 0.3);
      const auto neg = random_distances(gen, 300, m, 0.5);
      const RocCurve c = roc(pos, neg, m);
      const oracle::Roc o = oracle::roc(pos, neg, m);
      CHECK(c.fpr == o.fpr);
      CHECK(c.tpr == o.tpr);
      CHECK(c.fpr.back() == 1.0);
      CHECK(c.tpr.back() == 1.0);
      // Trapezoids over integer radii reproduce the tie-aware rank statistic.
      CHECK(std::abs(auc(c) - oracle::rank_auc(pos, neg)) <= 1e-12);
      const double a = auc(c);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
}

TEST_CASE("operating points") {
  RocCurve c;
  c.m = 3;
  c.fpr = {0.0, 0.0005, 0.002, 1.0};
  c.tpr = {0.4, 0.7, 0.9, 1.0};
  const OperatingPoint op = operating_point(c, 0.001);
  REQUIRE(op.radius.has_value());
  CHECK(*op.radius == 1);
  CHECK(op.fnr == doctest::Approx(0.3));
  CHECK(fnr_at_fpr(c, 0.0) == doctest::Approx(0.6));
  CHECK(fnr_at_fpr(c, 1.0) == 0.0);

  c.fpr = {0.01, 0.02, 0.5, 1.0};
  const OperatingPoint none = operating_point(c, 0.001);
  CHECK_FALSE(none.radius.has_value());
  CHECK(none.fnr == 1.0);

  std::mt19937_64 gen(62);
  const RocCurve r = roc(random_distances(gen, 500, 32, 0.3), random_distances(gen, 500, 32, 0.5), 32);
  double prev = 1.0;
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const double f = fnr_at_fpr(r, t);
    CHECK(f <= prev);
    prev = f;
  }
}

TEST_CASE("pair_distances") {
  CodeSet codes(4);
  for (std::uint64_t w : {0b0000U, 0b0011U, 0b1111U}) {
    BitHash h(4);
    h.words[0] = w;
    codes.push_back(h);
  }
  const PairSet s = make_pair_set(PairLabel::positive, std::vector<IndexPair>{{0, 1}, {0, 2}, {1, 2}}, 3);
  CHECK(pair_distances(codes, s) == std::vector<std::size_t>{2, 4, 2});
  CHECK_THROWS_AS(pair_distances(codes, make_pair_set(PairLabel::positive, std::vector<IndexPair>{{0, 3}}, 4)),
                  InputError);
}

TEST_CASE("euclidean_baseline") {
  std::mt19937_64 gen(63);
  const DescriptorSet d(testing::random_matrix(gen, 80, 5));
  const PairSet pos = testing::random_pairs(gen, 80, 60, PairLabel::positive);
  const PairSet neg = testing::random_pairs(gen, 80, 90, PairLabel::negative);
  const ThresholdRoc b = euclidean_baseline(d, pos, neg);
  CHECK(std::abs(auc(b) - oracle::rank_auc(euclid(d, pos), euclid(d, neg))) <= 1e-12);
  CHECK(b.fpr.back() == 1.0);
  CHECK(b.tpr.back() == 1.0);
  for (std::size_t i = 1; i < b.thresholds.size(); ++i) CHECK(b.thresholds[i - 1] < b.thresholds[i]);

  // Rates are invariant to scaling the data; thresholds scale with it.
  Matrix scaled = d.rows();
  for (double& v : scaled.data()) v *= 4.0;
  const ThresholdRoc s = euclidean_baseline(DescriptorSet(scaled), pos, neg);
  CHECK(s.fpr == b.fpr);
  CHECK(s.tpr == b.tpr);
  for (std::size_t i = 0; i < b.thresholds.size(); ++i) CHECK(s.thresholds[i] == doctest::Approx(4.0 * b.thresholds[i]));

  const ThresholdOperatingPoint op = operating_point(b, 0.1);
  REQUIRE(op.threshold.has_value());
  std::size_t fp = 0, fn = 0;
  for (double v : euclid(d, neg)) fp += v <= *op.threshold;
  for (double v : euclid(d, pos)) fn += v > *op.threshold;
  CHECK(static_cast<double>(fp) / 90.0 <= 0.1);
  CHECK(op.fnr == doctest::Approx(static_cast<double>(fn) / 60.0));
}

TEST_CASE("roc_csv") {
  RocCurve c;
  c.m = 2;
  c.fpr = {0.0, 0.5, 1.0};
  c.tpr = {0.25, 1.0 / 3.0, 1.0};
  std::istringstream in(roc_csv(c));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "radius,fpr,tpr,fnr");
  CHECK(lines[1] == "0,0,0.25,0.75");
  CHECK(lines[2] == "1,0.5,0.333333333,0.666666667");

  const ThresholdRoc t = threshold_roc(std::vector<double>{0.5}, std::vector<double>{1.5});
  CHECK(roc_csv(t) == "threshold,fpr,tpr,fnr\n0.5,0,1,0\n1.5,1,1,0\n");
}
