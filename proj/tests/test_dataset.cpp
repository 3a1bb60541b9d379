#include <cmath>
#include <numeric>
#include <set>

#include "diffhash/dataset.hpp"
#include "diffhash/error.hpp"
#include "doctest.h"
#include "support/test_util.hpp"

using namespace diffhash;

namespace {

double mean_distance(const SynthData& d, const PairSet& s) {
  double total = 0.0;
  for (const IndexPair& p : s.pairs) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < d.descriptors.dim(); ++j) {
      const double diff = d.descriptors.row(p.first)[j] - d.descriptors.row(p.second)[j];
      d2 += diff * diff;
    }
    total += std::sqrt(d2);
  }
  return total / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("CSV descriptors") {
  SUBCASE("2x2") {
    const DescriptorSet d = parse_descriptors_csv("1,0\n0,1");
    CHECK(d.dim() == 2);
    CHECK(d.size() == 2);
    CHECK(d.rows() == Matrix(2, 2, {1, 0, 0, 1}));
    CHECK(d.ids() == std::vector<std::string>{"0", "1"});
  }
  SUBCASE("nan cell names row and column") {
    try {
      parse_descriptors_csv("1,2\n3,nan\n");
      FAIL("expected an error");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("row 1, column 1") != std::string::npos);
    }
  }
  SUBCASE("inconsistent width") { CHECK_THROWS_AS(parse_descriptors_csv("1,2\n3\n"), InputError); }
  SUBCASE("garbage cell") { CHECK_THROWS_AS(parse_descriptors_csv("1,abc\n"), InputError); }
  SUBCASE("empty file") { CHECK_THROWS_AS(parse_descriptors_csv("\n\n"), InputError); }
  SUBCASE("overflowing float") { CHECK_THROWS_AS(parse_descriptors_csv("1e300\n"), InputError); }
}

TEST_CASE("DHD1 round trip is bit exact and agrees with CSV") {
  testing::TempDir dir;
  const SynthData s = gen_synthetic({SynthPreset::gaussian_clusters, 40, 5, 0.3, 10, 10, 4});
  save_descriptors_dhd1(s.descriptors, dir / "d.dhd1");
  save_descriptors_csv(s.descriptors, dir / "d.csv");
  const DescriptorSet bin = load_descriptors(dir / "d.dhd1");
  const DescriptorSet csv = load_descriptors(dir / "d.csv");
  CHECK(bin == s.descriptors);
  CHECK(csv == bin);

  save_descriptors_dhd1(bin, dir / "again.dhd1");
  CHECK(testing::slurp(dir / "d.dhd1") == testing::slurp(dir / "again.dhd1"));
  CHECK(testing::slurp(dir / "d.dhd1").size() == 16 + 40 * 5 * 4);
}

TEST_CASE("DHD1 malformed input") {
  CHECK_THROWS_AS(parse_descriptors_dhd1("DHD"), InputError);
  std::string header = "DHD1";
  header += std::string("\x02\x00\x00\x00", 4);
  header += std::string("\x01\x00\x00\x00\x00\x00\x00\x00", 8);
  CHECK_THROWS_AS(parse_descriptors_dhd1(header + "abc"), InputError);
  // +inf in a float payload.
  CHECK_THROWS_AS(parse_descriptors_dhd1(header + std::string("\x00\x00\x80\x7f\x00\x00\x80\x3f", 8)), InputError);
  CHECK(parse_descriptors_dhd1(header + std::string("\x00\x00\x00\x00\x00\x00\x80\x3f", 8)).rows() ==
        Matrix(1, 2, {0.0, 1.0}));
}

TEST_CASE("pair files") {
  SUBCASE("canonicalization merges reversed duplicates") {
    const PairSet p = parse_pairs("0 1\n1 0\n", PairLabel::positive, 3);
    CHECK(p.pairs == std::vector<IndexPair>{{0, 1}});
  }
  SUBCASE("out of range") { CHECK_THROWS_AS(parse_pairs("0 5\n", PairLabel::positive, 3), InputError); }
  SUBCASE("duplicate line") {
    const PairSet p = parse_pairs("0 1\n2 1\n0 1\n", PairLabel::negative, 3);
    CHECK(p.size() == 2);
    CHECK(p.label == PairLabel::negative);
  }
  SUBCASE("comments and blanks") {
    const PairSet p = parse_pairs("# header\n\n 2 0 \n", PairLabel::positive, 3);
    CHECK(p.pairs == std::vector<IndexPair>{{0, 2}});
  }
  SUBCASE("degenerate pairs need the flag") {
    CHECK_THROWS_AS(parse_pairs("1 1\n", PairLabel::positive, 3), InputError);
    CHECK(parse_pairs("1 1\n", PairLabel::positive, 3, true).size() == 1);
  }
  SUBCASE("malformed lines") {
    CHECK_THROWS_AS(parse_pairs("0\n", PairLabel::positive, 3), InputError);
    CHECK_THROWS_AS(parse_pairs("0 1 2\n", PairLabel::positive, 3), InputError);
    CHECK_THROWS_AS(parse_pairs("-1 2\n", PairLabel::positive, 3), InputError);
  }
  SUBCASE("save then load") {
    testing::TempDir dir;
    const PairSet p = parse_pairs("3 1\n0 2\n", PairLabel::positive, 4);
    save_pairs(p, dir / "p.txt");
    CHECK(load_pairs(dir / "p.txt", PairLabel::positive, 4) == p);
  }
}

TEST_CASE("gen_synthetic gaussian-clusters") {
  SUBCASE("zero noise makes positives identical") {
    const SynthData s = gen_synthetic({SynthPreset::gaussian_clusters, 100, 6, 0.0, 30, 60, 1});
    CHECK(s.positives.size() == 30);
    CHECK(s.negatives.size() == 60);
    for (const IndexPair& p : s.positives.pairs) {
      CHECK(p.second == p.first + 1);
      for (std::size_t j = 0; j < 6; ++j) CHECK(s.descriptors.row(p.first)[j] == s.descriptors.row(p.second)[j]);
    }
    for (const IndexPair& p : s.negatives.pairs) CHECK(p.first / 2 != p.second / 2);
  }
  SUBCASE("same seed, same bytes; different seed, different data") {
    const SynthConfig cfg{SynthPreset::gaussian_clusters, 60, 4, 0.2, 20, 40, 77};
    const SynthData a = gen_synthetic(cfg);
    const SynthData b = gen_synthetic(cfg);
    CHECK(a.descriptors == b.descriptors);
    CHECK(a.positives == b.positives);
    CHECK(a.negatives == b.negatives);
    SynthConfig other = cfg;
    other.seed = 78;
    CHECK_FALSE(gen_synthetic(other).descriptors == a.descriptors);
  }
  SUBCASE("dense negative request enumerates every combination") {
    // 4 points, 2 centers: 6 pairs total, 2 positive-shaped, 4 negatives.
    const SynthData s = gen_synthetic({SynthPreset::gaussian_clusters, 4, 2, 0.1, 2, 4, 3});
    CHECK(s.negatives.size() == 4);
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::gaussian_clusters, 4, 2, 0.1, 2, 5, 3}), InputError);
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::gaussian_clusters, 4, 2, 0.1, 3, 1, 3}), InputError);
  }
  SUBCASE("config validation") {
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::gaussian_clusters, 3, 2, 0.1, 1, 1, 0}), InputError);
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::gaussian_clusters, 11, 2, 0.1, 1, 1, 0}), InputError);
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::gaussian_clusters, 10, 2, -1.0, 1, 1, 0}), InputError);
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::gaussian_clusters, 10, 2, 0.1, 1, 0, 0}), InputError);
    CHECK_THROWS_AS(gen_synthetic({SynthPreset::rings, 10, 1, 0.1, 1, 1, 0}), InputError);
  }
}

TEST_CASE("gen_synthetic rings") {
  const SynthData s = gen_synthetic({SynthPreset::rings, 1000, 8, 0.01, 2000, 2000, 5});
  CHECK(s.descriptors.size() == 1000);
  CHECK(s.positives.size() == 2000);
  // Positives stay on one ring, negatives cross rings.
  for (const IndexPair& p : s.positives.pairs) CHECK((p.first < 500) == (p.second < 500));
  for (const IndexPair& p : s.negatives.pairs) CHECK((p.first < 500) != (p.second < 500));
  // Positives are angular neighbors.
  for (const IndexPair& p : s.positives.pairs) {
    const auto a = s.descriptors.row(p.first);
    const auto b = s.descriptors.row(p.second);
    double gap = std::abs(std::atan2(a[1], a[0]) - std::atan2(b[1], b[0]));
    gap = std::min(gap, 2 * 3.141592653589793 - gap);
    CHECK(gap <= 0.1 + 0.05);
  }
  CHECK(mean_distance(s, s.positives) < mean_distance(s, s.negatives));
}

TEST_CASE("split_pairs") {
  std::vector<IndexPair> raw;
  for (std::size_t i = 0; i < 10; ++i) raw.push_back({i, i + 10});
  const PairSet all = make_pair_set(PairLabel::positive, raw, 20);

  SUBCASE("disjoint partition of the right size") {
    const auto [train, test] = split_pairs(all, 0.5, 3);
    CHECK(train.size() == 5);
    CHECK(test.size() == 5);
    std::multiset<IndexPair> merged(train.pairs.begin(), train.pairs.end());
    merged.insert(test.pairs.begin(), test.pairs.end());
    CHECK(merged == std::multiset<IndexPair>(all.pairs.begin(), all.pairs.end()));
    std::set<IndexPair> t(train.pairs.begin(), train.pairs.end());
    for (const IndexPair& p : test.pairs) CHECK(t.count(p) == 0);
  }
  SUBCASE("deterministic in the seed") {
    CHECK(split_pairs(all, 0.7, 9).first == split_pairs(all, 0.7, 9).first);
    CHECK(split_pairs(all, 0.7, 9).first.size() == 7);
  }
  SUBCASE("empty side is an error") {
    const PairSet two = make_pair_set(PairLabel::positive, std::vector<IndexPair>{{0, 1}, {1, 2}}, 3);
    CHECK_THROWS_AS(split_pairs(two, 0.9999, 1), InputError);
    CHECK_THROWS_AS(split_pairs(two, 0.0, 1), InputError);
    CHECK_THROWS_AS(split_pairs(make_pair_set(PairLabel::positive, std::vector<IndexPair>{{0, 1}}, 3), 0.5, 1),
                    InputError);
  }
}
