#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "diffhash/linalg.hpp"

namespace diffhash {

/// N descriptors of dimension n, stored row-major.
///
/// Values loaded from disk are rounded to 32-bit float precision, matching the
/// on-disk DHD1 representation, so text and binary inputs of the same content
/// compare equal and DHD1 save/load is lossless.
class DescriptorSet {
 public:
  DescriptorSet() = default;
  /// Throws InputError on non-finite values. Ids default to the row index.
  explicit DescriptorSet(Matrix rows, std::vector<std::string> ids = {});

  std::size_t dim() const { return rows_.cols(); }
  std::size_t size() const { return rows_.rows(); }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  const Matrix& rows() const { return rows_; }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Rows at the given indices, in order.
  Matrix gather(std::span<const std::size_t> indices) const;

  friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;

 private:
  Matrix rows_;
  std::vector<std::string> ids_;
};

enum class PairLabel { positive, negative };

struct IndexPair {
  std::size_t first;
  std::size_t second;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Labeled, canonical (first <= second), duplicate-free list of pairs.
struct PairSet {
  PairLabel label = PairLabel::positive;
  std::vector<IndexPair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  friend bool operator==(const PairSet&, const PairSet&) = default;
};

/// Canonicalizes each pair to first <= second and drops repeats, keeping the
/// first occurrence. Validates indices against `count`.
PairSet make_pair_set(PairLabel label, std::span<const IndexPair> pairs, std::size_t count,
                      bool allow_degenerate = false);

/// Sorted distinct descriptor indices referenced by any of the pair sets.
std::vector<std::size_t> referenced_indices(std::span<const PairSet* const> sets);

// File formats ---------------------------------------------------------------

/// Reads DHD1 (detected by magic) or headerless CSV.
DescriptorSet load_descriptors(const std::filesystem::path& path);
void save_descriptors_dhd1(const DescriptorSet& set, const std::filesystem::path& path);
void save_descriptors_csv(const DescriptorSet& set, const std::filesystem::path& path);
/// Picks CSV for a ".csv" extension, DHD1 otherwise.
void save_descriptors(const DescriptorSet& set, const std::filesystem::path& path);

DescriptorSet parse_descriptors_csv(const std::string& text);
DescriptorSet parse_descriptors_dhd1(const std::string& bytes);

/// Pair file: "i j" per line, 0-based, '#' comments and blank lines ignored.
PairSet load_pairs(const std::filesystem::path& path, PairLabel label, std::size_t count,
                   bool allow_degenerate = false);
PairSet parse_pairs(const std::string& text, PairLabel label, std::size_t count,
                    bool allow_degenerate = false);
void save_pairs(const PairSet& pairs, const std::filesystem::path& path);

// Synthetic data -------------------------------------------------------------

enum class SynthPreset { gaussian_clusters, rings };

struct SynthConfig {
  SynthPreset preset = SynthPreset::gaussian_clusters;
  std::size_t points = 1000;
  std::size_t dim = 8;
  double noise = 0.1;
  std::size_t pos_pairs = 400;
  std::size_t neg_pairs = 800;
  std::uint64_t seed = 0;
};

struct SynthData {
  DescriptorSet descriptors;
  PairSet positives;
  PairSet negatives;
};

/// gaussian-clusters: points/2 standard-normal centers, each emitted twice
/// (rows 2c and 2c+1) with noise * N(0, I) added. Positives join the two
/// copies of a center; negatives join copies of different centers.
///
/// rings: half the points on a radius-1 circle, half on a radius-3 circle, in
/// the first two coordinates at uniform angles, with noise * N(0, I) added to
/// every coordinate. Positives join same-ring points at most 0.1 rad apart;
/// negatives join points on different rings.
///
/// Pairs are sampled uniformly without replacement from the eligible set.
SynthData gen_synthetic(const SynthConfig& cfg);

/// Deterministic shuffle then split; |train| = round(ratio * |pairs|).
std::pair<PairSet, PairSet> split_pairs(const PairSet& pairs, double ratio, std::uint64_t seed);

}  // namespace diffhash
