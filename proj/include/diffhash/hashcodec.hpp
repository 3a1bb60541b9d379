#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "diffhash/dataset.hpp"
#include "diffhash/train_kernel.hpp"
#include "diffhash/train_linear.hpp"

namespace diffhash {

using HashModel = std::variant<LinearHashModel, KernelHashModel>;

inline std::size_t words_for_bits(std::size_t m) { return (m + 63) / 64; }

/// m-bit code. Bit j lives in bit (j % 64) of words[j / 64]; a set bit means
/// hash coordinate +1. Bits past m in the last word are always zero.
struct BitHash {
  std::size_t m = 0;
  std::vector<std::uint64_t> words;

  BitHash() = default;
  explicit BitHash(std::size_t bits) : m(bits), words(words_for_bits(bits), 0) {}

  bool bit(std::size_t j) const { return (words[j / 64] >> (j % 64)) & 1U; }
  void set(std::size_t j) { words[j / 64] |= std::uint64_t{1} << (j % 64); }

  friend bool operator==(const BitHash&, const BitHash&) = default;
};

/// Contiguous batch of codes with a common length.
class CodeSet {
 public:
  CodeSet() = default;
  explicit CodeSet(std::size_t m) : m_(m), stride_(words_for_bits(m)) {}

  std::size_t bits() const { return m_; }
  std::size_t stride() const { return stride_; }
  std::size_t size() const { return stride_ == 0 ? 0 : words_.size() / stride_; }

  std::span<const std::uint64_t> words(std::size_t i) const { return {words_.data() + i * stride_, stride_}; }
  BitHash at(std::size_t i) const;
  void push_back(const BitHash& h);

  const std::vector<std::uint64_t>& raw() const { return words_; }

  friend bool operator==(const CodeSet&, const CodeSet&) = default;

 private:
  std::size_t m_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t model_dim(const HashModel& model);
std::size_t model_bits(const HashModel& model);
std::span<const double> model_thresholds(const HashModel& model);

/// Linear: P x. Kernel: B k(x).
std::vector<double> project(const HashModel& model, std::span<const double> x);

/// Bit i set iff project(model, x)[i] + a[i] >= 0.
BitHash encode(const HashModel& model, std::span<const double> x);
CodeSet encode_all(const HashModel& model, const DescriptorSet& data);

/// popcount(h1 xor h2); throws InputError on a length mismatch.
std::size_t hamming(const BitHash& h1, const BitHash& h2);
std::size_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

struct Match {
  std::size_t index;
  std::size_t distance;
  friend bool operator==(const Match&, const Match&) = default;
};

/// k nearest codes by Hamming distance, ties by ascending index.
std::vector<Match> knn(const BitHash& query, const CodeSet& db, std::size_t k);

/// DHB1: "DHB1", u32 m, u64 N, then N * ceil(m/64) u64 words, little-endian.
std::string serialize_codes(const CodeSet& codes);
CodeSet parse_codes(const std::string& bytes);
void save_codes(const CodeSet& codes, const std::filesystem::path& path);
CodeSet load_codes(const std::filesystem::path& path);

}  // namespace diffhash
