#include "diffhash/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "diffhash/error.hpp"
#include "diffhash/rng.hpp"

namespace diffhash {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(value >> (8 * i))));
  }
}

template <typename T>
T get_le(const std::string& bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string cell_name(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

double as_float_precision(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

DescriptorSet::DescriptorSet(Matrix rows, std::vector<std::string> ids)
    : rows_(std::move(rows)), ids_(std::move(ids)) {
  for (std::size_t i = 0; i < rows_.rows(); ++i) {
    for (std::size_t j = 0; j < rows_.cols(); ++j) {
      if (!std::isfinite(rows_(i, j))) throw InputError("non-finite descriptor value at " + cell_name(i, j));
    }
  }
  if (ids_.empty()) {
    ids_.reserve(rows_.rows());
    for (std::size_t i = 0; i < rows_.rows(); ++i) ids_.push_back(std::to_string(i));
  } else if (ids_.size() != rows_.rows()) {
    throw InputError("descriptor id count does not match row count");
  }
}

Matrix DescriptorSet::gather(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= size()) throw InputError("descriptor index out of range");
    std::ranges::copy(row(indices[r]), out.row(r).begin());
  }
  return out;
}

PairSet make_pair_set(PairLabel label, std::span<const IndexPair> pairs, std::size_t count,
                      bool allow_degenerate) {
  PairSet out{label, {}};
  std::set<IndexPair> seen;
  for (const IndexPair& p : pairs) {
    if (p.first >= count || p.second >= count) {
      throw InputError("pair (" + std::to_string(p.first) + "," + std::to_string(p.second) +
                       ") out of range for " + std::to_string(count) + " descriptors");
    }
    if (p.first == p.second && !allow_degenerate) {
      throw InputError("degenerate pair (" + std::to_string(p.first) + "," +
                       std::to_string(p.second) + ") not allowed");
    }
    const IndexPair c{std::min(p.first, p.second), std::max(p.first, p.second)};
    if (seen.insert(c).second) out.pairs.push_back(c);
  }
  return out;
}

std::vector<std::size_t> referenced_indices(std::span<const PairSet* const> sets) {
  std::vector<std::size_t> idx;
  for (const PairSet* s : sets) {
    for (const IndexPair& p : s->pairs) {
      idx.push_back(p.first);
      idx.push_back(p.second);
    }
  }
  std::ranges::sort(idx);
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

// DHD1: "DHD1", u32 n, u64 N, N*n float32, all little-endian.
DescriptorSet parse_descriptors_dhd1(const std::string& bytes) {
  constexpr std::size_t kHeader = 4 + 4 + 8;
  if (bytes.size() < kHeader || bytes.compare(0, 4, "DHD1") != 0) {
    throw InputError("malformed DHD1 header");
  }
  const auto n = get_le<std::uint32_t>(bytes, 4);
  const auto count = get_le<std::uint64_t>(bytes, 8);
  if (n == 0) throw InputError("malformed DHD1 header: zero dimension");
  if (count > (bytes.size() - kHeader) / (4ULL * n) || bytes.size() != kHeader + count * n * 4) {
    throw InputError("DHD1 payload size does not match header (n=" + std::to_string(n) +
                     ", N=" + std::to_string(count) + ")");
  }
  Matrix rows(count, n);
  std::size_t offset = kHeader;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < n; ++j, offset += 4) {
      const float f = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
      if (!std::isfinite(f)) throw InputError("non-finite descriptor value at " + cell_name(i, j));
      rows(i, j) = f;
    }
  }
  return DescriptorSet(std::move(rows));
}

DescriptorSet parse_descriptors_csv(const std::string& text) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t row = 0;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(line_start, line_end - line_start));
    line_start = line_end + 1;
    if (line.empty()) continue;

    std::size_t col = 0;
    std::size_t cell_start = 0;
    while (true) {
      std::size_t cell_end = line.find(',', cell_start);
      const bool last = cell_end == std::string_view::npos;
      if (last) cell_end = line.size();
      const std::string cell(trim(line.substr(cell_start, cell_end - cell_start)));
      char* end = nullptr;
      const double v = cell.empty() ? 0.0 : std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw InputError("malformed CSV value '" + cell + "' at " + cell_name(row, col));
      }
      const double f = as_float_precision(v);
      if (!std::isfinite(v) || !std::isfinite(f)) {
        throw InputError("non-finite descriptor value at " + cell_name(row, col));
      }
      values.push_back(f);
      ++col;
      if (last) break;
      cell_start = cell_end + 1;
    }
    if (row == 0) {
      width = col;
    } else if (col != width) {
      throw InputError("inconsistent row width at row " + std::to_string(row) + ": expected " +
                       std::to_string(width) + ", got " + std::to_string(col));
    }
    ++row;
  }
  if (row == 0) throw InputError("CSV descriptor file is empty");
  return DescriptorSet(Matrix(row, width, std::move(values)));
}

DescriptorSet load_descriptors(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    if (bytes.size() >= 4 && bytes.compare(0, 4, "DHD1") == 0) return parse_descriptors_dhd1(bytes);
    return parse_descriptors_csv(bytes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_descriptors_dhd1(const DescriptorSet& set, const std::filesystem::path& path) {
  std::string out = "DHD1";
  out.reserve(16 + set.size() * set.dim() * 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  put_le<std::uint64_t>(out, set.size());
  for (double v : set.rows().data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  write_file(path, out);
}

void save_descriptors_csv(const DescriptorSet& set, const std::filesystem::path& path) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto row = set.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(row[j])));
      if (j) out.push_back(',');
      out += buf;
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

void save_descriptors(const DescriptorSet& set, const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    save_descriptors_csv(set, path);
  } else {
    save_descriptors_dhd1(set, path);
  }
}

PairSet parse_pairs(const std::string& text, PairLabel label, std::size_t count, bool allow_degenerate) {
  std::vector<IndexPair> raw;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    std::size_t values[2];
    const char* p = s.data();
    const char* end = s.data() + s.size();
    for (std::size_t k = 0; k < 2; ++k) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      const auto [next, ec] = std::from_chars(p, end, values[k]);
      if (ec != std::errc() || next == p) {
        throw InputError("malformed pair at line " + std::to_string(lineno) + ": '" + std::string(s) + "'");
      }
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) {
      throw InputError("malformed pair at line " + std::to_string(lineno) + ": '" + std::string(s) + "'");
    }
    raw.push_back({values[0], values[1]});
  }
  return make_pair_set(label, raw, count, allow_degenerate);
}

PairSet load_pairs(const std::filesystem::path& path, PairLabel label, std::size_t count,
                   bool allow_degenerate) {
  try {
    return parse_pairs(read_file(path), label, count, allow_degenerate);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_pairs(const PairSet& pairs, const std::filesystem::path& path) {
  std::string out;
  for (const IndexPair& p : pairs.pairs) {
    out += std::to_string(p.first);
    out.push_back(' ');
    out += std::to_string(p.second);
    out.push_back('\n');
  }
  write_file(path, out);
}

namespace {

// Draws k pairs uniformly without replacement. `available` is the size of the
// eligible set; `draw` proposes a random eligible pair; `enumerate` lists them
// all. Dense requests enumerate, sparse ones use rejection.
template <typename Draw, typename Enumerate>
std::vector<IndexPair> sample_pairs(Rng& rng, std::size_t k, std::size_t available, Draw draw,
                                    Enumerate enumerate, const char* what) {
  if (k > available) {
    throw InputError(std::string("requested ") + std::to_string(k) + " " + what + " pairs but only " +
                     std::to_string(available) + " distinct combinations exist");
  }
  std::vector<IndexPair> out;
  if (2 * k > available) {
    std::vector<IndexPair> all = enumerate();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(all.size() - i));
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
  }
  std::set<IndexPair> seen;
  out.reserve(k);
  while (out.size() < k) {
    IndexPair p = draw();
    if (p.first > p.second) std::swap(p.first, p.second);
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

void validate(const SynthConfig& cfg) {
  if (cfg.points < 4) throw InputError("synthetic config: points must be >= 4");
  if (cfg.dim == 0) throw InputError("synthetic config: dim must be >= 1");
  if (cfg.pos_pairs + cfg.neg_pairs < 2) throw InputError("synthetic config: need at least 2 pairs in total");
  if (!(cfg.noise >= 0.0) || !std::isfinite(cfg.noise)) throw InputError("synthetic config: noise must be finite and >= 0");
  if (cfg.preset == SynthPreset::gaussian_clusters && cfg.points % 2 != 0) {
    throw InputError("synthetic config: gaussian-clusters needs an even point count");
  }
  if (cfg.preset == SynthPreset::rings && cfg.dim < 2) {
    throw InputError("synthetic config: rings needs dim >= 2");
  }
}

SynthData gen_clusters(const SynthConfig& cfg, Rng& rng) {
  const std::size_t centers = cfg.points / 2;
  Matrix latent(centers, cfg.dim);
  for (double& v : latent.data()) v = rng.normal();
  Matrix rows(2 * centers, cfg.dim);
  for (std::size_t i = 0; i < rows.rows(); ++i)
    for (std::size_t j = 0; j < cfg.dim; ++j)
      rows(i, j) = as_float_precision(latent(i / 2, j) + cfg.noise * rng.normal());

  std::vector<IndexPair> pos = sample_pairs(
      rng, cfg.pos_pairs, centers,
      [&] {
        const std::size_t c = rng.below(centers);
        return IndexPair{2 * c, 2 * c + 1};
      },
      [&] {
        std::vector<IndexPair> all;
        for (std::size_t c = 0; c < centers; ++c) all.push_back({2 * c, 2 * c + 1});
        return all;
      },
      "positive");

  const std::size_t n = rows.rows();
  const std::size_t neg_available = n * (n - 1) / 2 - centers;
  std::vector<IndexPair> neg = sample_pairs(
      rng, cfg.neg_pairs, neg_available,
      [&] {
        while (true) {
          const std::size_t i = rng.below(n);
          const std::size_t j = rng.below(n);
          if (i / 2 != j / 2) return IndexPair{i, j};
        }
      },
      [&] {
        std::vector<IndexPair> all;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            if (i / 2 != j / 2) all.push_back({i, j});
        return all;
      },
      "negative");

  return {DescriptorSet(std::move(rows)), make_pair_set(PairLabel::positive, pos, n),
          make_pair_set(PairLabel::negative, neg, n)};
}

SynthData gen_rings(const SynthConfig& cfg, Rng& rng) {
  constexpr double kMaxAngleGap = 0.1;
  const std::size_t n = cfg.points;
  const std::size_t inner = n / 2;
  std::vector<double> angle(n);
  for (double& a : angle) a = 2.0 * std::numbers::pi * rng.uniform();

  Matrix rows(n, cfg.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = i < inner ? 1.0 : 3.0;
    for (std::size_t j = 0; j < cfg.dim; ++j) {
      double base = 0.0;
      if (j == 0) base = radius * std::cos(angle[i]);
      if (j == 1) base = radius * std::sin(angle[i]);
      rows(i, j) = as_float_precision(base + cfg.noise * rng.normal());
    }
  }

  // Same-ring neighbors within the angular window, found by sorting by angle.
  std::vector<IndexPair> candidates;
  for (const auto& [lo, hi] : {std::pair{std::size_t{0}, inner}, std::pair{inner, n}}) {
    std::vector<std::size_t> order;
    for (std::size_t i = lo; i < hi; ++i) order.push_back(i);
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
      return angle[a] < angle[b] || (angle[a] == angle[b] && a < b);
    });
    const std::size_t size = order.size();
    for (std::size_t s = 0; s < size; ++s) {
      for (std::size_t step = 1; step < size; ++step) {
        const std::size_t t = (s + step) % size;
        double gap = angle[order[t]] - angle[order[s]];
        if (gap < 0.0) gap += 2.0 * std::numbers::pi;
        if (gap > kMaxAngleGap) break;
        const std::size_t a = order[s];
        const std::size_t b = order[t];
        candidates.push_back({std::min(a, b), std::max(a, b)});
      }
    }
  }
  std::ranges::sort(candidates);
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<IndexPair> pos = sample_pairs(
      rng, cfg.pos_pairs, candidates.size(),
      [&] { return candidates[rng.below(candidates.size())]; }, [&] { return candidates; },
      "positive");

  const std::size_t outer = n - inner;
  std::vector<IndexPair> neg = sample_pairs(
      rng, cfg.neg_pairs, inner * outer,
      [&] { return IndexPair{rng.below(inner), inner + rng.below(outer)}; },
      [&] {
        std::vector<IndexPair> all;
        for (std::size_t i = 0; i < inner; ++i)
          for (std::size_t j = inner; j < n; ++j) all.push_back({i, j});
        return all;
      },
      "negative");

  return {DescriptorSet(std::move(rows)), make_pair_set(PairLabel::positive, pos, n),
          make_pair_set(PairLabel::negative, neg, n)};
}

}  // namespace

SynthData gen_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  return cfg.preset == SynthPreset::gaussian_clusters ? gen_clusters(cfg, rng) : gen_rings(cfg, rng);
}

std::pair<PairSet, PairSet> split_pairs(const PairSet& pairs, double ratio, std::uint64_t seed) {
  if (pairs.size() < 2) throw InputError("split needs at least 2 pairs");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("split ratio must lie in (0, 1)");
  const auto train_size = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(pairs.size())));
  if (train_size == 0 || train_size == pairs.size()) {
    throw InputError("split ratio " + std::to_string(ratio) + " leaves an empty side for " +
                     std::to_string(pairs.size()) + " pairs");
  }
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());

  PairSet train{pairs.label, {}};
  PairSet test{pairs.label, {}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < train_size ? train : test).pairs.push_back(pairs.pairs[order[k]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace diffhash
