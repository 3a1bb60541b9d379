#include "diffhash/hashcodec.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "diffhash/error.hpp"

namespace diffhash {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::uint64_t tail_mask(std::size_t m) {
  const std::size_t r = m % 64;
  return r == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
}

}  // namespace

BitHash CodeSet::at(std::size_t i) const {
  BitHash h(m_);
  std::ranges::copy(words(i), h.words.begin());
  return h;
}

void CodeSet::push_back(const BitHash& h) {
  if (h.m != m_) throw InputError("code length mismatch: set holds " + std::to_string(m_) + "-bit codes, got " +
                                  std::to_string(h.m));
  words_.insert(words_.end(), h.words.begin(), h.words.end());
}

std::size_t model_dim(const HashModel& model) {
  return std::visit([](const auto& mdl) { return mdl.n; }, model);
}

std::size_t model_bits(const HashModel& model) {
  return std::visit([](const auto& mdl) { return mdl.m; }, model);
}

std::span<const double> model_thresholds(const HashModel& model) {
  return std::visit([](const auto& mdl) { return std::span<const double>(mdl.thresholds); }, model);
}

std::vector<double> project(const HashModel& model, std::span<const double> x) {
  if (x.size() != model_dim(model)) {
    throw InputError("descriptor dimension " + std::to_string(x.size()) + " does not match model dimension " +
                     std::to_string(model_dim(model)));
  }
  return std::visit(
      overloaded{
          [&](const LinearHashModel& mdl) {
            std::vector<double> out(mdl.m);
            for (std::size_t i = 0; i < mdl.m; ++i) out[i] = dot(mdl.projections.row(i), x);
            return out;
          },
          [&](const KernelHashModel& mdl) {
            std::vector<double> column(mdl.l);
            kernel_column(mdl.kernel, mdl.basis, x, column);
            std::vector<double> out(mdl.m, 0.0);
            for (std::size_t k = 0; k < mdl.m; ++k) {
              const auto beta = mdl.coefficients.row(k);
              double s = 0.0;
              for (std::size_t i = 0; i < mdl.l; ++i) s += beta[i] * column[i];
              out[k] = s;
            }
            return out;
          },
      },
      model);
}

BitHash encode(const HashModel& model, std::span<const double> x) {
  const std::vector<double> p = project(model, x);
  const auto a = model_thresholds(model);
  BitHash h(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] + a[i] >= 0.0) h.set(i);
  return h;
}

CodeSet encode_all(const HashModel& model, const DescriptorSet& data) {
  CodeSet out(model_bits(model));
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(encode(model, data.row(i)));
  return out;
}

std::size_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return d;
}

std::size_t hamming(const BitHash& h1, const BitHash& h2) {
  if (h1.m != h2.m) {
    throw InputError("Hamming distance of codes with different lengths (" + std::to_string(h1.m) + " vs " +
                     std::to_string(h2.m) + ")");
  }
  return hamming(std::span(h1.words), std::span(h2.words));
}

std::vector<Match> knn(const BitHash& query, const CodeSet& db, std::size_t k) {
  if (query.m != db.bits()) {
    throw InputError("query has " + std::to_string(query.m) + " bits, database has " + std::to_string(db.bits()));
  }
  if (k > db.size()) {
    throw InputError("k=" + std::to_string(k) + " exceeds database size " + std::to_string(db.size()));
  }
  std::vector<Match> all(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) all[i] = {i, hamming(std::span(query.words), db.words(i))};
  const auto closer = [](const Match& a, const Match& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  return all;
}

std::string serialize_codes(const CodeSet& codes) {
  std::string out = "DHB1";
  const auto put = [&out](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>(static_cast<unsigned char>(v >> (8 * i))));
  };
  put(codes.bits(), 4);
  put(codes.size(), 8);
  for (std::uint64_t w : codes.raw()) put(w, 8);
  return out;
}

CodeSet parse_codes(const std::string& bytes) {
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < kHeader || bytes.compare(0, 4, "DHB1") != 0) throw InputError("malformed DHB1 header");
  const auto get = [&bytes](std::size_t offset, int len) {
    std::uint64_t v = 0;
    for (int i = 0; i < len; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes[offset + i])} << (8 * i);
    return v;
  };
  const std::size_t m = get(4, 4);
  const std::uint64_t count = get(8, 8);
  if (m == 0) throw InputError("malformed DHB1 header: zero code length");
  const std::size_t stride = words_for_bits(m);
  if (count > (bytes.size() - kHeader) / (8 * stride) || bytes.size() != kHeader + count * stride * 8) {
    throw InputError("DHB1 payload size does not match header (m=" + std::to_string(m) + ", N=" +
                     std::to_string(count) + ")");
  }
  CodeSet codes(m);
  BitHash h(m);
  std::size_t offset = kHeader;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::size_t w = 0; w < stride; ++w, offset += 8) h.words[w] = get(offset, 8);
    if (h.words.back() & ~tail_mask(m)) {
      throw InputError("DHB1 code " + std::to_string(i) + " has bits set beyond m=" + std::to_string(m));
    }
    codes.push_back(h);
  }
  return codes;
}

void save_codes(const CodeSet& codes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  const std::string bytes = serialize_codes(codes);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

CodeSet load_codes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_codes(ss.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace diffhash
