#include "diffhash/train_kernel.hpp"

#include <string>

#include "diffhash/error.hpp"
#include "diffhash/rng.hpp"
#include "training_util.hpp"

namespace diffhash {

namespace {

struct PairKernels {
  Matrix first;   // l x |S|
  Matrix second;  // l x |S|
};

PairKernels pair_kernels(const PairSet& pairs, const DescriptorSet& data, const Matrix& basis,
                         const KernelSpec& kernel) {
  std::vector<std::size_t> a, b;
  for (const IndexPair& p : pairs.pairs) {
    a.push_back(p.first);
    b.push_back(p.second);
  }
  return {kernel_matrix(kernel, basis, data.gather(a)), kernel_matrix(kernel, basis, data.gather(b))};
}

// out += weight * (K K'^T + K' K^T) / 2, upper triangle only.
void accumulate_cross(Matrix& out, const PairKernels& k, double weight) {
  const std::size_t l = k.first.rows();
  for (std::size_t i = 0; i < l; ++i) {
    const auto fi = k.first.row(i);
    const auto si = k.second.row(i);
    for (std::size_t j = i; j < l; ++j) {
      const auto fj = k.first.row(j);
      const auto sj = k.second.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < fi.size(); ++p) s += fi[p] * sj[p] + si[p] * fj[p];
      out(i, j) += weight * 0.5 * s;
    }
  }
}

SymMatrix objective_matrix(const PairKernels& pos, const PairKernels& neg, std::size_t n_pos, std::size_t n_neg,
                           double alpha) {
  const std::size_t l = pos.first.rows();
  Matrix k(l, l);
  accumulate_cross(k, neg, 1.0 / static_cast<double>(n_neg));
  accumulate_cross(k, pos, -alpha / static_cast<double>(n_pos));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j) k(j, i) = k(i, j);
  return SymMatrix(std::move(k));
}

void check_inputs(const PairSet& positives, const PairSet& negatives, const DescriptorSet& data) {
  if (positives.empty() || negatives.empty()) throw InputError("training needs positive and negative pairs");
  detail::check_pairs(positives, data);
  detail::check_pairs(negatives, data);
}

}  // namespace

std::vector<std::size_t> select_basis(std::span<const std::size_t> referenced, std::size_t l, std::uint64_t seed) {
  if (l == 0) throw InputError("basis size l must be positive");
  if (l > referenced.size()) {
    throw InputError("basis size l=" + std::to_string(l) + " exceeds the " + std::to_string(referenced.size()) +
                     " distinct descriptors referenced by training pairs");
  }
  std::vector<std::size_t> pool(referenced.begin(), referenced.end());
  Rng rng(seed);
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(l);
  return pool;
}

SymMatrix build_K(const PairSet& positives, const PairSet& negatives, const DescriptorSet& data,
                  const Matrix& basis, const KernelSpec& kernel, double alpha) {
  check_inputs(positives, negatives, data);
  if (basis.rows() == 0) throw InputError("empty basis");
  return objective_matrix(pair_kernels(positives, data, basis, kernel), pair_kernels(negatives, data, basis, kernel),
                          positives.size(), negatives.size(), alpha);
}

Trained<KernelHashModel> train_kdiff_hash(const PairSet& positives, const PairSet& negatives,
                                          const DescriptorSet& data, const KernelTrainOptions& options) {
  const std::size_t m = options.m;
  const std::size_t l = options.l;
  if (m == 0) throw InputError("hash length m must be positive");
  if (m > l) {
    throw InputError("kernelized diff-hash requires m <= l (got m=" + std::to_string(m) + ", l=" + std::to_string(l) +
                     ")");
  }
  detail::check_alpha(options.alpha);
  check_inputs(positives, negatives, data);

  const PairSet* sets[] = {&positives, &negatives};
  const std::vector<std::size_t> referenced = referenced_indices(sets);

  KernelSpec kernel;
  if (options.kind == KernelKind::linear) {
    kernel = KernelSpec::linear(data.dim());
  } else {
    const SymMatrix cov = estimate_covariance(data.gather(referenced), 0.0);
    kernel = KernelSpec::gaussian_mahalanobis(cov, options.gamma, options.exponent_mode);
  }

  const std::vector<std::size_t> basis_idx = select_basis(referenced, l, options.seed);
  Matrix basis = data.gather(basis_idx);

  const PairKernels pos = pair_kernels(positives, data, basis, kernel);
  const PairKernels neg = pair_kernels(negatives, data, basis, kernel);
  const EigenDecomposition eig =
      sym_eig(objective_matrix(pos, neg, positives.size(), negatives.size(), options.alpha));

  Trained<KernelHashModel> out;
  KernelHashModel& model = out.model;
  model.m = m;
  model.l = l;
  model.n = data.dim();
  model.alpha = options.alpha;
  model.seed = options.seed;
  model.coefficients = Matrix(m, l);
  model.thresholds.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < l; ++j) model.coefficients(k, j) = eig.vectors(j, k);
    out.report.eigenvalues.push_back(eig.values[k]);
  }

  // Projections of pair members reuse the kernel columns computed for K.
  const auto projected = [&](const PairKernels& pk, std::span<const double> beta) {
    std::vector<ProjectedPair> res(pk.first.cols(), ProjectedPair{0.0, 0.0});
    for (std::size_t i = 0; i < l; ++i) {
      const auto f = pk.first.row(i);
      const auto s = pk.second.row(i);
      for (std::size_t p = 0; p < res.size(); ++p) {
        res[p].first += beta[i] * f[p];
        res[p].second += beta[i] * s[p];
      }
    }
    return res;
  };
  for (std::size_t k = 0; k < m; ++k) {
    const auto beta = model.coefficients.row(k);
    const ThresholdChoice choice =
        choose_threshold(rate_curves(projected(pos, beta), projected(neg, beta)), options.alpha);
    model.thresholds[k] = choice.threshold;
    out.report.thresholds.push_back(choice);
  }

  model.kernel = std::move(kernel);
  model.basis = std::move(basis);
  return out;
}

}  // namespace diffhash
