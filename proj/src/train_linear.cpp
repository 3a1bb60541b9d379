#include "diffhash/train_linear.hpp"

#include <cmath>
#include <string>

#include "diffhash/error.hpp"
#include "training_util.hpp"

namespace diffhash {

SymMatrix build_sigma(const PairSet& pairs, const DescriptorSet& data) {
  if (pairs.empty()) throw InputError("cannot build a pair moment from an empty pair set");
  detail::check_pairs(pairs, data);
  const std::size_t n = data.dim();
  Matrix sigma(n, n);
  for (const IndexPair& p : pairs.pairs) {
    const auto x = data.row(p.first);
    const auto y = data.row(p.second);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) sigma(i, j) += 0.5 * (x[i] * y[j] + y[i] * x[j]);
  }
  const double scale = 1.0 / static_cast<double>(pairs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      sigma(i, j) *= scale;
      sigma(j, i) = sigma(i, j);
    }
  }
  return SymMatrix(std::move(sigma));
}

SymMatrix diff_matrix(const PairSet& positives, const PairSet& negatives, const DescriptorSet& data,
                      double alpha) {
  const SymMatrix sn = build_sigma(negatives, data);
  const SymMatrix sp = build_sigma(positives, data);
  Matrix d = sn.matrix();
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) -= alpha * sp(i, j);
  return SymMatrix(std::move(d));
}

Trained<LinearHashModel> train_diff_hash(const PairSet& positives, const PairSet& negatives,
                                         const DescriptorSet& data, const LinearTrainOptions& options) {
  const std::size_t n = data.dim();
  const std::size_t m = options.m;
  if (m == 0) throw InputError("hash length m must be positive");
  if (m > n) {
    throw InputError("linear diff-hash requires m <= n (got m=" + std::to_string(m) + ", n=" +
                     std::to_string(n) + ")");
  }
  detail::check_alpha(options.alpha);
  if (positives.empty() || negatives.empty()) throw InputError("training needs positive and negative pairs");

  std::vector<double> mean(n, 0.0);
  DescriptorSet centered;
  const DescriptorSet* work = &data;
  if (options.center) {
    for (std::size_t r = 0; r < data.size(); ++r)
      for (std::size_t j = 0; j < n; ++j) mean[j] += data.row(r)[j];
    for (double& v : mean) v /= static_cast<double>(data.size());
    Matrix shifted = data.rows();
    for (std::size_t r = 0; r < shifted.rows(); ++r)
      for (std::size_t j = 0; j < n; ++j) shifted(r, j) -= mean[j];
    centered = DescriptorSet(std::move(shifted), data.ids());
    work = &centered;
  }

  const EigenDecomposition eig = sym_eig(diff_matrix(positives, negatives, *work, options.alpha));

  Trained<LinearHashModel> out;
  LinearHashModel& model = out.model;
  model.m = m;
  model.n = n;
  model.alpha = options.alpha;
  model.projections = Matrix(m, n);
  model.thresholds.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double lambda = eig.values[k];
    const double scale = std::abs(lambda) > 1e-12 ? std::sqrt(std::abs(lambda)) : 1.0;
    for (std::size_t j = 0; j < n; ++j) model.projections(k, j) = scale * eig.vectors(j, k);
    out.report.eigenvalues.push_back(lambda);
  }

  for (std::size_t k = 0; k < m; ++k) {
    const auto row = model.projections.row(k);
    const auto project = [&](std::size_t idx) { return dot(row, work->row(idx)); };
    const ThresholdChoice choice = detail::fit_threshold(positives, negatives, project, options.alpha);
    model.thresholds[k] = choice.threshold - (options.center ? dot(row, mean) : 0.0);
    out.report.thresholds.push_back(choice);
  }
  return out;
}

}  // namespace diffhash
