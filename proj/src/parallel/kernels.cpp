#include "sdot/parallel/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#include "sdot/core/c_transform.hpp"
#include "sdot/noise/smooth_transform.hpp"

namespace sdot {

namespace {

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

// Adds w * psi, w * psi^2 and w * p for one row into the given accumulators.
void row_terms(std::span<const double> phi, std::span<const double> cost_row, const MarginalModel* model,
               double eps, double w, std::vector<double>& u, double& value, double& sq, double* grad) {
  for (std::size_t i = 0; i < phi.size(); ++i) u[i] = phi[i] - cost_row[i];
  if (model == nullptr) {
    const auto best = max_with_index(u);
    value += w * best.value;
    sq += w * best.value * best.value;
    if (grad) grad[best.winner] += w;
    return;
  }
  const auto sm = smooth_max(u, *model, eps);
  value += w * sm.value;
  sq += w * sm.value * sm.value;
  if (grad)
    for (std::size_t i = 0; i < phi.size(); ++i) grad[i] += w * sm.probs.p[i];
}

}  // namespace

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw DimensionMismatch("CostMatrix: data size is not rows * cols");
}

CostMatrix CostMatrix::build(const PointSet& xs, const DiscreteMeasure& nu, const CostSpec& c, ExecPolicy policy) {
  if (xs.dim() != nu.dim() && xs.size() > 0) throw DimensionMismatch("CostMatrix: sample and atom dimensions differ");
  CostMatrix m;
  m.rows_ = xs.size();
  m.cols_ = nu.size();
  m.data_.resize(m.rows_ * m.cols_);
  const auto n = static_cast<std::ptrdiff_t>(m.rows_);
  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m.cols_; ++i) m.data_[j * m.cols_ + i] = eval_cost(xs[j], nu.atom(i), c);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m.cols_; ++i) m.data_[j * m.cols_ + i] = eval_cost(xs[j], nu.atom(i), c);
  }
  return m;
}

CostMatrix CostMatrix::prefix(std::size_t m) const {
  if (m > rows_) throw std::out_of_range("CostMatrix::prefix: not enough rows");
  CostMatrix out;
  out.rows_ = m;
  out.cols_ = cols_;
  out.data_.assign(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(m * cols_));
  return out;
}

DualTerms accumulate_dual_terms(std::span<const double> phi, const CostMatrix& costs,
                                std::span<const double> weights, const MarginalModel* model, double eps,
                                bool want_grad, ExecPolicy policy) {
  const std::size_t n = costs.cols(), m = costs.rows();
  if (phi.size() != n) throw DimensionMismatch("accumulate_dual_terms: potential length does not match atoms");
  if (!weights.empty() && weights.size() != m) throw DimensionMismatch("accumulate_dual_terms: weight count");
  if (model && model->size() != n) throw DimensionMismatch("accumulate_dual_terms: model size");

  DualTerms out;
  if (want_grad) out.grad_sum.assign(n, 0.0);

  if (policy == ExecPolicy::serial) {
    std::vector<double> u(n);
    for (std::size_t j = 0; j < m; ++j) {
      const double w = weights.empty() ? 1.0 : weights[j];
      out.weight_sum += w;
      row_terms(phi, costs.row(j), model, eps, w, u, out.value_sum, out.value_sq_sum,
                want_grad ? out.grad_sum.data() : nullptr);
    }
    return out;
  }

  const std::size_t nb = block_count(m);
  std::vector<double> wsum(nb, 0.0), vsum(nb, 0.0), sqsum(nb, 0.0);
  std::vector<double> gsum(want_grad ? nb * n : 0, 0.0);
  const auto nbi = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel
  {
    std::vector<double> u(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < nbi; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
      const std::size_t hi = std::min(m, lo + kReductionBlock);
      double* g = want_grad ? gsum.data() + static_cast<std::size_t>(b) * n : nullptr;
      for (std::size_t j = lo; j < hi; ++j) {
        const double w = weights.empty() ? 1.0 : weights[j];
        wsum[b] += w;
        row_terms(phi, costs.row(j), model, eps, w, u, vsum[b], sqsum[b], g);
      }
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    out.weight_sum += wsum[b];
    out.value_sum += vsum[b];
    out.value_sq_sum += sqsum[b];
    if (want_grad)
      for (std::size_t i = 0; i < n; ++i) out.grad_sum[i] += gsum[b * n + i];
  }
  return out;
}

double hinge_mean(double delta, std::span<const double> c1, std::span<const double> c2, ExecPolicy policy) {
  if (c1.size() != c2.size() || c1.empty()) throw std::invalid_argument("hinge_mean: cost arrays differ or are empty");
  const std::size_t m = c1.size();
  if (policy == ExecPolicy::serial) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::max(delta - c1[j], -c2[j]);
    return s / static_cast<double>(m);
  }
  const std::size_t nb = block_count(m);
  std::vector<double> part(nb, 0.0);
  const auto nbi = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nbi; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(m, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t j = lo; j < hi; ++j) s += std::max(delta - c1[j], -c2[j]);
    part[b] = s;
  }
  double s = 0.0;
  for (double v : part) s += v;
  return s / static_cast<double>(m);
}

}  // namespace sdot
