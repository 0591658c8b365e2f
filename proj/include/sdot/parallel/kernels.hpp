#pragma once

#include <span>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/noise/marginal_model.hpp"

namespace sdot {

// serial: plain index-order loops, kept as the reference implementation.
// parallel: OpenMP over fixed-size blocks, partial sums combined in block
// order, so results do not depend on the thread count.
enum class ExecPolicy { serial, parallel };

inline constexpr std::size_t kReductionBlock = 1024;

// Dense M x N matrix of c(x_j, y_i).
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static CostMatrix build(const PointSet& xs, const DiscreteMeasure& nu, const CostSpec& c,
                          ExecPolicy policy = ExecPolicy::parallel);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t j) const { return {data_.data() + j * cols_, cols_}; }
  double operator()(std::size_t j, std::size_t i) const { return data_[j * cols_ + i]; }
  // First m rows.
  CostMatrix prefix(std::size_t m) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct DualTerms {
  double weight_sum = 0.0;
  double value_sum = 0.0;     // sum_j w_j psi(phi, x_j)
  double value_sq_sum = 0.0;  // sum_j w_j psi(phi, x_j)^2
  std::vector<double> grad_sum;  // sum_j w_j p(x_j), empty unless requested
};

// Accumulates the (smooth when model != nullptr) c-transform and its
// gradient over the rows of a cost matrix. Empty weights mean unit weights.
DualTerms accumulate_dual_terms(std::span<const double> phi, const CostMatrix& costs,
                                std::span<const double> weights, const MarginalModel* model, double eps,
                                bool want_grad, ExecPolicy policy = ExecPolicy::parallel);

// mean_j max(delta - c1_j, -c2_j).
double hinge_mean(double delta, std::span<const double> c1, std::span<const double> c2,
                  ExecPolicy policy = ExecPolicy::parallel);

}  // namespace sdot
