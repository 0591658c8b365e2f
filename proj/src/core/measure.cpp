#include "sdot/core/measure.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace sdot {

PointSet::PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0 && !data_.empty()) throw std::invalid_argument("PointSet: zero dimension");
  if (dim_ != 0 && data_.size() % dim_ != 0)
    throw DimensionMismatch("PointSet: flat size is not a multiple of the dimension");
}

PointSet::PointSet(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return;
  dim_ = rows.front().size();
  if (dim_ == 0) throw std::invalid_argument("PointSet: zero dimension");
  data_.reserve(rows.size() * dim_);
  for (const auto& r : rows) {
    if (r.size() != dim_) throw DimensionMismatch("PointSet: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void PointSet::append(std::span<const double> x) {
  if (dim_ == 0 && data_.empty()) dim_ = x.size();
  if (x.size() != dim_) throw DimensionMismatch("PointSet::append: dimension mismatch");
  data_.insert(data_.end(), x.begin(), x.end());
}

PointSet PointSet::prefix(std::size_t n) const {
  if (n > size()) throw std::out_of_range("PointSet::prefix: not enough points");
  return PointSet(dim_, std::vector<double>(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n * dim_)));
}

DiscreteMeasure::DiscreteMeasure(PointSet atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.size() == 0) throw std::invalid_argument("DiscreteMeasure: no atoms");
  if (weights_.size() != atoms_.size())
    throw DimensionMismatch("DiscreteMeasure: " + std::to_string(weights_.size()) + " weights for " +
                            std::to_string(atoms_.size()) + " atoms");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("DiscreteMeasure: negative or non-finite weight");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("DiscreteMeasure: weights do not sum to 1");
  for (double v : atoms_.flat())
    if (!std::isfinite(v)) throw std::invalid_argument("DiscreteMeasure: non-finite atom coordinate");
}

DiscreteMeasure DiscreteMeasure::uniform(PointSet atoms) {
  const std::size_t n = atoms.size();
  return DiscreteMeasure(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Potential::Potential(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("Potential: non-finite entry");
}

std::vector<double> mean_zero(std::span<const double> phi) {
  std::vector<double> out(phi.begin(), phi.end());
  if (out.empty()) return out;
  const double m = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= m;
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("squared_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace sdot
