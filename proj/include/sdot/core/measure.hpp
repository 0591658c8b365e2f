#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdot {

// Raised when two objects that must share a dimension do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row-major set of points in R^d.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t dim, std::vector<double> flat);
  explicit PointSet(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  const std::vector<double>& flat() const { return data_; }

  void append(std::span<const double> x);
  void reserve(std::size_t n) { data_.reserve(n * dim_); }
  // First n points as a new set.
  PointSet prefix(std::size_t n) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Finitely supported probability measure sum_i w_i delta_{y_i}.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  // Weights must be nonnegative and sum to 1 within 1e-12.
  DiscreteMeasure(PointSet atoms, std::vector<double> weights);

  static DiscreteMeasure uniform(PointSet atoms);

  std::size_t size() const { return atoms_.size(); }
  std::size_t dim() const { return atoms_.dim(); }
  const PointSet& atoms() const { return atoms_; }
  std::span<const double> atom(std::size_t i) const { return atoms_[i]; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  PointSet atoms_;
  std::vector<double> weights_;
};

// Dual potential on the atoms of the target measure.
class Potential {
 public:
  Potential() = default;
  explicit Potential(std::vector<double> values);
  static Potential zeros(std::size_t n) { return Potential(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  operator std::span<const double>() const { return values_; }

 private:
  std::vector<double> values_;
};

// Removes the mean so that potentials differing by a constant compare equal.
std::vector<double> mean_zero(std::span<const double> phi);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace sdot
