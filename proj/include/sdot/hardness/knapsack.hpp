#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdot/core/measure.hpp"

namespace sdot {

// P(w, b) = {x in [0,1]^d : w.x <= b}.
struct KnapsackInstance {
  std::vector<double> w;
  double b = 1.0;
  double p = 2.0;  // cost exponent

  void validate() const;
  std::size_t dim() const { return w.size(); }
  // Atoms y1 = 0 and y2 = 2 b w / ||w||^2.
  std::vector<double> second_atom() const;
};

enum class QuadratureKind { grid, monte_carlo };

struct QuadratureSpec {
  QuadratureKind kind = QuadratureKind::grid;
  std::size_t resolution = 400;  // points per axis (grid) or sample count
  std::uint64_t seed = 0;        // monte carlo only

  static QuadratureSpec grid(std::size_t m) { return {QuadratureKind::grid, m, 0}; }
  static QuadratureSpec monte_carlo(std::size_t n, std::uint64_t seed) { return {QuadratureKind::monte_carlo, n, seed}; }
  std::string describe() const;
};

// Quadrature nodes on [0,1]^d (equal weights) with the costs to both atoms.
struct TwoPointCosts {
  PointSet nodes;
  std::vector<double> c1, c2;
  double max_cost = 0.0;  // largest cost over the cube corners
};

TwoPointCosts two_point_costs(const KnapsackInstance& inst, const QuadratureSpec& quad);

// W(t) = max over delta of t delta - mean_j max(delta - c1_j, -c2_j), the
// optimal transport cost from the quadrature measure to t d_{y1} + (1-t) d_{y2}.
double two_point_value(const TwoPointCosts& costs, double t);

double wc_two_point(const KnapsackInstance& inst, double t, const QuadratureSpec& quad);

struct BinarySearchResult {
  double t_hat = 0.0;
  std::size_t oracle_calls = 0;
  std::size_t levels = 0;  // L
  double accuracy = 0.0;   // guaranteed |t_hat - t*|: delta, or 2 delta for an inexact oracle
};

// Locates the minimizer of a strictly convex g on [0,1] on the grid l / 2^L,
// L = ceil(log2(1/delta)) + 1, using exactly 2L evaluations of g.
// oracle_error is the caller's bound on |g_evaluated - g|. The 2 delta
// guarantee needs it below a quarter of the smallest nonzero grid increment
// of g; that condition is not checked.
BinarySearchResult binary_search_min(const std::function<double(double)>& g, double delta, double oracle_error = 0.0);

struct VolumeResult {
  double t_hat = 0.0;
  std::size_t oracle_calls = 0;
  double delta = 0.0;
  std::optional<double> exact;  // closed form for d <= 2
};

VolumeResult knapsack_volume_via_ot(const KnapsackInstance& inst, double delta, const QuadratureSpec& quad);

// Closed-form volume of P(w, b) for d <= 2.
std::optional<double> exact_knapsack_volume(const KnapsackInstance& inst);

}  // namespace sdot
