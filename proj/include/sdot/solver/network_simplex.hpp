#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sdot/core/cost.hpp"
#include "sdot/core/measure.hpp"
#include "sdot/parallel/kernels.hpp"

namespace sdot {

struct PlanEntry {
  std::size_t source = 0;  // index into mu
  std::size_t target = 0;  // index into nu
  double mass = 0.0;
};

struct ExactOtResult {
  double value = 0.0;
  std::vector<PlanEntry> plan;  // positive entries only
  std::vector<double> phi;      // potentials on nu: phi_i - psi_j <= c_ji
  std::vector<double> psi;      // potentials on mu
  std::size_t pivots = 0;       // simplex pivots or shortest-path augmentations
};

inline constexpr std::size_t kDefaultMaxArcs = 1000000;

// network_simplex: primal network simplex with a strongly feasible tree.
// assignment: successive shortest paths over the sinks; needs uniform mu with
// integral M nu_i and is much faster when nu has few atoms.
// automatic picks assignment whenever it applies.
enum class OtAlgorithm { automatic, network_simplex, assignment };

// Transportation LP min sum pi_ji c_ji with marginals mu (rows) and nu (columns).
ExactOtResult exact_discrete_ot(std::span<const double> mu, std::span<const double> nu, const CostMatrix& costs,
                                std::size_t max_arcs = kDefaultMaxArcs,
                                OtAlgorithm algorithm = OtAlgorithm::automatic);

// Sink capacities M nu_i when mu is uniform and every M nu_i is an integer.
std::optional<std::vector<std::size_t>> integral_capacities(std::span<const double> mu, std::span<const double> nu);

ExactOtResult exact_discrete_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& c,
                                std::size_t max_arcs = kDefaultMaxArcs,
                                OtAlgorithm algorithm = OtAlgorithm::automatic);

// Cost matrix from explicit rows, for small hand-built instances.
CostMatrix cost_matrix_from_rows(const std::vector<std::vector<double>>& rows);

}  // namespace sdot
