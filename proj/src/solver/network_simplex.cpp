#include "sdot/solver/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace sdot {

namespace {

// Spanning-tree network simplex on the bipartite graph sources -> sinks plus
// one artificial arc per node to an extra root. Tree arcs are stored through
// each node's parent link; children are kept in doubly linked sibling lists.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply, std::span<const double> demand, const CostMatrix& costs)
      : m_(supply.size()), n_(demand.size()), costs_(costs) {
    num_real_ = m_ * n_;
    num_nodes_ = m_ + n_ + 1;
    root_ = m_ + n_;
    const std::size_t num_arcs = num_real_ + m_ + n_;

    double cmax = 0.0;
    for (std::size_t j = 0; j < m_; ++j)
      for (double c : costs_.row(j)) cmax = std::max(cmax, std::abs(c));
    art_cost_ = (cmax + 1.0) * static_cast<double>(num_nodes_);
    rc_tol_ = 1e-12 * art_cost_;

    flow_.assign(num_arcs, 0.0);
    in_tree_.assign(num_arcs, 0);
    art_src_.resize(m_ + n_);
    art_tgt_.resize(m_ + n_);

    parent_.assign(num_nodes_, kNone);
    pred_.assign(num_nodes_, kNone);
    up_.assign(num_nodes_, 0);
    depth_.assign(num_nodes_, 0);
    pi_.assign(num_nodes_, 0.0);
    first_child_.assign(num_nodes_, kNone);
    next_sib_.assign(num_nodes_, kNone);
    prev_sib_.assign(num_nodes_, kNone);

    // Initial tree: every node hangs off the root. Arcs with zero flow point
    // away from the root so the tree is strongly feasible.
    for (std::size_t v = 0; v < m_ + n_; ++v) {
      const std::size_t a = num_real_ + v;
      const bool is_source = v < m_;
      const double amount = is_source ? supply[v] : demand[v - m_];
      if (is_source && amount > 0.0) {
        art_src_[v] = v;
        art_tgt_[v] = root_;
        up_[v] = 1;
        pi_[v] = -art_cost_;
      } else {
        art_src_[v] = root_;
        art_tgt_[v] = v;
        up_[v] = 0;
        pi_[v] = art_cost_;
      }
      flow_[a] = amount;
      in_tree_[a] = 1;
      pred_[v] = a;
      depth_[v] = 1;
      attach(v, root_);
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(num_arcs))));
  }

  std::size_t run() {
    std::size_t pivots = 0;
    std::size_t in_arc;
    while (find_entering(in_arc)) {
      pivot(in_arc);
      ++pivots;
    }
    return pivots;
  }

  std::size_t source(std::size_t a) const { return a < num_real_ ? a / n_ : art_src_[a - num_real_]; }
  std::size_t target(std::size_t a) const { return a < num_real_ ? m_ + a % n_ : art_tgt_[a - num_real_]; }
  double cost(std::size_t a) const { return a < num_real_ ? costs_(a / n_, a % n_) : art_cost_; }
  double flow(std::size_t a) const { return flow_[a]; }
  double potential(std::size_t v) const { return pi_[v]; }
  std::size_t num_real() const { return num_real_; }
  std::size_t num_arcs() const { return flow_.size(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  double reduced_cost(std::size_t a) const { return cost(a) + pi_[source(a)] - pi_[target(a)]; }

  // Block search pricing: the most negative reduced cost within the first
  // block (cyclically from the last position) that contains a candidate.
  bool find_entering(std::size_t& in_arc) {
    const std::size_t total = flow_.size();
    double best = -rc_tol_;
    std::size_t cnt = 0;
    bool found = false;
    for (std::size_t k = 0; k < total; ++k) {
      const std::size_t a = next_arc_;
      next_arc_ = next_arc_ + 1 == total ? 0 : next_arc_ + 1;
      if (!in_tree_[a]) {
        const double rc = reduced_cost(a);
        if (rc < best) {
          best = rc;
          in_arc = a;
          found = true;
        }
      }
      if (++cnt == block_) {
        if (found) return true;
        cnt = 0;
      }
    }
    return found;
  }

  std::size_t find_join(std::size_t u, std::size_t v) const {
    while (u != v) {
      if (depth_[u] >= depth_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    return u;
  }

  void detach(std::size_t v) {
    const std::size_t p = parent_[v];
    if (prev_sib_[v] != kNone)
      next_sib_[prev_sib_[v]] = next_sib_[v];
    else
      first_child_[p] = next_sib_[v];
    if (next_sib_[v] != kNone) prev_sib_[next_sib_[v]] = prev_sib_[v];
    prev_sib_[v] = next_sib_[v] = kNone;
  }

  void attach(std::size_t v, std::size_t p) {
    parent_[v] = p;
    prev_sib_[v] = kNone;
    next_sib_[v] = first_child_[p];
    if (first_child_[p] != kNone) prev_sib_[first_child_[p]] = v;
    first_child_[p] = v;
  }

  void pivot(std::size_t in_arc) {
    const std::size_t first = source(in_arc), second = target(in_arc);
    const std::size_t join = find_join(first, second);

    // Flow is pushed along in_arc, then from second up to join and from join
    // down to first. The last blocking arc in that orientation leaves.
    double delta = std::numeric_limits<double>::infinity();
    std::size_t u_out = kNone;
    int side = 0;
    for (std::size_t u = first; u != join; u = parent_[u]) {
      if (up_[u] && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 1;
      }
    }
    for (std::size_t u = second; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 2;
      }
    }
    if (u_out == kNone) throw std::runtime_error("exact_discrete_ot: unbounded pivot");

    if (delta > 0.0) {
      for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
      for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
    }
    flow_[in_arc] = delta;
    const std::size_t out_arc = pred_[u_out];
    flow_[out_arc] = 0.0;
    in_tree_[out_arc] = 0;
    in_tree_[in_arc] = 1;

    // Re-hang the stem from the entering endpoint up to u_out.
    const double rc_in = reduced_cost(in_arc);
    std::size_t w = side == 1 ? first : second;
    std::size_t new_parent = side == 1 ? second : first;
    std::size_t new_pred = in_arc;
    char new_up = side == 1 ? 1 : 0;
    const std::size_t stem_base = w;
    while (true) {
      const std::size_t old_parent = parent_[w];
      const std::size_t old_pred = pred_[w];
      const char old_up = up_[w];
      detach(w);
      attach(w, new_parent);
      pred_[w] = new_pred;
      up_[w] = new_up;
      if (w == u_out) break;
      new_parent = w;
      new_pred = old_pred;
      new_up = old_up ? 0 : 1;
      w = old_parent;
    }

    // The whole re-hung subtree shifts by one constant so that in_arc gets a
    // zero reduced cost; depths are recomputed on the way.
    const double sigma = side == 1 ? -rc_in : rc_in;
    stack_.clear();
    stack_.push_back(stem_base);
    while (!stack_.empty()) {
      const std::size_t v = stack_.back();
      stack_.pop_back();
      pi_[v] += sigma;
      depth_[v] = depth_[parent_[v]] + 1;
      for (std::size_t c = first_child_[v]; c != kNone; c = next_sib_[c]) stack_.push_back(c);
    }
  }

  std::size_t m_, n_;
  const CostMatrix& costs_;
  std::size_t num_real_ = 0, num_nodes_ = 0, root_ = 0;
  double art_cost_ = 0.0, rc_tol_ = 0.0;
  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<std::size_t> art_src_, art_tgt_;
  std::vector<std::size_t> parent_, pred_, depth_, first_child_, next_sib_, prev_sib_;
  std::vector<char> up_;
  std::vector<double> pi_;
  std::vector<std::size_t> stack_;
  std::size_t block_ = 10, next_arc_ = 0;
};

// Successive shortest paths for uniform sources and integral sink
// capacities. Each source sits at one sink; h holds shortest-path labels on
// the sinks so that every rerouting arc has a nonnegative reduced cost.
// Heap (i, k) holds (c_lk - c_li, l) for sources l at sink i; entries whose
// source has since moved are dropped lazily.
class CapacitatedAssignment {
 public:
  CapacitatedAssignment(const CostMatrix& costs, std::vector<std::size_t> cap)
      : costs_(costs), m_(costs.rows()), n_(costs.cols()), cap_(std::move(cap)) {
    assigned_.assign(m_, kNone);
    count_.assign(n_, 0);
    h_.assign(n_, 0.0);
    heaps_.resize(n_ * n_);
    dist_.resize(n_);
    prev_.resize(n_);
    via_.resize(n_);
    done_.resize(n_);
  }

  std::size_t run() {
    for (std::size_t j = 0; j < m_; ++j) insert(j);
    return m_;
  }

  std::size_t sink_of(std::size_t j) const { return assigned_[j]; }
  double label(std::size_t i) const { return h_[i]; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  using Entry = std::pair<double, std::size_t>;
  using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>>;

  const Entry* top(std::size_t i, std::size_t k) {
    auto& heap = heaps_[i * n_ + k];
    while (!heap.empty() && assigned_[heap.top().second] != i) heap.pop();
    return heap.empty() ? nullptr : &heap.top();
  }

  void place(std::size_t l, std::size_t i) {
    assigned_[l] = i;
    const auto c = costs_.row(l);
    for (std::size_t k = 0; k < n_; ++k)
      if (k != i) heaps_[i * n_ + k].push({c[k] - c[i], l});
  }

  void insert(std::size_t j) {
    const auto c = costs_.row(j);
    double hj = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) hj = std::max(hj, h_[i] - c[i]);
    for (std::size_t i = 0; i < n_; ++i) {
      dist_[i] = c[i] + hj - h_[i];
      prev_[i] = kNone;
      done_[i] = 0;
    }
    // Dense Dijkstra over the sinks.
    for (std::size_t round = 0; round < n_; ++round) {
      std::size_t u = kNone;
      for (std::size_t i = 0; i < n_; ++i)
        if (!done_[i] && (u == kNone || dist_[i] < dist_[u])) u = i;
      done_[u] = 1;
      for (std::size_t k = 0; k < n_; ++k) {
        if (done_[k]) continue;
        const Entry* e = top(u, k);
        if (!e) continue;
        const double nd = dist_[u] + std::max(0.0, e->first + h_[u] - h_[k]);
        if (nd < dist_[k]) {
          dist_[k] = nd;
          prev_[k] = u;
          via_[k] = e->second;
        }
      }
    }
    std::size_t t = kNone;
    for (std::size_t i = 0; i < n_; ++i)
      if (count_[i] < cap_[i] && (t == kNone || dist_[i] + h_[i] < dist_[t] + h_[t])) t = i;
    if (t == kNone) throw std::runtime_error("exact_discrete_ot: sink capacities exhausted");

    std::size_t v = t;
    while (prev_[v] != kNone) {
      place(via_[v], v);
      v = prev_[v];
    }
    place(j, v);
    ++count_[t];

    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      h_[i] += dist_[i];
      lo = std::min(lo, h_[i]);
    }
    for (double& x : h_) x -= lo;
  }

  const CostMatrix& costs_;
  std::size_t m_, n_;
  std::vector<std::size_t> cap_, assigned_, count_;
  std::vector<double> h_;
  std::vector<MinHeap> heaps_;
  std::vector<double> dist_;
  std::vector<std::size_t> prev_, via_;
  std::vector<char> done_;
};

void check_marginal(std::span<const double> w, const char* name) {
  if (w.empty()) throw std::invalid_argument(std::string("exact_discrete_ot: empty ") + name);
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("exact_discrete_ot: invalid weight in ") + name);
}

}  // namespace

CostMatrix cost_matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionMismatch("cost_matrix_from_rows: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return CostMatrix(rows.size(), cols, std::move(data));
}

std::optional<std::vector<std::size_t>> integral_capacities(std::span<const double> mu, std::span<const double> nu) {
  if (mu.empty() || nu.empty()) return std::nullopt;
  for (double w : mu)
    if (std::abs(w - mu[0]) > 1e-12 * mu[0]) return std::nullopt;
  const double m = static_cast<double>(mu.size());
  std::vector<std::size_t> cap(nu.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double target = nu[i] * m;
    const double r = std::round(target);
    if (std::abs(target - r) > 1e-6 || r < 0.0) return std::nullopt;
    cap[i] = static_cast<std::size_t>(r);
    total += cap[i];
  }
  if (total != mu.size()) return std::nullopt;
  return cap;
}

ExactOtResult exact_discrete_ot(std::span<const double> mu, std::span<const double> nu, const CostMatrix& costs,
                                std::size_t max_arcs, OtAlgorithm algorithm) {
  check_marginal(mu, "mu");
  check_marginal(nu, "nu");
  if (costs.rows() != mu.size() || costs.cols() != nu.size())
    throw DimensionMismatch("exact_discrete_ot: cost matrix does not match the marginals");
  if (mu.size() * nu.size() > max_arcs) throw std::length_error("exact_discrete_ot: instance exceeds the arc limit");
  const double total_mu = std::accumulate(mu.begin(), mu.end(), 0.0);
  const double total_nu = std::accumulate(nu.begin(), nu.end(), 0.0);
  if (std::abs(total_mu - total_nu) > 1e-9 * std::max(1.0, total_mu))
    throw std::invalid_argument("exact_discrete_ot: marginals have different total mass");

  ExactOtResult res;
  const std::size_t n = nu.size();
  if (algorithm != OtAlgorithm::network_simplex) {
    auto cap = integral_capacities(mu, nu);
    if (!cap && algorithm == OtAlgorithm::assignment)
      throw std::invalid_argument("exact_discrete_ot: assignment needs uniform mu and integral M nu_i");
    if (cap) {
      CapacitatedAssignment sa(costs, std::move(*cap));
      res.pivots = sa.run();
      res.phi.resize(n);
      double mean = 0.0;
      // Every source sits at an argmax of label - cost, so the labels are optimal potentials.
      for (std::size_t i = 0; i < n; ++i) mean += sa.label(i);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) res.phi[i] = sa.label(i) - mean;
      res.psi.resize(mu.size());
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const std::size_t i = sa.sink_of(j);
        res.plan.push_back({j, i, mu[j]});
        res.value += mu[j] * costs(j, i);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) best = std::max(best, res.phi[k] - costs(j, k));
        res.psi[j] = best;
      }
      return res;
    }
  }

  TransportSimplex ns(mu, nu, costs);
  res.pivots = ns.run();

  for (std::size_t a = ns.num_real(); a < ns.num_arcs(); ++a)
    if (ns.flow(a) > 1e-9) throw std::runtime_error("exact_discrete_ot: infeasible marginals");
  for (std::size_t a = 0; a < ns.num_real(); ++a) {
    const double f = ns.flow(a);
    if (f > 0.0) {
      res.plan.push_back({a / n, a % n, f});
      res.value += f * costs(a / n, a % n);
    }
  }
  // Potentials relative to the sinks' mean, with phi_i - psi_j <= c_ji.
  res.phi.resize(n);
  res.psi.resize(mu.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += ns.potential(mu.size() + i);
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) res.phi[i] = ns.potential(mu.size() + i) - mean;
  for (std::size_t j = 0; j < mu.size(); ++j) res.psi[j] = ns.potential(j) - mean;
  return res;
}

ExactOtResult exact_discrete_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& c,
                                std::size_t max_arcs, OtAlgorithm algorithm) {
  if (mu.size() * nu.size() > max_arcs) throw std::length_error("exact_discrete_ot: instance exceeds the arc limit");
  const auto costs = CostMatrix::build(mu.atoms(), nu, c);
  return exact_discrete_ot(mu.weights(), nu.weights(), costs, max_arcs, algorithm);
}

}  // namespace sdot
