#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sdot/core/measure.hpp"

namespace sdot {

std::uint64_t splitmix64(std::uint64_t x);
// Child seed for an independent stream, e.g. one per (run, purpose).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

enum class SamplerKind { gaussian, hypercube, empirical };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::gaussian;
  std::size_t dim = 1;
  std::uint64_t seed = 0;
  PointSet points;              // empirical only
  std::vector<double> weights;  // empirical only

  static SamplerSpec gaussian(std::size_t dim, std::uint64_t seed);
  static SamplerSpec hypercube(std::size_t dim, std::uint64_t seed);
  static SamplerSpec empirical(DiscreteMeasure m, std::uint64_t seed);

  SamplerSpec with_seed(std::uint64_t s) const {
    SamplerSpec c = *this;
    c.seed = s;
    return c;
  }
};

// Stateful stream of i.i.d. draws. Drawing n then m points yields the same
// points as drawing n+m at once.
class Sampler {
 public:
  explicit Sampler(SamplerSpec spec);

  std::size_t dim() const { return spec_.dim; }
  void next(std::span<double> out);
  PointSet draw(std::size_t n);
  const SamplerSpec& spec() const { return spec_; }

 private:
  SamplerSpec spec_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::discrete_distribution<std::size_t> pick_;
};

PointSet draw(const SamplerSpec& spec, std::size_t n);

}  // namespace sdot
