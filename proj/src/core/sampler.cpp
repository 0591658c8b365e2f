#include "sdot/core/sampler.hpp"

#include <stdexcept>

namespace sdot {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

SamplerSpec SamplerSpec::gaussian(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("SamplerSpec: dimension must be positive");
  return {SamplerKind::gaussian, dim, seed, {}, {}};
}

SamplerSpec SamplerSpec::hypercube(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("SamplerSpec: dimension must be positive");
  return {SamplerKind::hypercube, dim, seed, {}, {}};
}

SamplerSpec SamplerSpec::empirical(DiscreteMeasure m, std::uint64_t seed) {
  std::vector<double> w(m.weights().begin(), m.weights().end());
  return {SamplerKind::empirical, m.dim(), seed, m.atoms(), std::move(w)};
}

Sampler::Sampler(SamplerSpec spec) : spec_(std::move(spec)), engine_(spec_.seed) {
  if (spec_.dim == 0) throw std::invalid_argument("Sampler: dimension must be positive");
  if (spec_.kind == SamplerKind::empirical) {
    // Validates the weights as a probability vector.
    DiscreteMeasure check(spec_.points, spec_.weights);
    pick_ = std::discrete_distribution<std::size_t>(spec_.weights.begin(), spec_.weights.end());
  }
}

void Sampler::next(std::span<double> out) {
  if (out.size() != spec_.dim) throw DimensionMismatch("Sampler::next: output has wrong dimension");
  switch (spec_.kind) {
    case SamplerKind::gaussian:
      for (double& v : out) v = normal_(engine_);
      break;
    case SamplerKind::hypercube:
      for (double& v : out) v = unit_(engine_);
      break;
    case SamplerKind::empirical: {
      const auto row = spec_.points[pick_(engine_)];
      std::copy(row.begin(), row.end(), out.begin());
      break;
    }
  }
}

PointSet Sampler::draw(std::size_t n) {
  std::vector<double> flat(n * spec_.dim);
  for (std::size_t j = 0; j < n; ++j) next(std::span<double>(flat.data() + j * spec_.dim, spec_.dim));
  return PointSet(spec_.dim, std::move(flat));
}

PointSet draw(const SamplerSpec& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("draw: n must be at least 1");
  Sampler s(spec);
  return s.draw(n);
}

}  // namespace sdot
