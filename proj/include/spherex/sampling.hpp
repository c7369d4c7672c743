#ifndef SPHEREX_SAMPLING_HPP
#define SPHEREX_SAMPLING_HPP

#include <cstdint>
#include <random>

#include "spherex/galerkin.hpp"

namespace spherex {

using Rng = std::mt19937_64;

/// Independent standard-normal nodal coefficients, projected onto V and
/// rescaled to the requested H1 norm. Returns zero when V is trivial.
inline Field random_field(const GalerkinSpace& space, const Subspace& V, Rng& rng,
                          double h1_norm_target) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Field u = space.zero_field();
  for (Eigen::Index i = 0; i < u.size(); ++i) u.coeffs[i] = normal(rng);
  u = V.project(space, u);
  const double n = h1_norm(space, u);
  if (n == 0.0) return space.zero_field();
  u *= h1_norm_target / n;
  return u;
}

/// Random field with H1 norm uniform in (0, max_norm].
inline Field random_field_in_ball(const GalerkinSpace& space, const Subspace& V, Rng& rng,
                                  double max_norm) {
  std::uniform_real_distribution<double> radius(0.0, max_norm);
  const double r = max_norm - radius(rng);
  return random_field(space, V, rng, r);
}

}  // namespace spherex

#endif  // SPHEREX_SAMPLING_HPP
