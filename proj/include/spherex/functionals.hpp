#ifndef SPHEREX_FUNCTIONALS_HPP
#define SPHEREX_FUNCTIONALS_HPP

// Integral functionals F(u) = int f(u, u') dx and their derivatives
//   <F'(u), v> = int (f_xi(u, u') v + f_eta(u, u') v') dx,
// both evaluated with the space's element quadrature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "spherex/galerkin.hpp"
#include "spherex/integrand.hpp"
#include "spherex/sampling.hpp"

namespace spherex {

template <PointIntegrand F>
double eval_functional(const GalerkinSpace& space, const F& f, const Field& u) {
  double total = 0.0;
  space.for_each_quad_point(u, [&](int, double, double w, double val, double slope, double,
                                   double) { total += w * f.value(val, slope); });
  return total;
}

template <PointIntegrand F>
DualVector assemble_derivative(const GalerkinSpace& space, const F& f, const Field& u) {
  DualVector d = DualVector::zeros(space.n_nodes());
  const double inv_h = 1.0 / space.h();
  space.for_each_quad_point(u, [&](int e, double, double w, double val, double slope,
                                   double phi_l, double phi_r) {
    const Gradient g = f.gradient(val, slope);
    d.entries[e] += w * (g.d_xi * phi_l - g.d_eta * inv_h);
    d.entries[e + 1] += w * (g.d_xi * phi_r + g.d_eta * inv_h);
  });
  return d;
}

/// Worst relative error between the assembled derivative paired with 20
/// random unit directions and central differences of the functional. Errors
/// are relative to the dual norm of the derivative, so directions nearly
/// orthogonal to it are not penalized; both sides zero counts as error 0.
template <PointIntegrand F>
double fd_gradient_check(const GalerkinSpace& space, const F& f, const Field& u, double h,
                         std::uint64_t seed = 7) {
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
  const DualVector d = assemble_derivative(space, f, u);
  const double dual_norm = h1_norm(space, riesz(space, d));
  Rng rng(seed);
  const Subspace all = Subspace::full();
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Field v = random_field(space, all, rng, 1.0);
    const double analytic = d.pair(v);
    const double fd =
        (eval_functional(space, f, u + h * v) - eval_functional(space, f, u - h * v)) / (2.0 * h);
    const double err = std::abs(analytic - fd);
    if (err == 0.0) continue;
    const double scale = std::max(dual_norm, std::abs(fd));
    worst = std::max(worst, scale > 0.0 ? err / scale : std::numeric_limits<double>::infinity());
  }
  return worst;
}

}  // namespace spherex

#endif  // SPHEREX_FUNCTIONALS_HPP
