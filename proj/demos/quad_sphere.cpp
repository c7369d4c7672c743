// Minimum and maximum of J(u) = int (u + u^2/2) on spheres ||u||^2 = r of
// H1(0, 1), compared with the closed forms -sqrt(r) + r/2 and sqrt(r) + r/2.

#include <cmath>
#include <cstdio>

#include "spherex/spherex.hpp"

int main() {
  using namespace spherex;
  const GalerkinSpace space = build_space(0.0, 1.0, 64);
  const Subspace V = Subspace::full();
  const IntegrandSpec f = IntegrandSpec::affine_quadratic(1.0, 1.0);
  const IntegrandSpec g = IntegrandSpec::zero();

  const Thresholds t = compute_thresholds(space, V, f, g, 8, 1);
  std::printf("delta = %.10g, delta1 = %.10g\n", t.delta, t.delta1);

  std::printf("%8s %12s %14s %14s %12s %14s %14s\n", "r", "lambda_min", "J_min", "closed form",
              "lambda_max", "J_max", "closed form");
  for (double r = 0.02; r < t.delta1; r += 0.04) {
    const SaddleResult lo = solve_sphere(space, V, f, g, r, Sense::min);
    const SaddleResult hi = solve_sphere(space, V, f, g, r, Sense::max);
    std::printf("%8.3f %12.8f %14.10f %14.10f %12.8f %14.10f %14.10f\n", r, lo.lambda_star, lo.j_value,
                -std::sqrt(r) + r / 2, hi.lambda_star, hi.j_value, std::sqrt(r) + r / 2);
  }
  return 0;
}
