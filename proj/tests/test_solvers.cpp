#include <gtest/gtest.h>

#include <cmath>

#include "spherex/solvers.hpp"

namespace {

using namespace spherex;

const IntegrandSpec kQuad = IntegrandSpec::affine_quadratic(1.0, 1.0);
const IntegrandSpec kZero = IntegrandSpec::zero();

GalerkinSpace unit_space(int n = 64) { return build_space(0.0, 1.0, n); }

// Minimizer of J + lambda_floor (||u||^2 + I) for f = a xi + c xi^2 / 2 and
// g = cg (xi^2 + eta^2) / 2 over the full space, by a dense linear solve.
// Returns ||u||^2 + I(u) at that minimizer.
double dense_delta(const GalerkinSpace& s, double a, double c, double cg, double sign) {
  const double floor = std::abs(c) / (2.0 - cg);
  const Eigen::MatrixXd A = (2.0 + cg) * floor * s.gram() + sign * c * s.mass();
  const Eigen::VectorXd rhs = -sign * a * (s.mass() * Eigen::VectorXd::Ones(s.n_nodes()));
  const Eigen::VectorXd u = A.ldlt().solve(rhs);
  return (1.0 + 0.5 * cg) * u.dot(s.gram() * u);
}

TEST(LambdaFloor, Examples) {
  EXPECT_EQ(lambda_floor(kQuad, kZero), 0.5);
  EXPECT_EQ(lambda_floor(IntegrandSpec::neg_norm_sq(), kZero), 1.0);
  EXPECT_NEAR(lambda_floor(kQuad, IntegrandSpec::quadratic_g(0.5)), 2.0 / 3.0, 1e-16);
}

TEST(V0Condition, Examples) {
  const GalerkinSpace s = unit_space();
  const V0Report q = v0_condition(s, Subspace::full(), kQuad);
  EXPECT_TRUE(q.holds);
  EXPECT_NEAR(q.functional_norm, 1.0, 1e-12);
  EXPECT_LT((q.witness.coeffs.array() - 1.0).abs().maxCoeff(), 1e-12);
  const V0Report n = v0_condition(s, Subspace::full(), IntegrandSpec::neg_norm_sq());
  EXPECT_FALSE(n.holds);
  EXPECT_EQ(n.functional_norm, 0.0);
  const V0Report e = v0_condition(s, Subspace::custom(s, Eigen::MatrixXd(65, 0)), kQuad);
  EXPECT_FALSE(e.holds);
}

TEST(InnerMinimize, ConstantMinimizer) {
  const GalerkinSpace s = unit_space();
  for (bool accelerate : {true, false}) {
    SolverOptions opts;
    opts.accelerate = accelerate;
    const InnerSolveResult r = inner_minimize(s, Subspace::full(), kQuad, kZero, 2.0, s.zero_field(), opts);
    ASSERT_EQ(r.status, InnerStatus::converged);
    EXPECT_LE(r.grad_norm, opts.tol_g);
    EXPECT_LT((r.u.coeffs.array() + 0.2).abs().maxCoeff(), 1e-9);
    EXPECT_NEAR(r.value, -0.10, 1e-12);
  }
}

TEST(InnerMinimize, FlatObjectiveReturnsStart) {
  const GalerkinSpace s = unit_space(16);
  Rng rng(1);
  const Field start = random_field(s, Subspace::full(), rng, 0.7);
  const InnerSolveResult r =
      inner_minimize(s, Subspace::full(), IntegrandSpec::neg_norm_sq(), kZero, 1.0, start);
  EXPECT_EQ(r.status, InnerStatus::converged);
  EXPECT_LT(h1_distance(s, r.u, start), 1e-12);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(InnerMinimize, DivergesBelowFloor) {
  const GalerkinSpace s = unit_space(16);
  Rng rng(1);
  const Field start = random_field(s, Subspace::full(), rng, 0.1);
  const InnerSolveResult r =
      inner_minimize(s, Subspace::full(), IntegrandSpec::neg_norm_sq(), kZero, 0.4, start);
  EXPECT_EQ(r.status, InnerStatus::diverged);
  EXPECT_THROW(inner_minimize(s, Subspace::full(), kQuad, kZero, -1.0, start), PreconditionError);
}

TEST(InnerMinimize, StaysInSubspace) {
  const GalerkinSpace s = unit_space(32);
  const Subspace V = Subspace::zero_boundary(s);
  const InnerSolveResult r = inner_minimize(s, V, kQuad, kZero, 2.0, Field::constant(33, 1.0));
  ASSERT_EQ(r.status, InnerStatus::converged);
  EXPECT_EQ(r.u[0], 0.0);
  EXPECT_EQ(r.u[32], 0.0);
  EXPECT_LT(r.grad_norm, 1e-10);
}

TEST(ConstraintValue, Examples) {
  const GalerkinSpace s = unit_space();
  const Subspace V = Subspace::full();
  EXPECT_NEAR(constraint_value(s, V, kQuad, kZero, 2.0).c, 0.04, 1e-12);
  EXPECT_NEAR(constraint_value(s, V, kQuad, kZero, 0.5).c, 0.25, 1e-12);
  const double c1 = constraint_value(s, V, kQuad, kZero, 1.0).c;
  const double c10 = constraint_value(s, V, kQuad, kZero, 10.0).c;
  const double c100 = constraint_value(s, V, kQuad, kZero, 100.0).c;
  EXPECT_GT(c1, c10);
  EXPECT_GT(c10, c100);
  EXPECT_EQ(constraint_value(s, V, kQuad.negated(), kZero, 0.5).c,
            std::numeric_limits<double>::infinity());
}

TEST(ConstraintValue, MatchesClosedFormOnAGrid) {
  const GalerkinSpace s = unit_space();
  for (int k = 0; k < 20; ++k) {
    const double lambda = 0.5 + 0.25 * k;
    const double expected = 1.0 / ((1.0 + 2.0 * lambda) * (1.0 + 2.0 * lambda));
    EXPECT_NEAR(constraint_value(s, Subspace::full(), kQuad, kZero, lambda).c, expected, 1e-8);
  }
}

TEST(ConstraintValue, MaxIterationsThrows) {
  const GalerkinSpace s = unit_space();
  SolverOptions opts;
  opts.max_iters = 2;
  EXPECT_THROW(constraint_value(s, Subspace::full(), IntegrandSpec::sincos(), kZero, 1.5, opts),
               InconclusiveSolve);
}

TEST(SolveSphere, QuadraticMinAndMax) {
  const GalerkinSpace s = unit_space();
  const SaddleResult lo = solve_sphere(s, Subspace::full(), kQuad, kZero, 0.04, Sense::min);
  EXPECT_TRUE(lo.certified);
  EXPECT_NEAR(lo.lambda_star, 2.0, 1e-6);
  EXPECT_NEAR(lo.j_value, -0.18, 1e-8);
  EXPECT_LE(lo.constraint_residual, 1e-8 * 0.04);
  EXPECT_LT((lo.u_star.coeffs.array() + 0.2).abs().maxCoeff(), 1e-6);

  const SaddleResult hi = solve_sphere(s, Subspace::full(), kQuad, kZero, 0.04, Sense::max);
  EXPECT_TRUE(hi.certified);
  EXPECT_NEAR(hi.lambda_star, 3.0, 1e-6);
  EXPECT_NEAR(hi.j_value, 0.22, 1e-8);
  EXPECT_TRUE(hi.s_empty_branch);
}

TEST(SolveSphere, MatchesClosedFormOverRadii) {
  const GalerkinSpace s = unit_space();
  for (double r : {0.01, 0.05, 0.1, 0.2}) {
    const SaddleResult lo = solve_sphere(s, Subspace::full(), kQuad, kZero, r, Sense::min);
    const SaddleResult hi = solve_sphere(s, Subspace::full(), kQuad, kZero, r, Sense::max);
    EXPECT_NEAR(lo.j_value, -std::sqrt(r) + r / 2, 1e-6);
    EXPECT_NEAR(hi.j_value, std::sqrt(r) + r / 2, 1e-6);
    EXPECT_NEAR(lo.lambda_star, (1.0 / std::sqrt(r) - 1.0) / 2.0, 1e-5);
    EXPECT_NEAR(hi.lambda_star, (1.0 / std::sqrt(r) + 1.0) / 2.0, 1e-5);
  }
}

TEST(SolveSphere, RadiusTooLarge) {
  const GalerkinSpace s = unit_space();
  try {
    solve_sphere(s, Subspace::full(), kQuad, kZero, 0.3, Sense::min);
    FAIL() << "expected RadiusTooLarge";
  } catch (const RadiusTooLarge& e) {
    EXPECT_EQ(e.radius(), 0.3);
    EXPECT_NEAR(e.c_at_floor(), 0.25, 1e-7);
  }
  EXPECT_THROW(solve_sphere(s, Subspace::full(), kQuad, kZero, 0.0, Sense::min), PreconditionError);
  EXPECT_THROW(solve_sphere(s, Subspace::full(), kQuad, kZero, -1.0, Sense::max), PreconditionError);
}

TEST(SolveSphere, MaxEqualsMinOfNegation) {
  const GalerkinSpace s = unit_space(32);
  const IntegrandSpec f = IntegrandSpec::sincos();
  const SaddleResult hi = solve_sphere(s, Subspace::full(), f, kZero, 0.04, Sense::max);
  const SaddleResult neg = solve_sphere(s, Subspace::full(), f.negated(), kZero, 0.04, Sense::min);
  EXPECT_EQ(hi.u_star.coeffs, neg.u_star.coeffs);
  EXPECT_EQ(hi.lambda_star, neg.lambda_star);
  EXPECT_EQ(hi.j_value, -neg.j_value);
}

TEST(SolveSphere, ZeroBoundaryWithPenalty) {
  const GalerkinSpace s = unit_space(32);
  const Subspace V = Subspace::zero_boundary(s);
  const IntegrandSpec g = IntegrandSpec::quadratic_g(0.5);
  const SaddleResult res = solve_sphere(s, V, kQuad, g, 0.01, Sense::min);
  EXPECT_TRUE(res.certified);
  EXPECT_EQ(res.u_star[0], 0.0);
  EXPECT_EQ(res.u_star[32], 0.0);
  EXPECT_NEAR(constraint_functional(s, g, res.u_star), 0.01, 1e-10);
}

TEST(ComputeDelta, QuadraticSides) {
  const GalerkinSpace s = unit_space();
  const DeltaReport lo = compute_delta(s, Subspace::full(), kQuad, kZero, Sense::min, 8, 1);
  EXPECT_EQ(lo.status, DeltaStatus::finite);
  EXPECT_NEAR(lo.delta, 0.25, 1e-9);
  ASSERT_TRUE(lo.minimizer.has_value());
  EXPECT_LT((lo.minimizer->coeffs.array() + 0.5).abs().maxCoeff(), 1e-8);
  EXPECT_LT(lo.multistart_spread, 1e-8);

  const DeltaReport hi = compute_delta(s, Subspace::full(), kQuad, kZero, Sense::max, 8, 1);
  EXPECT_EQ(hi.status, DeltaStatus::s_empty);
  EXPECT_EQ(hi.delta, std::numeric_limits<double>::infinity());
}

TEST(ComputeDelta, FlatAtZero) {
  const GalerkinSpace s = unit_space();
  const DeltaReport d =
      compute_delta(s, Subspace::full(), IntegrandSpec::neg_norm_sq(), kZero, Sense::min, 8, 1);
  EXPECT_EQ(d.status, DeltaStatus::flat_at_zero);
  EXPECT_EQ(d.delta, 0.0);
}

TEST(ComputeDelta, MatchesDenseSolveWithPenalty) {
  const GalerkinSpace s = unit_space(32);
  for (double cg : {0.3, 0.5, 1.2}) {
    for (auto [a, c] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}}) {
      const IntegrandSpec f = IntegrandSpec::affine_quadratic(a, c);
      const IntegrandSpec g = IntegrandSpec::quadratic_g(cg);
      const Thresholds t = compute_thresholds(s, Subspace::full(), f, g, 4, 3);
      const double lo = dense_delta(s, a, c, cg, 1.0);
      const double hi = dense_delta(s, a, c, cg, -1.0);
      EXPECT_NEAR(t.min_side.delta, lo, 1e-8 * lo) << "cg=" << cg << " a=" << a << " c=" << c;
      EXPECT_NEAR(t.max_side.delta, hi, 1e-8 * hi) << "cg=" << cg << " a=" << a << " c=" << c;
      EXPECT_EQ(t.delta1, std::min(t.min_side.delta, t.max_side.delta));
    }
  }
}

TEST(ComputeDelta, ParallelAgreesWithSequential) {
  const GalerkinSpace s = unit_space(32);
  SolverOptions par;
  par.parallel = true;
  const IntegrandSpec g = IntegrandSpec::quadratic_g(0.5);
  const DeltaReport a = compute_delta(s, Subspace::full(), kQuad, g, Sense::max, 6, 9);
  const DeltaReport b = compute_delta(s, Subspace::full(), kQuad, g, Sense::max, 6, 9, par);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.multistart_spread, b.multistart_spread);
}

TEST(ComputeDelta, MaxEqualsMinOfNegation) {
  const GalerkinSpace s = unit_space(32);
  const IntegrandSpec g = IntegrandSpec::quadratic_g(0.4);
  const DeltaReport a = compute_delta(s, Subspace::full(), kQuad, g, Sense::max, 4, 2);
  const DeltaReport b = compute_delta(s, Subspace::full(), kQuad.negated(), g, Sense::min, 4, 2);
  EXPECT_EQ(a.delta, b.delta);
}

TEST(Thresholds, RadiusBelowDeltaCertifiesAndAboveIsRejected) {
  const GalerkinSpace s = unit_space(32);
  for (auto [a, c] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}}) {
    const IntegrandSpec f = IntegrandSpec::affine_quadratic(a, c);
    const Thresholds t = compute_thresholds(s, Subspace::full(), f, kZero, 4, 1);
    EXPECT_NEAR(t.delta, a * a / (4 * c * c), 1e-9 * t.delta);
    EXPECT_TRUE(solve_sphere(s, Subspace::full(), f, kZero, 0.99 * t.delta, Sense::min).certified);
    EXPECT_THROW(solve_sphere(s, Subspace::full(), f, kZero, 1.01 * t.delta, Sense::min),
                 RadiusTooLarge);
  }
}

TEST(Thresholds, V0HoldsExactlyWhenDeltaPositive) {
  const GalerkinSpace s = unit_space(32);
  for (const IntegrandSpec& f : {kQuad, IntegrandSpec::sincos(), IntegrandSpec::neg_norm_sq(),
                                 IntegrandSpec::affine_quadratic(0.0, 1.0)}) {
    const V0Report v0 = v0_condition(s, Subspace::full(), f);
    const DeltaReport d = compute_delta(s, Subspace::full(), f, kZero, Sense::min, 4, 1);
    if (d.status == DeltaStatus::s_empty) continue;
    EXPECT_EQ(v0.holds, d.delta > 0.0) << f.name();
  }
}

}  // namespace
