#include <gtest/gtest.h>

#include <cmath>

#include "spherex/functionals.hpp"
#include "spherex/sampling.hpp"

namespace {

using namespace spherex;

// Pointwise sum of two integrands.
struct Sum {
  IntegrandSpec a, b;
  double value(double xi, double eta) const { return a.value(xi, eta) + b.value(xi, eta); }
  Gradient gradient(double xi, double eta) const {
    const Gradient ga = a.gradient(xi, eta), gb = b.gradient(xi, eta);
    return {ga.d_xi + gb.d_xi, ga.d_eta + gb.d_eta};
  }
};

// Composite Simpson with many panels per element applied to the P1
// interpolant; independent of the Gauss rule.
double simpson_functional(const GalerkinSpace& s, const IntegrandSpec& f, const Field& u) {
  double total = 0.0;
  const int panels = 200;
  for (int e = 0; e < s.n_elems(); ++e) {
    const double slope = (u[e + 1] - u[e]) / s.h();
    const double dx = s.h() / panels;
    for (int p = 0; p < panels; ++p) {
      const double t0 = p * dx, tm = t0 + 0.5 * dx, t1 = t0 + dx;
      total += dx / 6.0 *
               (f.value(u[e] + slope * t0, slope) + 4.0 * f.value(u[e] + slope * tm, slope) +
                f.value(u[e] + slope * t1, slope));
    }
  }
  return total;
}

TEST(EvalFunctional, Examples) {
  const GalerkinSpace s = build_space(0.0, 1.0, 32);
  const Field u = s.interpolate([](double x) { return std::sin(2 * x); });
  EXPECT_EQ(eval_functional(s, IntegrandSpec::zero(), u), 0.0);
  EXPECT_NEAR(eval_functional(s, IntegrandSpec::affine_quadratic(1, 1), Field::constant(33, -0.2)),
              -0.18, 1e-14);
}

TEST(EvalFunctional, NegNormSqIsMinusSquaredNorm) {
  const GalerkinSpace s = build_space(-1.0, 2.0, 40);
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const Field u = random_field(s, Subspace::full(), rng, 3.0);
    const double n2 = h1_norm_sq(s, u);
    EXPECT_NEAR(eval_functional(s, IntegrandSpec::neg_norm_sq(), u), -n2, 1e-12 * n2);
  }
}

TEST(EvalFunctional, AgreesWithIndependentQuadrature) {
  const GalerkinSpace s = build_space(0.0, 1.0, 32);
  Rng rng(8);
  for (const IntegrandSpec& f : {IntegrandSpec::sincos(), IntegrandSpec::affine_quadratic(0.3, -2.0),
                                 IntegrandSpec::cosine_well(1.5)}) {
    const Field u = random_field(s, Subspace::full(), rng, 1.0);
    EXPECT_NEAR(eval_functional(s, f, u), simpson_functional(s, f, u), 1e-10) << f.name();
  }
}

TEST(EvalFunctional, ShapeMismatchThrows) {
  const GalerkinSpace s = build_space(0.0, 1.0, 8);
  EXPECT_THROW(eval_functional(s, IntegrandSpec::sincos(), Field::zeros(4)), ShapeError);
  EXPECT_THROW(assemble_derivative(s, IntegrandSpec::sincos(), Field::zeros(10)), ShapeError);
}

TEST(AssembleDerivative, Examples) {
  const GalerkinSpace s = build_space(0.0, 1.0, 16);
  const Field u = s.interpolate([](double x) { return x * x; });
  EXPECT_EQ(assemble_derivative(s, IntegrandSpec::zero(), u).entries.cwiseAbs().maxCoeff(), 0.0);
  const DualVector d = assemble_derivative(s, IntegrandSpec::affine_quadratic(1, 1), s.zero_field());
  EXPECT_LT((d.entries - s.mass() * Eigen::VectorXd::Ones(17)).cwiseAbs().maxCoeff(), 1e-15);
  const DualVector n = assemble_derivative(s, IntegrandSpec::neg_norm_sq(), u);
  EXPECT_LT((n.entries + 2.0 * s.gram() * u.coeffs).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(AssembleDerivative, IsLinearInTheIntegrand) {
  const GalerkinSpace s = build_space(0.0, 1.0, 24);
  Rng rng(12);
  const IntegrandSpec f1 = IntegrandSpec::sincos();
  const IntegrandSpec f2 = IntegrandSpec::affine_quadratic(-0.5, 3.0);
  for (int k = 0; k < 10; ++k) {
    const Field u = random_field(s, Subspace::full(), rng, 2.0);
    const DualVector lhs = assemble_derivative(s, Sum{f1, f2}, u);
    const DualVector rhs = assemble_derivative(s, f1, u) + assemble_derivative(s, f2, u);
    EXPECT_LT((lhs.entries - rhs.entries).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(eval_functional(s, Sum{f1, f2}, u),
                eval_functional(s, f1, u) + eval_functional(s, f2, u), 1e-13);
  }
}

TEST(FdGradientCheck, Examples) {
  const GalerkinSpace s = build_space(0.0, 1.0, 16);
  Rng rng(2);
  const Field u = random_field(s, Subspace::full(), rng, 1.0);
  EXPECT_EQ(fd_gradient_check(s, IntegrandSpec::zero(), u, 1e-5), 0.0);
  EXPECT_LT(fd_gradient_check(s, IntegrandSpec::affine_quadratic(1, 1), u, 1e-5), 1e-10);
  EXPECT_LT(fd_gradient_check(s, IntegrandSpec::sincos(), u, 1e-5), 1e-6);
  EXPECT_THROW(fd_gradient_check(s, IntegrandSpec::sincos(), u, 0.0), PreconditionError);
}

TEST(FdGradientCheck, CatalogEntriesOnSeveralMeshes) {
  const std::vector<IntegrandSpec> specs{
      IntegrandSpec::affine_quadratic(2, -1), IntegrandSpec::neg_norm_sq(), IntegrandSpec::sincos(),
      IntegrandSpec::quadratic_g(0.7), IntegrandSpec::cosine_well(1.1)};
  for (int n : {8, 64}) {
    const GalerkinSpace s = build_space(0.0, 1.0, n);
    Rng rng(static_cast<std::uint64_t>(n));
    for (const auto& f : specs) {
      for (int k = 0; k < 5; ++k) {
        const Field u = random_field(s, Subspace::full(), rng, 1.5);
        EXPECT_LT(fd_gradient_check(s, f, u, 1e-5), 1e-6) << f.name() << " n=" << n;
      }
    }
  }
}

// <I'(u) - I'(v), w> + mu <J'(u) - J'(v), w> <= (nu + mu L) ||u - v|| ||w||.
TEST(AssembleDerivative, CombinedDerivativeIsLipschitz) {
  const GalerkinSpace s = build_space(0.0, 1.0, 32);
  const IntegrandSpec f = IntegrandSpec::sincos();
  const IntegrandSpec g = IntegrandSpec::cosine_well(0.8);
  Rng rng(31);
  for (double mu : {0.0, 0.5, 2.0}) {
    for (int k = 0; k < 50; ++k) {
      const Field u = random_field(s, Subspace::full(), rng, 4.0);
      const Field v = random_field(s, Subspace::full(), rng, 4.0);
      const Field w = random_field(s, Subspace::full(), rng, 1.0);
      const DualVector du = assemble_derivative(s, g, u) + mu * assemble_derivative(s, f, u);
      const DualVector dv = assemble_derivative(s, g, v) + mu * assemble_derivative(s, f, v);
      const double lhs = (du - dv).pair(w);
      EXPECT_LE(lhs, (g.lipschitz() + mu * f.lipschitz()) * h1_distance(s, u, v) + 1e-12);
    }
  }
}

}  // namespace
