#ifndef SPHEREX_SOLVERS_HPP
#define SPHEREX_SOLVERS_HPP

// Constrained extrema of J(u) = int f(u, u') on the generalized sphere
//   C_r = { u in V : ||u||^2 + I(u) = r }.
//
// The inner problem minimizes J + lambda (||u||^2 + I) over V. Its H1
// gradient is Lipschitz with constant lambda (2 + nu) + L and strongly
// monotone with modulus lambda (2 - nu) - L, so for lambda above
// lambda_floor = L / (2 - nu) it has exactly one minimizer u_lambda. The
// constraint map c(lambda) = ||u_lambda||^2 + I(u_lambda) is non-increasing;
// solve_sphere bisects it for c(lambda*) = r. When lambda* > lambda_floor the
// extremum on C_r is unique.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spherex/errors.hpp"
#include "spherex/functionals.hpp"
#include "spherex/galerkin.hpp"
#include "spherex/integrand.hpp"
#include "spherex/sampling.hpp"

namespace spherex {

enum class Sense { min, max };

inline std::string_view sense_name(Sense s) { return s == Sense::min ? "min" : "max"; }

struct SolverOptions {
  double tol_g = 1e-10;          // H1 norm of the projected gradient
  double tol_r = 1e-8;           // relative constraint residual
  int max_iters = 200000;        // inner iterations
  double r_max_guard = 1e6;      // iterate H1 norm that signals divergence
  bool accelerate = true;        // Nesterov momentum with gradient restart
  bool parallel = false;         // concurrent multistart runs
  int max_bisections = 200;
  int max_doublings = 100;
  double certificate_margin = 1e-6;  // relative margin above lambda_floor
  double floor_offset = 1e-8;        // bisection starts at lambda_floor (1 + offset)
};

enum class InnerStatus { converged, diverged, max_iters };

inline std::string_view status_name(InnerStatus s) {
  switch (s) {
    case InnerStatus::converged: return "converged";
    case InnerStatus::diverged: return "diverged";
    case InnerStatus::max_iters: return "max_iters";
  }
  return "unknown";
}

struct InnerSolveResult {
  Field u;
  double value = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  InnerStatus status = InnerStatus::max_iters;
};

/// L / (2 - nu): the smallest multiplier for which J + lambda (||.||^2 + I)
/// is convex.
inline double lambda_floor(const IntegrandSpec& f, const IntegrandSpec& g) {
  return f.lipschitz() / (2.0 - g.lipschitz());
}

/// ||u||^2 + I(u).
inline double constraint_functional(const GalerkinSpace& space, const IntegrandSpec& g,
                                    const Field& u) {
  return h1_norm_sq(space, u) + eval_functional(space, g, u);
}

/// J(u) + lambda (||u||^2 + I(u)).
inline double penalized_value(const GalerkinSpace& space, const IntegrandSpec& f,
                              const IntegrandSpec& g, double lambda, const Field& u) {
  return eval_functional(space, f, u) + lambda * constraint_functional(space, g, u);
}

/// Derivative of J + lambda (||.||^2 + I) at u as a dual vector.
inline DualVector penalized_derivative(const GalerkinSpace& space, const IntegrandSpec& f,
                                       const IntegrandSpec& g, double lambda, const Field& u) {
  DualVector d = assemble_derivative(space, f, u);
  DualVector reg = assemble_derivative(space, g, u);
  reg += 2.0 * gram_apply(space, u);
  d += lambda * reg;
  return d;
}

/// Riesz-preconditioned gradient descent on J + lambda (||.||^2 + I) over V
/// with the fixed step 1 / (lambda (2 + nu) + L). With opts.accelerate the
/// step is combined with Nesterov momentum and reset whenever the momentum
/// opposes the gradient; without it the iteration is plain gradient descent.
inline InnerSolveResult inner_minimize(const GalerkinSpace& space, const Subspace& V,
                                       const IntegrandSpec& f, const IntegrandSpec& g,
                                       double lambda, const Field& start,
                                       const SolverOptions& opts = {}) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("inner_minimize needs a finite lambda >= 0");
  }
  space.check(start, "start");
  const double step = 1.0 / (lambda * (2.0 + g.lipschitz()) + f.lipschitz());

  InnerSolveResult res;
  Field x = V.project(space, start);
  Field y = x;
  double t = 1.0;
  for (int k = 0;; ++k) {
    const Field w = riesz_in(space, V, penalized_derivative(space, f, g, lambda, y));
    const double gn = h1_norm(space, w);
    res.iters = k;
    if (!std::isfinite(gn)) {
      res.u = y;
      res.grad_norm = gn;
      res.status = InnerStatus::diverged;
      break;
    }
    if (gn <= opts.tol_g) {
      res.u = y;
      res.grad_norm = gn;
      res.status = InnerStatus::converged;
      break;
    }
    if (k >= opts.max_iters) {
      res.u = y;
      res.grad_norm = gn;
      res.status = InnerStatus::max_iters;
      break;
    }
    Field x_next = y - step * w;
    const double norm_next = h1_norm(space, x_next);
    if (!(norm_next <= opts.r_max_guard)) {
      res.u = std::move(x_next);
      res.grad_norm = gn;
      res.status = InnerStatus::diverged;
      res.iters = k + 1;
      return res;
    }
    if (!opts.accelerate) {
      x = std::move(x_next);
      y = x;
      continue;
    }
    const Field moved = x_next - x;
    if (h1_inner(space, w, moved) > 0.0) {
      t = 1.0;
      y = x_next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_next + ((t - 1.0) / t_next) * moved;
      t = t_next;
    }
    x = std::move(x_next);
  }
  res.value = penalized_value(space, f, g, lambda, res.u);
  return res;
}

struct ConstraintEval {
  double lambda = 0.0;
  // +inf when the inner solve diverged.
  double c = 0.0;
  InnerSolveResult inner;
};

/// c(lambda) = ||u_lambda||^2 + I(u_lambda) at the inner minimizer. A
/// diverged inner solve yields c = +inf; running out of iterations throws.
inline ConstraintEval constraint_value(const GalerkinSpace& space, const Subspace& V,
                                       const IntegrandSpec& f, const IntegrandSpec& g,
                                       double lambda, const SolverOptions& opts = {},
                                       const std::optional<Field>& start = std::nullopt) {
  ConstraintEval ev;
  ev.lambda = lambda;
  ev.inner = inner_minimize(space, V, f, g, lambda, start ? *start : space.zero_field(), opts);
  switch (ev.inner.status) {
    case InnerStatus::converged:
      ev.c = constraint_functional(space, g, ev.inner.u);
      break;
    case InnerStatus::diverged:
      ev.c = std::numeric_limits<double>::infinity();
      break;
    case InnerStatus::max_iters:
      throw InconclusiveSolve("inner solve at lambda = " + std::to_string(lambda) +
                              " stopped at gradient norm " + std::to_string(ev.inner.grad_norm) +
                              " after " + std::to_string(ev.inner.iters) + " iterations");
  }
  return ev;
}

struct SaddleResult {
  Field u_star;
  double lambda_star = 0.0;
  double constraint_residual = 0.0;  // | ||u*||^2 + I(u*) - r |
  double j_value = 0.0;              // J(u*) for the original, un-negated f
  bool certified = false;
  Sense sense = Sense::min;
  double lambda_floor = 0.0;
  double c_at_floor = 0.0;           // +inf on the S-empty branch
  bool s_empty_branch = false;
  int bisection_steps = 0;
};

/// Extremum of J on C_r by bisection on the multiplier. Throws
/// RadiusTooLarge when c(lambda_floor (1 + offset)) < r.
inline SaddleResult solve_sphere(const GalerkinSpace& space, const Subspace& V,
                                 const IntegrandSpec& f, const IntegrandSpec& g, double r,
                                 Sense sense, const SolverOptions& opts = {}) {
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("radius must be positive");
  const IntegrandSpec fe = sense == Sense::max ? f.negated() : f;
  const double floor = lambda_floor(f, g);
  if (!(floor > 0.0) || !std::isfinite(floor)) {
    throw PreconditionError("multiplier floor L/(2-nu) must be positive and finite");
  }

  SaddleResult out;
  out.sense = sense;
  out.lambda_floor = floor;

  auto finish = [&](const ConstraintEval& ev) {
    out.u_star = ev.inner.u;
    out.lambda_star = ev.lambda;
    out.constraint_residual = std::abs(ev.c - r);
    out.j_value = eval_functional(space, f, out.u_star);
    out.certified = ev.lambda > floor * (1.0 + opts.certificate_margin);
    return out;
  };
  auto close_enough = [&](double c) { return std::abs(c - r) <= opts.tol_r * r; };

  ConstraintEval lo = constraint_value(space, V, fe, g, floor * (1.0 + opts.floor_offset), opts);
  out.c_at_floor = lo.c;
  out.s_empty_branch = lo.inner.status == InnerStatus::diverged;
  if (close_enough(lo.c)) return finish(lo);
  if (lo.c < r) throw RadiusTooLarge(r, lo.c);

  double hi_lambda = 2.0 * floor;
  ConstraintEval hi = constraint_value(space, V, fe, g, hi_lambda, opts);
  for (int k = 0; hi.c > r; ++k) {
    if (close_enough(hi.c)) return finish(hi);
    if (k >= opts.max_doublings) throw InconclusiveSolve("could not bracket the multiplier");
    lo = std::move(hi);
    hi_lambda *= 2.0;
    hi = constraint_value(space, V, fe, g, hi_lambda, opts);
  }
  if (close_enough(hi.c)) return finish(hi);

  for (int k = 0; k < opts.max_bisections; ++k) {
    out.bisection_steps = k + 1;
    const double mid_lambda = 0.5 * (lo.lambda + hi.lambda);
    if (!(mid_lambda > lo.lambda && mid_lambda < hi.lambda)) break;
    ConstraintEval mid = constraint_value(space, V, fe, g, mid_lambda, opts);
    if (close_enough(mid.c)) return finish(mid);
    if (mid.c > r) {
      lo = std::move(mid);
    } else {
      hi = std::move(mid);
    }
  }
  throw InconclusiveSolve("bisection on the multiplier did not reach |c - r| <= tol_r r; "
                          "tighten tol_g or relax tol_r");
}

namespace detail {

/// Runs fn(0..n-1), concurrently when requested; results keep index order.
template <class Fn>
auto indexed_map(int n, bool parallel, Fn&& fn) {
  using R = decltype(fn(0));
  std::vector<R> out;
  out.reserve(static_cast<std::size_t>(n));
  if (!parallel) {
    for (int i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<R>> jobs;
  jobs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) jobs.push_back(std::async(std::launch::async, fn, i));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline double max_pairwise_distance(const GalerkinSpace& space, const std::vector<Field>& fields) {
  double spread = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      spread = std::max(spread, h1_distance(space, fields[i], fields[j]));
    }
  }
  return spread;
}

}  // namespace detail

enum class DeltaStatus { finite, s_empty, flat_at_zero };

inline std::string_view delta_status_name(DeltaStatus s) {
  switch (s) {
    case DeltaStatus::finite: return "finite";
    case DeltaStatus::s_empty: return "s_empty";
    case DeltaStatus::flat_at_zero: return "flat_at_zero";
  }
  return "unknown";
}

struct DeltaReport {
  double delta = std::numeric_limits<double>::infinity();
  std::optional<Field> minimizer;
  DeltaStatus status = DeltaStatus::s_empty;
  double multistart_spread = 0.0;
  Sense sense = Sense::min;
  int runs = 0;
};

/// Samples the minimizer set of ||u||^2 + I(u) +- ((2 - nu)/L) J(u) over V by
/// minimizing lambda_floor (||.||^2 + I) +- J from the zero field and n_starts
/// random fields, and reports the least ||u||^2 + I(u) found.
inline DeltaReport compute_delta(const GalerkinSpace& space, const Subspace& V,
                                 const IntegrandSpec& f, const IntegrandSpec& g, Sense sense,
                                 int n_starts, std::uint64_t seed, const SolverOptions& opts = {}) {
  if (n_starts < 0) throw PreconditionError("n_starts must be non-negative");
  const IntegrandSpec fe = sense == Sense::max ? f.negated() : f;
  const double floor = lambda_floor(f, g);

  std::vector<Field> starts{space.zero_field()};
  Rng rng(seed);
  for (int i = 0; i < n_starts; ++i) starts.push_back(random_field_in_ball(space, V, rng, 2.0));

  auto run_from = [&](int i) {
    return inner_minimize(space, V, fe, g, floor, starts[static_cast<std::size_t>(i)], opts);
  };
  std::vector<InnerSolveResult> runs;
  if (opts.parallel) {
    runs = detail::indexed_map(static_cast<int>(starts.size()), true, run_from);
  } else {
    // One divergent run settles S = {} so the remaining starts are skipped.
    for (int i = 0; i < static_cast<int>(starts.size()); ++i) {
      runs.push_back(run_from(i));
      if (runs.back().status == InnerStatus::diverged) break;
    }
  }

  DeltaReport rep;
  rep.sense = sense;
  rep.runs = static_cast<int>(runs.size());
  for (const auto& run : runs) {
    if (run.status == InnerStatus::diverged) {
      rep.status = DeltaStatus::s_empty;
      rep.delta = std::numeric_limits<double>::infinity();
      return rep;
    }
  }
  for (const auto& run : runs) {
    if (run.status == InnerStatus::max_iters) {
      throw InconclusiveSolve("threshold run stopped at gradient norm " +
                              std::to_string(run.grad_norm) + "; raise max_iters or tol_g");
    }
  }
  std::vector<Field> minimizers;
  for (const auto& run : runs) {
    const double value = constraint_functional(space, g, run.u);
    if (value < rep.delta) {
      rep.delta = value;
      rep.minimizer = run.u;
    }
    minimizers.push_back(run.u);
  }
  rep.multistart_spread = detail::max_pairwise_distance(space, minimizers);
  if (rep.delta < 1e-8) {
    rep.status = DeltaStatus::flat_at_zero;
    rep.delta = 0.0;
  } else {
    rep.status = DeltaStatus::finite;
  }
  return rep;
}

struct Thresholds {
  DeltaReport min_side;
  DeltaReport max_side;
  double delta = 0.0;
  double delta1 = 0.0;
};

inline Thresholds compute_thresholds(const GalerkinSpace& space, const Subspace& V,
                                     const IntegrandSpec& f, const IntegrandSpec& g, int n_starts,
                                     std::uint64_t seed, const SolverOptions& opts = {}) {
  Thresholds t;
  t.min_side = compute_delta(space, V, f, g, Sense::min, n_starts, seed, opts);
  t.max_side = compute_delta(space, V, f, g, Sense::max, n_starts, seed, opts);
  t.delta = t.min_side.delta;
  t.delta1 = std::min(t.min_side.delta, t.max_side.delta);
  return t;
}

struct V0Report {
  bool holds = false;
  double functional_norm = 0.0;
  Field witness;  // unit-norm Riesz representative in V, zero when !holds
};

/// Whether l(v) = int (f_xi(0) v + f_eta(0) v') is non-zero on V.
inline V0Report v0_condition(const GalerkinSpace& space, const Subspace& V, const IntegrandSpec& f) {
  const DualVector ell = assemble_derivative(space, f, space.zero_field());
  const Field w = riesz_in(space, V, ell);
  V0Report rep;
  rep.functional_norm = h1_norm(space, w);
  rep.holds = rep.functional_norm > 1e-10;
  rep.witness = rep.holds ? (1.0 / rep.functional_norm) * w : space.zero_field();
  return rep;
}

}  // namespace spherex

#endif  // SPHEREX_SOLVERS_HPP
