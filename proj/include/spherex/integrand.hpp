#ifndef SPHEREX_INTEGRAND_HPP
#define SPHEREX_INTEGRAND_HPP

// Closed catalog of pointwise integrands f(xi, eta) and g(xi, eta), each with
// an analytic gradient and a proven global Lipschitz constant of that
// gradient (the spectral bound of its Hessian).

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spherex/errors.hpp"

namespace spherex {

struct Gradient {
  double d_xi = 0.0;
  double d_eta = 0.0;
};

/// Anything usable as an integrand by the assembly routines.
template <class T>
concept PointIntegrand = requires(const T& f, double xi, double eta) {
  { f.value(xi, eta) } -> std::convertible_to<double>;
  { f.gradient(xi, eta) } -> std::same_as<Gradient>;
};

enum class IntegrandKind { affine_quadratic, neg_norm_sq, sincos, quadratic_g, cosine_well, zero };
enum class Role { f, g };

inline std::string_view kind_name(IntegrandKind k) {
  switch (k) {
    case IntegrandKind::affine_quadratic: return "affine_quadratic";
    case IntegrandKind::neg_norm_sq: return "neg_norm_sq";
    case IntegrandKind::sincos: return "sincos";
    case IntegrandKind::quadratic_g: return "quadratic_g";
    case IntegrandKind::cosine_well: return "cosine_well";
    case IntegrandKind::zero: return "zero";
  }
  return "unknown";
}

inline std::optional<IntegrandKind> parse_kind(std::string_view name) {
  for (auto k : {IntegrandKind::affine_quadratic, IntegrandKind::neg_norm_sq, IntegrandKind::sincos,
                 IntegrandKind::quadratic_g, IntegrandKind::cosine_well, IntegrandKind::zero}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

inline std::size_t param_count(IntegrandKind k) {
  switch (k) {
    case IntegrandKind::affine_quadratic: return 2;
    case IntegrandKind::quadratic_g:
    case IntegrandKind::cosine_well: return 1;
    default: return 0;
  }
}

/// A catalog entry with its parameters. `sign` is -1 for the negated
/// integrand used on the maximization side; the Lipschitz bound is unchanged
/// by negation.
class IntegrandSpec {
 public:
  IntegrandSpec() = default;

  IntegrandSpec(IntegrandKind kind, std::vector<double> params, Role role = Role::f)
      : kind_(kind), params_(std::move(params)), role_(role) {
    if (params_.size() != param_count(kind_)) {
      throw InvalidSpec(std::string(kind_name(kind_)) + " takes " +
                        std::to_string(param_count(kind_)) + " parameter(s), got " +
                        std::to_string(params_.size()));
    }
    for (double p : params_) {
      if (!std::isfinite(p)) throw InvalidSpec("integrand parameters must be finite");
    }
  }

  static IntegrandSpec affine_quadratic(double a, double c, Role role = Role::f) {
    return {IntegrandKind::affine_quadratic, {a, c}, role};
  }
  static IntegrandSpec neg_norm_sq(Role role = Role::f) { return {IntegrandKind::neg_norm_sq, {}, role}; }
  static IntegrandSpec sincos(Role role = Role::f) { return {IntegrandKind::sincos, {}, role}; }
  static IntegrandSpec quadratic_g(double c) { return {IntegrandKind::quadratic_g, {c}, Role::g}; }
  static IntegrandSpec cosine_well(double c) { return {IntegrandKind::cosine_well, {c}, Role::g}; }
  static IntegrandSpec zero(Role role = Role::g) { return {IntegrandKind::zero, {}, role}; }

  IntegrandKind kind() const { return kind_; }
  Role role() const { return role_; }
  const std::vector<double>& params() const { return params_; }
  double sign() const { return sign_; }

  IntegrandSpec negated() const {
    IntegrandSpec out = *this;
    out.sign_ = -sign_;
    return out;
  }

  std::string name() const {
    std::string s = sign_ < 0 ? "-" : "";
    s += kind_name(kind_);
    if (!params_.empty()) {
      s += "(";
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) s += ",";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", params_[i]);
        s += buf;
      }
      s += ")";
    }
    return s;
  }

  double value(double xi, double eta) const { return sign_ * raw_value(xi, eta); }

  Gradient gradient(double xi, double eta) const {
    Gradient g = raw_gradient(xi, eta);
    return {sign_ * g.d_xi, sign_ * g.d_eta};
  }

  double lipschitz() const {
    switch (kind_) {
      case IntegrandKind::affine_quadratic: return std::abs(params_[1]);
      case IntegrandKind::neg_norm_sq: return 2.0;
      // Hessian diag(-sin xi, -cos eta).
      case IntegrandKind::sincos: return 1.0;
      case IntegrandKind::quadratic_g: return std::abs(params_[0]);
      // Hessian diag(c cos xi, 0).
      case IntegrandKind::cosine_well: return std::abs(params_[0]);
      case IntegrandKind::zero: return 0.0;
    }
    return std::numeric_limits<double>::infinity();
  }

 private:
  double raw_value(double xi, double eta) const {
    switch (kind_) {
      case IntegrandKind::affine_quadratic: return params_[0] * xi + 0.5 * params_[1] * xi * xi;
      case IntegrandKind::neg_norm_sq: return -(xi * xi + eta * eta);
      case IntegrandKind::sincos: return std::sin(xi) + std::cos(eta);
      case IntegrandKind::quadratic_g: return 0.5 * params_[0] * (xi * xi + eta * eta);
      case IntegrandKind::cosine_well: return params_[0] * (1.0 - std::cos(xi));
      case IntegrandKind::zero: return 0.0;
    }
    return 0.0;
  }

  Gradient raw_gradient(double xi, double eta) const {
    switch (kind_) {
      case IntegrandKind::affine_quadratic: return {params_[0] + params_[1] * xi, 0.0};
      case IntegrandKind::neg_norm_sq: return {-2.0 * xi, -2.0 * eta};
      case IntegrandKind::sincos: return {std::cos(xi), -std::sin(eta)};
      case IntegrandKind::quadratic_g: return {params_[0] * xi, params_[0] * eta};
      case IntegrandKind::cosine_well: return {params_[0] * std::sin(xi), 0.0};
      case IntegrandKind::zero: return {0.0, 0.0};
    }
    return {};
  }

  IntegrandKind kind_ = IntegrandKind::zero;
  std::vector<double> params_;
  Role role_ = Role::g;
  double sign_ = 1.0;
};

static_assert(PointIntegrand<IntegrandSpec>);

inline double eval_f(const IntegrandSpec& spec, double xi, double eta) { return spec.value(xi, eta); }
inline Gradient grad_f(const IntegrandSpec& spec, double xi, double eta) { return spec.gradient(xi, eta); }
inline double lipschitz_bound(const IntegrandSpec& spec) { return spec.lipschitz(); }

/// Largest observed |grad(p) - grad(q)| / |p - q| over n_samples pairs drawn
/// in the disk of the given radius. Half of the pairs are far apart, half are
/// local (|p - q| ~ 1e-3 radius) to probe the Hessian.
inline double empirical_lipschitz(const IntegrandSpec& spec, int n_samples, double radius,
                                  std::uint64_t seed) {
  if (n_samples < 2) throw PreconditionError("empirical_lipschitz needs at least 2 samples");
  if (!(radius > 0.0)) throw PreconditionError("empirical_lipschitz needs a positive radius");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto disk_point = [&](double r_max) {
    const double r = r_max * std::sqrt(unit(rng));
    const double t = 2.0 * std::numbers::pi * unit(rng);
    return std::pair{r * std::cos(t), r * std::sin(t)};
  };
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const auto [px, py] = disk_point(radius);
    auto [qx, qy] = disk_point(i % 2 == 0 ? radius : 1e-3 * radius);
    if (i % 2 != 0) {
      qx += px;
      qy += py;
    }
    const double dist = std::hypot(px - qx, py - qy);
    if (dist == 0.0) continue;
    const Gradient gp = spec.gradient(px, py);
    const Gradient gq = spec.gradient(qx, qy);
    worst = std::max(worst, std::hypot(gp.d_xi - gq.d_xi, gp.d_eta - gq.d_eta) / dist);
  }
  return worst;
}

struct ValidationReport {
  bool pass = true;
  double lipschitz = 0.0;
  std::string message;
  // Violating point and value, when pass is false because of a sample.
  std::optional<std::pair<double, double>> witness;
  double witness_value = 0.0;
};

/// Radical inverse of i in the given base (Halton sequence component).
inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double out = 0.0;
  while (i > 0) {
    out += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return out;
}

/// Checks g(0) = 0, g >= -1e-12 on 10^4 Halton points of the disk of radius
/// 100, and nu < 2.
inline ValidationReport validate_g(const IntegrandSpec& spec) {
  ValidationReport rep;
  rep.lipschitz = spec.lipschitz();
  if (spec.role() != Role::g) {
    rep.pass = false;
    rep.message = "integrand is not in g-role";
    return rep;
  }
  const double g0 = spec.value(0.0, 0.0);
  if (g0 != 0.0) {
    rep.pass = false;
    rep.message = "g(0) = 0 violated";
    rep.witness = std::pair{0.0, 0.0};
    rep.witness_value = g0;
    return rep;
  }
  constexpr int kPoints = 10000;
  constexpr double kRadius = 100.0;
  for (int i = 1; i <= kPoints; ++i) {
    const double r = kRadius * std::sqrt(radical_inverse(static_cast<std::uint64_t>(i), 2));
    const double t = 2.0 * std::numbers::pi * radical_inverse(static_cast<std::uint64_t>(i), 3);
    const double xi = r * std::cos(t);
    const double eta = r * std::sin(t);
    const double v = spec.value(xi, eta);
    if (!(v >= -1e-12)) {
      rep.pass = false;
      rep.message = "g >= 0 violated";
      rep.witness = std::pair{xi, eta};
      rep.witness_value = v;
      return rep;
    }
  }
  if (!(rep.lipschitz < 2.0)) {
    rep.pass = false;
    rep.message = "\xce\xbd<2 violated (nu = " + std::to_string(rep.lipschitz) + ")";
    return rep;
  }
  rep.message = "ok";
  return rep;
}

/// f must have a non-constant gradient, i.e. L > 0.
inline ValidationReport validate_f(const IntegrandSpec& spec) {
  ValidationReport rep;
  rep.lipschitz = spec.lipschitz();
  if (spec.role() != Role::f) {
    rep.pass = false;
    rep.message = "integrand is not in f-role";
  } else if (!(rep.lipschitz > 0.0) || !std::isfinite(rep.lipschitz)) {
    rep.pass = false;
    rep.message = "gradient of f must be non-constant (L > 0)";
  } else {
    rep.message = "ok";
  }
  return rep;
}

}  // namespace spherex

#endif  // SPHEREX_INTEGRAND_HPP
