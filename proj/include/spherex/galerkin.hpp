#ifndef SPHEREX_GALERKIN_HPP
#define SPHEREX_GALERKIN_HPP

// P1 finite elements on a uniform mesh of (a, b), carrying the H1 geometry
// <u, v> = int(u'v' + uv) used by every other module.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "spherex/errors.hpp"

namespace spherex {

/// Nodal coefficient vector of a discrete function u.
struct Field {
  Eigen::VectorXd coeffs;

  Field() = default;
  explicit Field(Eigen::VectorXd c) : coeffs(std::move(c)) {}

  static Field zeros(Eigen::Index n) { return Field(Eigen::VectorXd::Zero(n)); }
  static Field constant(Eigen::Index n, double c) {
    return Field(Eigen::VectorXd::Constant(n, c));
  }

  Eigen::Index size() const { return coeffs.size(); }
  double operator[](Eigen::Index i) const { return coeffs[i]; }

  Field& operator+=(const Field& o) { coeffs += o.coeffs; return *this; }
  Field& operator-=(const Field& o) { coeffs -= o.coeffs; return *this; }
  Field& operator*=(double s) { coeffs *= s; return *this; }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { a.coeffs = -a.coeffs; return a; }
};

/// An assembled linear functional v -> sum_i entries_i v_i. Kept apart from
/// Field: the two only meet through riesz().
struct DualVector {
  Eigen::VectorXd entries;

  DualVector() = default;
  explicit DualVector(Eigen::VectorXd e) : entries(std::move(e)) {}

  static DualVector zeros(Eigen::Index n) { return DualVector(Eigen::VectorXd::Zero(n)); }

  Eigen::Index size() const { return entries.size(); }
  double pair(const Field& v) const { return entries.dot(v.coeffs); }

  DualVector& operator+=(const DualVector& o) { entries += o.entries; return *this; }
  DualVector& operator-=(const DualVector& o) { entries -= o.entries; return *this; }
  DualVector& operator*=(double s) { entries *= s; return *this; }

  friend DualVector operator+(DualVector a, const DualVector& b) { return a += b; }
  friend DualVector operator-(DualVector a, const DualVector& b) { return a -= b; }
  friend DualVector operator*(double s, DualVector a) { return a *= s; }
};

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
/// Legendre recurrence, weights 2 * (first eigenvector component)^2.
inline QuadratureRule gauss_legendre(int n_points) {
  if (n_points < 1) throw InvalidSpec("Gauss rule needs at least one point");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_points, n_points);
  for (int k = 1; k < n_points; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  for (int k = 0; k < n_points; ++k) {
    rule.points.push_back(eig.eigenvalues()[k]);
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights.push_back(2.0 * v0 * v0);
  }
  return rule;
}

/// Value and slope of a field at one quadrature point.
struct QuadPoint {
  double x;
  double weight;  // physical weight, includes the element Jacobian h/2
  double value;
  double slope;
};

/// Uniform P1 discretization of H1(a, b). Immutable after construction, so a
/// single instance can be shared by concurrent solves.
class GalerkinSpace {
 public:
  static constexpr int kDefaultQuadOrder = 4;

  GalerkinSpace(double a, double b, int n_elems, int quad_order = kDefaultQuadOrder)
      : a_(a), b_(b), n_elems_(n_elems) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
      throw InvalidDomain("domain endpoints must be finite with a < b");
    }
    if (n_elems < 1) throw InvalidDomain("mesh needs at least one element");
    h_ = (b - a) / n_elems;
    quad_ = gauss_legendre(quad_order);

    const Eigen::Index n = n_nodes();
    nodes_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) nodes_[i] = a + static_cast<double>(i) * h_;
    nodes_[n - 1] = b;

    mass_ = Eigen::MatrixXd::Zero(n, n);
    stiffness_ = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < n_elems; ++e) {
      mass_(e, e) += h_ / 3.0;
      mass_(e + 1, e + 1) += h_ / 3.0;
      mass_(e, e + 1) += h_ / 6.0;
      mass_(e + 1, e) += h_ / 6.0;
      stiffness_(e, e) += 1.0 / h_;
      stiffness_(e + 1, e + 1) += 1.0 / h_;
      stiffness_(e, e + 1) -= 1.0 / h_;
      stiffness_(e + 1, e) -= 1.0 / h_;
    }
    gram_ = mass_ + stiffness_;
    gram_llt_ = std::make_shared<const Eigen::LLT<Eigen::MatrixXd>>(gram_);
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double measure() const { return b_ - a_; }
  int n_elems() const { return n_elems_; }
  Eigen::Index n_nodes() const { return n_elems_ + 1; }
  double h() const { return h_; }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::MatrixXd& mass() const { return mass_; }
  const Eigen::MatrixXd& stiffness() const { return stiffness_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const QuadratureRule& quad() const { return quad_; }
  const Eigen::LLT<Eigen::MatrixXd>& gram_factor() const { return *gram_llt_; }

  void check(const Field& u, const char* what = "field") const {
    if (u.size() != n_nodes()) {
      throw ShapeError(std::string(what) + " has " + std::to_string(u.size()) +
                       " coefficients, space has " + std::to_string(n_nodes()) + " nodes");
    }
  }
  void check(const DualVector& d) const {
    if (d.size() != n_nodes()) throw ShapeError("dual vector length does not match space");
  }

  Field zero_field() const { return Field::zeros(n_nodes()); }

  /// Nodal interpolant of fn.
  template <class Fn>
  Field interpolate(Fn&& fn) const {
    Eigen::VectorXd c(n_nodes());
    for (Eigen::Index i = 0; i < n_nodes(); ++i) c[i] = fn(nodes_[i]);
    return Field(std::move(c));
  }

  /// Visits every quadrature point as visit(element, x, weight, value, slope,
  /// phi_left, phi_right). The basis slopes are -1/h and +1/h.
  template <class Visitor>
  void for_each_quad_point(const Field& u, Visitor&& visit) const {
    check(u);
    const double half = 0.5 * h_;
    for (int e = 0; e < n_elems_; ++e) {
      const double u0 = u.coeffs[e];
      const double u1 = u.coeffs[e + 1];
      const double slope = (u1 - u0) / h_;
      const double x0 = nodes_[e];
      for (std::size_t q = 0; q < quad_.size(); ++q) {
        const double s = quad_.points[q];
        const double phi_l = 0.5 * (1.0 - s);
        const double phi_r = 0.5 * (1.0 + s);
        visit(e, x0 + (s + 1.0) * half, quad_.weights[q] * half, phi_l * u0 + phi_r * u1,
              slope, phi_l, phi_r);
      }
    }
  }

 private:
  double a_;
  double b_;
  int n_elems_;
  double h_ = 0.0;
  QuadratureRule quad_;
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd stiffness_;
  Eigen::MatrixXd gram_;
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> gram_llt_;
};

inline GalerkinSpace build_space(double a, double b, int n_elems) {
  return GalerkinSpace(a, b, n_elems);
}

inline double h1_inner(const GalerkinSpace& space, const Field& u, const Field& v) {
  space.check(u);
  space.check(v, "second field");
  return u.coeffs.dot(space.gram() * v.coeffs);
}

/// u^T G u, accumulated element by element as sums of squares so the result
/// is never negative.
inline double h1_norm_sq(const GalerkinSpace& space, const Field& u) {
  space.check(u);
  const double h = space.h();
  double total = 0.0;
  for (int e = 0; e < space.n_elems(); ++e) {
    const double u0 = u.coeffs[e];
    const double u1 = u.coeffs[e + 1];
    const double s = u0 + u1;
    const double d = u1 - u0;
    total += h / 6.0 * (s * s + u0 * u0 + u1 * u1) + d * d / h;
  }
  return total;
}

inline double h1_norm(const GalerkinSpace& space, const Field& u) {
  return std::sqrt(h1_norm_sq(space, u));
}

inline double h1_distance(const GalerkinSpace& space, const Field& u, const Field& v) {
  return h1_norm(space, u - v);
}

inline std::vector<QuadPoint> eval_at_quad(const GalerkinSpace& space, const Field& u) {
  std::vector<QuadPoint> out;
  out.reserve(static_cast<std::size_t>(space.n_elems()) * space.quad().size());
  space.for_each_quad_point(u, [&](int, double x, double w, double val, double slope, double,
                                   double) { out.push_back({x, w, val, slope}); });
  return out;
}

/// Solves G w = dual, so <w, v>_{H1} = dual(v) for every field v.
inline Field riesz(const GalerkinSpace& space, const DualVector& dual) {
  space.check(dual);
  Field w(space.gram_factor().solve(dual.entries));
  const double scale = dual.entries.norm();
  if (scale > 0.0) {
    const double residual = (space.gram() * w.coeffs - dual.entries).norm() / scale;
    if (!(residual <= 1e-10)) {
      throw SolverFailure("Riesz solve residual " + std::to_string(residual));
    }
  }
  return w;
}

/// G u as a dual vector: the functional v -> <u, v>.
inline DualVector gram_apply(const GalerkinSpace& space, const Field& u) {
  space.check(u);
  return DualVector(space.gram() * u.coeffs);
}

/// Closed linear subspace V of the discrete space.
class Subspace {
 public:
  enum class Kind { full, zero_boundary, custom };

  static Subspace full() { return Subspace(Kind::full); }

  static Subspace zero_boundary(const GalerkinSpace& space) {
    Subspace s(Kind::zero_boundary);
    const Eigen::Index n_int = space.n_nodes() - 2;
    if (n_int > 0) {
      s.interior_llt_ = std::make_shared<const Eigen::LLT<Eigen::MatrixXd>>(
          space.gram().block(1, 1, n_int, n_int));
    }
    return s;
  }

  /// Span of the given columns, G-orthonormalized by two passes of modified
  /// Gram-Schmidt. Columns dependent on earlier ones (relative norm below
  /// 1e-10) are dropped.
  static Subspace custom(const GalerkinSpace& space, const Eigen::MatrixXd& columns) {
    if (columns.cols() > 0 && columns.rows() != space.n_nodes()) {
      throw ShapeError("custom basis has " + std::to_string(columns.rows()) +
                       " rows, space has " + std::to_string(space.n_nodes()) + " nodes");
    }
    const Eigen::MatrixXd& G = space.gram();
    std::vector<Eigen::VectorXd> kept;
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
      Eigen::VectorXd v = columns.col(j);
      const double original = std::sqrt(std::max(0.0, v.dot(G * v)));
      if (original == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : kept) v -= q.dot(G * v) * q;
      }
      const double norm = std::sqrt(std::max(0.0, v.dot(G * v)));
      if (norm <= 1e-10 * original) continue;
      kept.push_back(v / norm);
    }
    Subspace s(Kind::custom);
    s.basis_.resize(space.n_nodes(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) s.basis_.col(static_cast<Eigen::Index>(j)) = kept[j];
    return s;
  }

  Kind kind() const { return kind_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  std::string name() const {
    switch (kind_) {
      case Kind::full: return "full";
      case Kind::zero_boundary: return "zero_boundary";
      case Kind::custom: return "custom";
    }
    return "unknown";
  }

  Eigen::Index dimension(const GalerkinSpace& space) const {
    switch (kind_) {
      case Kind::full: return space.n_nodes();
      case Kind::zero_boundary: return std::max<Eigen::Index>(space.n_nodes() - 2, 0);
      case Kind::custom: return basis_.cols();
    }
    return 0;
  }

  /// G-orthogonal projection onto V.
  Field project(const GalerkinSpace& space, const Field& u) const {
    space.check(u);
    switch (kind_) {
      case Kind::full:
        return u;
      case Kind::zero_boundary: {
        Field out = space.zero_field();
        const Eigen::Index n_int = space.n_nodes() - 2;
        if (n_int <= 0) return out;
        // Minimizing (w-u)^T G (w-u) with w fixed to zero at both ends
        // leaves G_II w_I = (G u)_I.
        const Eigen::VectorXd gu = space.gram() * u.coeffs;
        out.coeffs.segment(1, n_int) = interior_llt_->solve(gu.segment(1, n_int));
        return out;
      }
      case Kind::custom: {
        if (basis_.cols() == 0) return space.zero_field();
        if (basis_.rows() != space.n_nodes()) throw ShapeError("custom basis does not match space");
        const Eigen::VectorXd coords = basis_.transpose() * (space.gram() * u.coeffs);
        return Field(basis_ * coords);
      }
    }
    return u;
  }

 private:
  explicit Subspace(Kind k) : kind_(k) {}

  Kind kind_;
  Eigen::MatrixXd basis_;
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> interior_llt_;
};

inline Field subspace_project(const GalerkinSpace& space, const Subspace& V, const Field& u) {
  return V.project(space, u);
}

/// Riesz representative of dual restricted to V: the unique w in V with
/// <w, v> = dual(v) for all v in V.
inline Field riesz_in(const GalerkinSpace& space, const Subspace& V, const DualVector& dual) {
  return V.project(space, riesz(space, dual));
}

}  // namespace spherex

#endif  // SPHEREX_GALERKIN_HPP
