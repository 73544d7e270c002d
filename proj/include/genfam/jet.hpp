#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "genfam/common.hpp"

namespace genfam {

// Truncated second-order Taylor coefficient of a scalar function of d
// variables: value, gradient and full symmetric Hessian. One forward pass
// through an expression yields all of them at once. Arithmetic follows the
// usual product/quotient/chain rules for first and second derivatives;
// symmetry of the Hessian is preserved exactly by construction.
class Jet2 {
 public:
  Jet2() : value_(0.0) {}

  static Jet2 constant(int dim, double value) {
    Jet2 j;
    j.value_ = value;
    j.grad_ = Eigen::VectorXd::Zero(dim);
    j.hess_ = Eigen::MatrixXd::Zero(dim, dim);
    return j;
  }

  static Jet2 variable(int dim, int index, double value) {
    Jet2 j = constant(dim, value);
    j.grad_(index) = 1.0;
    return j;
  }

  double value() const { return value_; }
  const Eigen::VectorXd& grad() const { return grad_; }
  const Eigen::MatrixXd& hess() const { return hess_; }
  int dim() const { return static_cast<int>(grad_.size()); }

  Jet2 operator-() const {
    Jet2 r;
    r.value_ = -value_;
    r.grad_ = -grad_;
    r.hess_ = -hess_;
    return r;
  }

  friend Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.value_ = a.value_ + b.value_;
    r.grad_ = a.grad_ + b.grad_;
    r.hess_ = a.hess_ + b.hess_;
    return r;
  }
  friend Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.value_ = a.value_ - b.value_;
    r.grad_ = a.grad_ - b.grad_;
    r.hess_ = a.hess_ - b.hess_;
    return r;
  }
  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.value_ = a.value_ * b.value_;
    r.grad_ = a.value_ * b.grad_ + b.value_ * a.grad_;
    r.hess_ = a.value_ * b.hess_ + b.value_ * a.hess_;
    r.hess_.noalias() += a.grad_ * b.grad_.transpose();
    r.hess_.noalias() += b.grad_ * a.grad_.transpose();
    return r;
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.value_ == 0.0) throw domain_error("division by zero");
    const double w = 1.0 / b.value_;
    Jet2 r;
    // Divide directly so the value matches plain scalar evaluation bit for
    // bit; the reciprocal only enters derivative terms.
    r.value_ = a.value_ / b.value_;
    r.grad_ = (a.grad_ - r.value_ * b.grad_) * w;
    r.hess_ = a.hess_ - r.value_ * b.hess_;
    r.hess_.noalias() -= r.grad_ * b.grad_.transpose();
    r.hess_.noalias() -= b.grad_ * r.grad_.transpose();
    r.hess_ *= w;
    return r;
  }

  friend Jet2 operator+(const Jet2& a, double c) { return a + constant(a.dim(), c); }
  friend Jet2 operator+(double c, const Jet2& a) { return constant(a.dim(), c) + a; }
  friend Jet2 operator-(const Jet2& a, double c) { return a - constant(a.dim(), c); }
  friend Jet2 operator-(double c, const Jet2& a) { return constant(a.dim(), c) - a; }
  friend Jet2 operator*(const Jet2& a, double c) {
    Jet2 r;
    r.value_ = a.value_ * c;
    r.grad_ = a.grad_ * c;
    r.hess_ = a.hess_ * c;
    return r;
  }
  friend Jet2 operator*(double c, const Jet2& a) { return a * c; }
  friend Jet2 operator/(const Jet2& a, double c) {
    if (c == 0.0) throw domain_error("division by zero");
    return a * (1.0 / c);
  }
  friend Jet2 operator/(double c, const Jet2& a) { return constant(a.dim(), c) / a; }

  Jet2& operator+=(const Jet2& b) { return *this = *this + b; }
  Jet2& operator-=(const Jet2& b) { return *this = *this - b; }
  Jet2& operator*=(const Jet2& b) { return *this = *this * b; }

  // Composition with a scalar primitive g given g(u), g'(u), g''(u).
  Jet2 chain(double g, double dg, double d2g) const {
    Jet2 r;
    r.value_ = g;
    r.grad_ = dg * grad_;
    r.hess_ = dg * hess_;
    r.hess_.noalias() += d2g * (grad_ * grad_.transpose());
    return r;
  }

 private:
  double value_;
  Eigen::VectorXd grad_;
  Eigen::MatrixXd hess_;
};

inline Jet2 sqrt(const Jet2& x) {
  if (!(x.value() > 0.0))
    throw domain_error("sqrt of non-positive value");
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s, -0.25 / (s * x.value()));
}

inline Jet2 sin(const Jet2& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return x.chain(s, c, -s);
}

inline Jet2 cos(const Jet2& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return x.chain(c, -s, -c);
}

inline Jet2 exp(const Jet2& x) {
  const double e = std::exp(x.value());
  return x.chain(e, e, e);
}

inline Jet2 log(const Jet2& x) {
  if (!(x.value() > 0.0))
    throw domain_error("log of non-positive value");
  const double u = x.value();
  return x.chain(std::log(u), 1.0 / u, -1.0 / (u * u));
}

// Integer power. Negative exponents require a non-zero base.
inline Jet2 pow_int(const Jet2& x, long long e) {
  if (e == 0) return Jet2::constant(x.dim(), 1.0);
  const double u = x.value();
  if (e < 0 && u == 0.0)
    throw domain_error("zero base with negative exponent");
  const double n = static_cast<double>(e);
  const double g = std::pow(u, n);
  // u^(e-1) and u^(e-2) stay finite at u = 0 for e >= 2 (or equal 1, u).
  double dg, d2g;
  if (e == 1) {
    dg = 1.0;
    d2g = 0.0;
  } else if (e == 2) {
    dg = 2.0 * u;
    d2g = 2.0;
  } else {
    dg = n * std::pow(u, n - 1.0);
    d2g = n * (n - 1.0) * std::pow(u, n - 2.0);
  }
  return x.chain(g, dg, d2g);
}

// Plain-double counterparts so that generic code can be instantiated with
// either scalar type and walk the same path.
inline double pow_int(double x, long long e) {
  if (e < 0 && x == 0.0)
    throw domain_error("zero base with negative exponent");
  return std::pow(x, static_cast<double>(e));
}

// Directional second derivative u^T H(x) v. Independent of any curve
// realization of the pair (u, v) at a critical point.
inline double mixed_second(const Jet2& jet, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  return u.dot(jet.hess() * v);
}

}  // namespace genfam
