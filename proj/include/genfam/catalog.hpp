#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genfam/common.hpp"
#include "genfam/family.hpp"

namespace genfam {

enum class CatalogId { rod_spring, two_springs, lambda_x2 };

inline const char* to_string(CatalogId id) {
  switch (id) {
    case CatalogId::rod_spring: return "rod_spring";
    case CatalogId::two_springs: return "two_springs";
    case CatalogId::lambda_x2: return "lambda_x2";
  }
  return "?";
}

inline CatalogId catalog_id_from_string(const std::string& s) {
  if (s == "rod_spring") return CatalogId::rod_spring;
  if (s == "two_springs") return CatalogId::two_springs;
  if (s == "lambda_x2") return CatalogId::lambda_x2;
  throw std::invalid_argument("unknown catalog id '" + s + "'");
}

enum class FamilyClass { morse, regular, degenerate, irregular_nonconstant_rank };

inline const char* to_string(FamilyClass c) {
  switch (c) {
    case FamilyClass::morse: return "morse";
    case FamilyClass::regular: return "regular";
    case FamilyClass::degenerate: return "degenerate";
    case FamilyClass::irregular_nonconstant_rank:
      return "irregular-nonconstant-rank";
  }
  return "?";
}

// Parameters shared by the catalog entries. The metric g acts as the linear
// map V -> V* used by the spring energies; it must be symmetric positive
// definite. The spatial dimension is 2 by default (all the phenomena of
// interest already appear there) with 3 supported.
struct CatalogParams {
  int dim = 2;
  double k = 1.0;    // rod_spring spring constant
  double k1 = 1.0;   // two_springs first spring
  double k2 = 1.0;   // two_springs second spring
  double a = 1.0;    // rod length / rest length
  Eigen::VectorXd q0;  // anchor point, defaults to the origin
  Eigen::MatrixXd g;   // metric, defaults to identity

  void finalize() {
    if (q0.size() == 0) q0 = Eigen::VectorXd::Zero(dim);
    if (g.size() == 0) g = Eigen::MatrixXd::Identity(dim, dim);
  }

  void validate(CatalogId id) const {
    if (id == CatalogId::lambda_x2) return;
    if (dim < 2 || dim > 3)
      throw std::invalid_argument("spatial dimension must be 2 or 3");
    if (!(a > 0.0)) throw std::invalid_argument("length a must be positive");
    if (!(k > 0.0) || !(k1 > 0.0) || !(k2 > 0.0))
      throw std::invalid_argument("spring constants must be positive");
    if (q0.size() != dim) throw std::invalid_argument("q0 has wrong size");
    if (g.rows() != dim || g.cols() != dim)
      throw std::invalid_argument("metric g has wrong size");
    if (!g.isApprox(g.transpose(), 1e-12))
      throw std::invalid_argument("metric g must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("metric g must be positive definite");
  }
};

namespace detail {

// <g a, b> with mixed scalar types.
template <class T>
T metric_pair(const Eigen::MatrixXd& g, const std::vector<T>& a,
              const std::vector<T>& b) {
  const int d = static_cast<int>(a.size());
  T acc = a[0] * g(0, 0) * b[0];
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == 0 && j == 0) continue;
      acc += a[i] * g(i, j) * b[j];
    }
  return acc;
}

template <class T>
std::vector<T> unpack(const Eigen::VectorXd& x, int dim);

template <>
inline std::vector<double> unpack<double>(const Eigen::VectorXd& x, int) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

template <>
inline std::vector<Jet2> unpack<Jet2>(const Eigen::VectorXd& x, int dim) {
  std::vector<Jet2> out;
  out.reserve(x.size());
  for (int i = 0; i < x.size(); ++i)
    out.push_back(Jet2::variable(dim, i, x(i)));
  return out;
}

}  // namespace detail

// Two elastically coupled points: the controlled point q is tied to the
// anchor q0 by one spring and to a free point l by a second spring of rest
// length a:
//   U(q, l) = k1/2 <g(q - q0), q - q0> + k2/2 (||l - q||_g - a)^2
// with ||v||_g = sqrt(<g v, v>). The critical set is ||l - q||_g = a and
// the constitutive set is f = k1 g (q - q0).
class TwoSpringsEnergy final : public EnergyFamily {
 public:
  explicit TwoSpringsEnergy(CatalogParams p) : p_(std::move(p)) {}

  double value(const Eigen::VectorXd& x) const override {
    return eval<double>(x);
  }
  Jet2 jet(const Eigen::VectorXd& x) const override { return eval<Jet2>(x); }

 private:
  template <class T>
  T eval(const Eigen::VectorXd& x) const {
    const int n = p_.dim;
    auto v = detail::unpack<T>(x, 2 * n);
    std::vector<T> dq(v.begin(), v.begin() + n);
    for (int i = 0; i < n; ++i) dq[i] = dq[i] - p_.q0(i);
    std::vector<T> d(n, v[0]);
    for (int i = 0; i < n; ++i) d[i] = v[n + i] - v[i];
    using std::sqrt;
    T r = sqrt(detail::metric_pair(p_.g, d, d));
    T stretch = r - p_.a;
    return 0.5 * p_.k1 * detail::metric_pair(p_.g, dq, dq) +
           0.5 * p_.k2 * stretch * stretch;
  }

  CatalogParams p_;
};

// A controlled point tied by a spring to a second point that a rigid rod
// constrains to the g-sphere of radius a around q0. The sphere is
// represented by an explicit angle chart, turning the constrained family
// into an unconstrained one:
//   dim 2: q2(t) = q0 + a u(t)/||u(t)||_g,  u(t) = (cos t, sin t)
//   dim 3: u(t1,t2) = (sin t1 cos t2, sin t1 sin t2, cos t1)
// The chart degenerates at the poles for dim 3; seeds stay away from them.
class RodSpringEnergy final : public EnergyFamily {
 public:
  explicit RodSpringEnergy(CatalogParams p) : p_(std::move(p)) {}

  double value(const Eigen::VectorXd& x) const override {
    return eval<double>(x);
  }
  Jet2 jet(const Eigen::VectorXd& x) const override { return eval<Jet2>(x); }

  int fiber_dim() const { return p_.dim - 1; }

 private:
  template <class T>
  T eval(const Eigen::VectorXd& x) const {
    const int n = p_.dim;
    const int k = n - 1;
    auto v = detail::unpack<T>(x, n + k);
    using std::cos;
    using std::sin;
    using std::sqrt;
    std::vector<T> u;
    if (n == 2) {
      u = {cos(v[2]), sin(v[2])};
    } else {
      u = {sin(v[3]) * cos(v[4]), sin(v[3]) * sin(v[4]), cos(v[3])};
    }
    // Project the direction onto the g-sphere of radius a.
    T scale = p_.a / sqrt(detail::metric_pair(p_.g, u, u));
    std::vector<T> d(n, v[0]);
    for (int i = 0; i < n; ++i) d[i] = (p_.q0(i) + scale * u[i]) - v[i];
    return 0.5 * p_.k * detail::metric_pair(p_.g, d, d);
  }

  CatalogParams p_;
};

// The degenerate family U(x, l) = l x^2 over eta(x, l) = x. Its critical
// set is {x = 0}, the family Hessian is the zero form there, and the
// generated set is the single point (0, 0): isotropic but not Lagrangian.
class LambdaX2Energy final : public EnergyFamily {
 public:
  double value(const Eigen::VectorXd& x) const override {
    return x(1) * x(0) * x(0);
  }
  Jet2 jet(const Eigen::VectorXd& x) const override {
    const Jet2 q = Jet2::variable(2, 0, x(0));
    const Jet2 l = Jet2::variable(2, 1, x(1));
    return l * q * q;
  }
};

// A catalog entry bundles the evaluable family with its closed-form
// oracles: the critical-set predicate, the constitutive set, and the
// expected classification.
struct CatalogEntry {
  CatalogId id;
  CatalogParams params;
  FamilySpec family;
  FamilyClass expected_class;
  int expected_rank;

  bool oracle_is_critical(const Eigen::VectorXd& q, const Eigen::VectorXd& l,
                          double tol = 1e-8) const;
  // Closed-form constitutive covectors over a base point. Throws
  // std::domain_error inside the oracle's excluded region.
  std::vector<Eigen::VectorXd> oracle_constitutive(
      const Eigen::VectorXd& q) const;
};

namespace detail {

inline FamilySpec make_family(CatalogId id, const CatalogParams& p) {
  switch (id) {
    case CatalogId::two_springs: {
      Fibration fib{p.dim, p.dim, Eigen::VectorXd()};
      return FamilySpec(fib, std::make_shared<TwoSpringsEnergy>(p),
                        "two_springs");
    }
    case CatalogId::rod_spring: {
      const int k = p.dim - 1;
      Eigen::VectorXd period = Eigen::VectorXd::Zero(k);
      Eigen::VectorXd lo(k), hi(k);
      if (p.dim == 2) {
        period(0) = 2 * std::numbers::pi;
        lo(0) = -std::numbers::pi;
        hi(0) = std::numbers::pi;
      } else {
        // t1 is a colatitude; keep seeds off the poles where the chart
        // degenerates. t2 is periodic.
        period(1) = 2 * std::numbers::pi;
        lo << 0.2, -std::numbers::pi;
        hi << std::numbers::pi - 0.2, std::numbers::pi;
      }
      Fibration fib{p.dim, k, period};
      FamilySpec fam(fib, std::make_shared<RodSpringEnergy>(p), "rod_spring");
      fam.set_seed_box(lo, hi);
      if (p.dim == 3) {
        // Fold the mirror sheets of the sphere chart onto colatitude
        // [0, pi]: u(-t1, t2) = u(t1, t2 + pi), and t1 is 2pi-periodic.
        fam.set_fiber_canonicalizer([](const Eigen::VectorXd& l) {
          Eigen::VectorXd out = l;
          const double two_pi = 2 * std::numbers::pi;
          out(0) -= two_pi * std::round(out(0) / two_pi);
          if (out(0) < 0.0) {
            out(0) = -out(0);
            out(1) += std::numbers::pi;
          }
          return out;
        });
        // The chart is degenerate at the poles; solutions converging there
        // are artifacts of the angle parameterization.
        fam.set_fiber_domain([](const Eigen::VectorXd& l) {
          return l(0) > 0.05 && l(0) < std::numbers::pi - 0.05;
        });
      }
      return fam;
    }
    case CatalogId::lambda_x2: {
      Fibration fib{1, 1, Eigen::VectorXd()};
      return FamilySpec(fib, std::make_shared<LambdaX2Energy>(), "lambda_x2");
    }
  }
  throw std::invalid_argument("unknown catalog id");
}

}  // namespace detail

inline CatalogEntry instantiate(CatalogId id, CatalogParams params = {}) {
  if (id == CatalogId::lambda_x2) params.dim = 1;
  params.finalize();
  params.validate(id);
  FamilyClass cls = FamilyClass::degenerate;
  int rank = 0;
  switch (id) {
    case CatalogId::rod_spring:
      cls = FamilyClass::morse;
      rank = params.dim - 1;
      break;
    case CatalogId::two_springs:
      cls = FamilyClass::regular;
      rank = 1;
      break;
    case CatalogId::lambda_x2:
      cls = FamilyClass::degenerate;
      rank = 0;
      break;
  }
  return CatalogEntry{id, params, detail::make_family(id, params), cls, rank};
}

// Builds a catalog entry from a name -> value table (the CLI path). Vector
// and matrix parameters use q0_1.., g_11.. component names.
inline CatalogEntry instantiate(CatalogId id,
                                const std::map<std::string, double>& overrides) {
  CatalogParams p;
  if (auto it = overrides.find("dim"); it != overrides.end())
    p.dim = static_cast<int>(it->second);
  if (id == CatalogId::lambda_x2) p.dim = 1;
  p.finalize();
  const bool rod = id == CatalogId::rod_spring;
  const bool two = id == CatalogId::two_springs;
  for (const auto& [key, value] : overrides) {
    if (key == "dim" && (rod || two)) continue;
    if (key == "k" && rod) p.k = value;
    else if (key == "k1" && two) p.k1 = value;
    else if (key == "k2" && two) p.k2 = value;
    else if (key == "a" && (rod || two)) p.a = value;
    else if ((rod || two) && key.rfind("q0_", 0) == 0) {
      const int i = std::stoi(key.substr(3)) - 1;
      if (i < 0 || i >= p.dim)
        throw std::invalid_argument("parameter '" + key + "' out of range");
      p.q0(i) = value;
    } else if ((rod || two) && key.rfind("g_", 0) == 0 && key.size() == 4) {
      const int i = key[2] - '1', j = key[3] - '1';
      if (i < 0 || i >= p.dim || j < 0 || j >= p.dim)
        throw std::invalid_argument("parameter '" + key + "' out of range");
      p.g(i, j) = value;
      p.g(j, i) = value;
    } else {
      throw std::invalid_argument("unknown parameter '" + key + "' for " +
                                  std::string(to_string(id)));
    }
  }
  return instantiate(id, p);
}

inline bool CatalogEntry::oracle_is_critical(const Eigen::VectorXd& q,
                                             const Eigen::VectorXd& l,
                                             double tol) const {
  switch (id) {
    case CatalogId::two_springs: {
      const Eigen::VectorXd d = l - q;
      return std::abs(std::sqrt(d.dot(params.g * d)) - params.a) <= tol;
    }
    case CatalogId::rod_spring: {
      // Critical iff the chart direction is parallel to q - q0.
      Eigen::VectorXd u(params.dim);
      if (params.dim == 2)
        u << std::cos(l(0)), std::sin(l(0));
      else
        u << std::sin(l(0)) * std::cos(l(1)),
            std::sin(l(0)) * std::sin(l(1)), std::cos(l(0));
      const Eigen::VectorXd dq = q - params.q0;
      if (dq.norm() <= tol) return true;  // every fiber point is critical
      const Eigen::VectorXd w = params.g * dq;
      // u parallel to dq <=> u has no component in the g-orthogonal
      // complement of dq.
      const Eigen::VectorXd proj =
          u - dq * (u.dot(w) / dq.dot(w));
      return std::sqrt(proj.dot(params.g * proj)) <= tol * u.norm();
    }
    case CatalogId::lambda_x2:
      return std::abs(q(0)) <= tol;
  }
  return false;
}

inline std::vector<Eigen::VectorXd> CatalogEntry::oracle_constitutive(
    const Eigen::VectorXd& q) const {
  switch (id) {
    case CatalogId::two_springs:
      return {params.k1 * (params.g * (q - params.q0))};
    case CatalogId::rod_spring: {
      const Eigen::VectorXd dq = q - params.q0;
      const double r = std::sqrt(dq.dot(params.g * dq));
      if (r <= 1e-12)
        throw std::domain_error(
            "constitutive oracle is undefined at q = q0 (the generated "
            "set there is the sphere ||f|| = k a)");
      std::vector<Eigen::VectorXd> out;
      out.push_back(params.k * (1.0 - params.a / r) * (params.g * dq));
      out.push_back(params.k * (1.0 + params.a / r) * (params.g * dq));
      return out;
    }
    case CatalogId::lambda_x2: {
      if (std::abs(q(0)) <= 1e-12)
        return {Eigen::VectorXd::Zero(1)};
      return {};
    }
  }
  return {};
}

}  // namespace genfam
