#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "genfam/common.hpp"

namespace genfam {

// A linear subspace of R^d held as an orthonormal basis. The reported
// dimension is the numerical rank of the spanning set: singular values are
// kept when sigma > rank_tol * sigma_max.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(int ambient_dim, double rank_tol = kRankTol)
      : ambient_(ambient_dim),
        rank_tol_(rank_tol),
        basis_(Eigen::MatrixXd::Zero(ambient_dim, 0)) {
    if (ambient_dim < 0) throw std::invalid_argument("negative ambient dim");
  }

  // Orthonormalizes the given spanning vectors (columns).
  static SubspaceBasis from_vectors(const Eigen::MatrixXd& vectors,
                                    double rank_tol = kRankTol) {
    SubspaceBasis s(static_cast<int>(vectors.rows()), rank_tol);
    if (vectors.cols() == 0) return s;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors, Eigen::ComputeThinU);
    const auto& sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i)
      if (sigma(i) > rank_tol * smax && sigma(i) > 0.0) ++rank;
    s.basis_ = svd.matrixU().leftCols(rank);
    return s;
  }

  static SubspaceBasis full(int ambient_dim, double rank_tol = kRankTol) {
    SubspaceBasis s(ambient_dim, rank_tol);
    s.basis_ = Eigen::MatrixXd::Identity(ambient_dim, ambient_dim);
    return s;
  }

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  double rank_tol() const { return rank_tol_; }
  // Orthonormal columns spanning the subspace.
  const Eigen::MatrixXd& matrix() const { return basis_; }

  bool contains(const Eigen::VectorXd& v, double tol = kRankTol) const {
    if (v.size() != ambient_)
      throw std::invalid_argument("vector/ambient dimension mismatch");
    const Eigen::VectorXd residual = v - basis_ * (basis_.transpose() * v);
    return residual.norm() <= tol * std::max(1.0, v.norm());
  }

  bool contains(const SubspaceBasis& other, double tol = kRankTol) const {
    if (other.ambient_ != ambient_)
      throw std::invalid_argument("ambient dimension mismatch");
    for (int j = 0; j < other.dim(); ++j)
      if (!contains(other.basis_.col(j), tol)) return false;
    return true;
  }

  // Subspace equality as mutual containment of orthonormalized bases.
  bool equals(const SubspaceBasis& other, double tol = kRankTol) const {
    return dim() == other.dim() && contains(other, tol) &&
           other.contains(*this, tol);
  }

 private:
  int ambient_;
  double rank_tol_;
  Eigen::MatrixXd basis_;
};

enum class SubspaceClass {
  isotropic,
  coisotropic,
  lagrangian,
  symplectic,
  generic
};

inline const char* to_string(SubspaceClass c) {
  switch (c) {
    case SubspaceClass::isotropic: return "isotropic";
    case SubspaceClass::coisotropic: return "coisotropic";
    case SubspaceClass::lagrangian: return "lagrangian";
    case SubspaceClass::symplectic: return "symplectic";
    case SubspaceClass::generic: return "generic";
  }
  return "?";
}

// R^{2m} with coordinates (dq, dp) and the canonical form
//   omega((dq1,dp1),(dq2,dp2)) = <dp1, dq2> - <dp2, dq1>.
// The sign is fixed to this pairing convention throughout; the mixed
// horizontal/vertical pairing omega(i_h(dq), i_v(f')) then equals -<f', dq>.
class SymplecticSpace {
 public:
  explicit SymplecticSpace(int half_dim) : m_(half_dim) {
    if (half_dim < 1) throw std::invalid_argument("half dimension must be >= 1");
  }

  int half_dim() const { return m_; }
  int dim() const { return 2 * m_; }

  double omega(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    check(u);
    check(v);
    return u.tail(m_).dot(v.head(m_)) - v.tail(m_).dot(u.head(m_));
  }

  // Row r such that r . u = omega(u, v): r = (-v_p, v_q).
  Eigen::VectorXd pairing_row(const Eigen::VectorXd& v) const {
    check(v);
    Eigen::VectorXd r(2 * m_);
    r.head(m_) = -v.tail(m_);
    r.tail(m_) = v.head(m_);
    return r;
  }

 private:
  void check(const Eigen::VectorXd& u) const {
    if (u.size() != 2 * m_)
      throw std::invalid_argument("vector has dimension " +
                                  std::to_string(u.size()) + ", expected " +
                                  std::to_string(2 * m_));
  }

  int m_;
};

// Null space of A (columns spanning {x : A x = 0}) at a relative tolerance.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& a,
                                  double rank_tol = kRankTol) {
  if (a.rows() == 0)
    return Eigen::MatrixXd::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > rank_tol * smax && sigma(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

// Symplectic polar V^polar = {u : omega(u, v) = 0 for all v in V}.
inline SubspaceBasis polar(const SymplecticSpace& space,
                           const SubspaceBasis& v) {
  if (v.ambient_dim() != space.dim())
    throw std::invalid_argument("subspace ambient does not match space");
  if (v.dim() == 0) return SubspaceBasis::full(space.dim(), v.rank_tol());
  Eigen::MatrixXd pairing(v.dim(), space.dim());
  for (int j = 0; j < v.dim(); ++j)
    pairing.row(j) = space.pairing_row(v.matrix().col(j)).transpose();
  return SubspaceBasis::from_vectors(null_space(pairing, v.rank_tol()),
                                     v.rank_tol());
}

// Intersection and sum of two subspaces of the same ambient space.
// dim(A) + dim(B) = dim(A cap B) + dim(A + B).
struct IntersectSum {
  SubspaceBasis intersection;
  SubspaceBasis sum;
};

inline IntersectSum intersect_sum(const SubspaceBasis& a,
                                  const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("ambient dimension mismatch");
  const int ambient = a.ambient_dim();
  const double tol = std::min(a.rank_tol(), b.rank_tol());

  Eigen::MatrixXd joint(ambient, a.dim() + b.dim());
  joint << a.matrix(), b.matrix();
  SubspaceBasis sum = SubspaceBasis::from_vectors(joint, tol);

  SubspaceBasis intersection(ambient, tol);
  if (a.dim() > 0 && b.dim() > 0) {
    Eigen::MatrixXd stacked(ambient, a.dim() + b.dim());
    stacked << a.matrix(), -b.matrix();
    const Eigen::MatrixXd coeffs = null_space(stacked, tol);
    if (coeffs.cols() > 0) {
      const Eigen::MatrixXd vectors =
          a.matrix() * coeffs.topRows(a.dim());
      intersection = SubspaceBasis::from_vectors(vectors, tol);
    }
  }
  return {intersection, sum};
}

inline SubspaceClass classify(const SymplecticSpace& space,
                              const SubspaceBasis& v,
                              double tol = kRankTol) {
  const SubspaceBasis p = polar(space, v);
  if (v.equals(p, tol)) return SubspaceClass::lagrangian;
  if (intersect_sum(v, p).intersection.dim() == 0)
    return SubspaceClass::symplectic;
  if (p.contains(v, tol)) return SubspaceClass::isotropic;
  if (v.contains(p, tol)) return SubspaceClass::coisotropic;
  return SubspaceClass::generic;
}

// True iff c_given equals A cap B as subspaces; the tangent-level clean
// intersection test.
inline bool is_clean(const SubspaceBasis& a, const SubspaceBasis& b,
                     const SubspaceBasis& c_given, double tol = kRankTol) {
  return c_given.equals(intersect_sum(a, b).intersection, tol);
}

// True iff A + B spans the whole space.
inline bool is_transverse(const SymplecticSpace& space, const SubspaceBasis& a,
                          const SubspaceBasis& b) {
  return intersect_sum(a, b).sum.dim() == space.dim();
}

}  // namespace genfam
