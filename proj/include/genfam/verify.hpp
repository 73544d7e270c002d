#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "genfam/family.hpp"
#include "genfam/hessian.hpp"
#include "genfam/solver.hpp"
#include "genfam/symplectic.hpp"

namespace genfam {

// Numerical verification of the geometric claims at sampled critical
// points. Manifold-level statements are checked at tangent level: T S-bar
// is the graph of the full coordinate Hessian, T V-polar is the coordinate
// subspace with vanishing fiber covector components, and the image of
// T kappa is read off the Hessian blocks along the sampled tangent of the
// critical set.

// Tangent space of S-bar = im(dU) at the critical point, as the graph
// {(dx, H dx)} in R^{2(n+k)}. Always a Lagrangian subspace.
inline SubspaceBasis tangent_S_bar(const Eigen::MatrixXd& full_hessian) {
  const int d = static_cast<int>(full_hessian.rows());
  Eigen::MatrixXd cols(2 * d, d);
  cols.topRows(d) = Eigen::MatrixXd::Identity(d, d);
  cols.bottomRows(d) = full_hessian;
  return SubspaceBasis::from_vectors(cols);
}

// Tangent space of the vertical polar V-polar inside T(T*Qbar): all of
// dqbar is free, covector variations keep zero fiber components.
// Dimension 2n + k.
inline SubspaceBasis tangent_vertical_polar(const Fibration& fib) {
  const int n = fib.base_dim, k = fib.fiber_dim, d = n + k;
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(2 * d, d + n);
  cols.topLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  cols.block(d, d, n, n) = Eigen::MatrixXd::Identity(n, n);
  return SubspaceBasis::from_vectors(cols);
}

// Kernel of the reduction map eta-tilde at a point of the vertical polar:
// vertical base directions with zero covector variation.
inline SubspaceBasis ker_T_eta_tilde(const Fibration& fib) {
  const int n = fib.base_dim, k = fib.fiber_dim, d = n + k;
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(2 * d, k);
  cols.block(n, 0, k, k) = Eigen::MatrixXd::Identity(k, k);
  return SubspaceBasis::from_vectors(cols);
}

// Image of T kappa in R^{2n}: tangent directions of the critical set pushed
// through (dq, dl) -> (dq, H_qq dq + H_ql dl). A sampled tangent basis is
// accurate only to the sampling step, so image components below an absolute
// noise floor (scaled by the Hessian magnitude) do not count toward the
// dimension.
inline SubspaceBasis tangent_kappa_image(const Eigen::MatrixXd& full_hessian,
                                         const SubspaceBasis& tangent_cr,
                                         int n) {
  if (tangent_cr.dim() == 0) return SubspaceBasis(2 * n);
  Eigen::MatrixXd cols(2 * n, tangent_cr.dim());
  for (int j = 0; j < tangent_cr.dim(); ++j) {
    const Eigen::VectorXd t = tangent_cr.matrix().col(j);
    cols.col(j).head(n) = t.head(n);
    cols.col(j).tail(n) = (full_hessian * t).head(n);
  }
  const double noise = 1e-3 * (1.0 + full_hessian.norm());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  int dim = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > std::max(kRankTol * smax, noise)) ++dim;
  return SubspaceBasis::from_vectors(svd.matrixU().leftCols(dim));
}

// Maximum |omega(b_i, b_j)| over pairs of basis vectors. With an
// orthonormal basis the violation is unit-free as it stands.
inline double isotropy_violation(const SymplecticSpace& space,
                                 const SubspaceBasis& basis) {
  double worst = 0.0;
  for (int i = 0; i < basis.dim(); ++i)
    for (int j = i + 1; j < basis.dim(); ++j)
      worst = std::max(worst, std::abs(space.omega(basis.matrix().col(i),
                                                   basis.matrix().col(j))));
  return worst;
}

// Per-point verification record.
struct PointCheck {
  int rank = 0;               // rank of the vertical Hessian block
  int dim_tangent_cr = 0;     // sampled dim of T Cr
  int dim_kappa_image = 0;    // dim of im(T kappa), n for regular families
  double isotropy = 0.0;      // violation of the kappa image in R^{2n}
  bool sbar_lagrangian = false;
  int dim_intersection = 0;   // dim(T S-bar cap T V-polar)
  int dim_sum = 0;            // dim(T S-bar + T V-polar)
  int kernel_overlap = 0;     // dim(ker T eta-tilde cap T S-bar)
  bool intersection_identity = false;  // dim_intersection == (n+k) - rank
  bool kernel_identity = false;  // kernel_overlap == k - rank
  bool clean = false;
  bool transverse = false;
};

inline PointCheck check_point(const FamilySpec& fam, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& lambda,
                              double crit_tol = kCriticalTol,
                              std::uint64_t rng_seed = 12345) {
  const int n = fam.base_dim(), k = fam.fiber_dim();
  PointCheck pc;

  const HessianReport rep = family_hessian(fam, q, lambda, crit_tol);
  pc.rank = rep.rank;

  const SubspaceBasis tcr = critical_tangent(fam, q, lambda, rng_seed);
  pc.dim_tangent_cr = tcr.dim();

  const SubspaceBasis ts = tangent_S_bar(rep.full);
  const SubspaceBasis tv = tangent_vertical_polar(fam.fibration());
  const SymplecticSpace big(n + k);
  pc.sbar_lagrangian = classify(big, ts) == SubspaceClass::lagrangian;

  const IntersectSum both = intersect_sum(ts, tv);
  pc.dim_intersection = both.intersection.dim();
  pc.dim_sum = both.sum.dim();
  pc.intersection_identity = pc.dim_intersection == (n + k) - pc.rank;
  // Clean intersection at tangent level: the tangent of S-bar cap V-polar
  // (the critical-set tangent lifted through the Hessian graph) fills the
  // intersection of the tangents.
  pc.clean = pc.intersection_identity && pc.dim_intersection == pc.dim_tangent_cr;
  pc.transverse = pc.dim_sum == 2 * (n + k);

  pc.kernel_overlap =
      intersect_sum(ker_T_eta_tilde(fam.fibration()), ts).intersection.dim();
  pc.kernel_identity = pc.kernel_overlap == k - pc.rank;

  const SubspaceBasis image = tangent_kappa_image(rep.full, tcr, n);
  pc.dim_kappa_image = image.dim();
  const SymplecticSpace base(n);
  pc.isotropy = isotropy_violation(base, image);
  return pc;
}

}  // namespace genfam
