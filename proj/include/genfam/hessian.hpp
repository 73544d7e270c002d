#pragma once

#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "genfam/catalog.hpp"
#include "genfam/common.hpp"
#include "genfam/family.hpp"
#include "genfam/solver.hpp"
#include "genfam/symplectic.hpp"

namespace genfam {

// The Hessian of a family at a critical point. The coordinate Hessian of U
// restricted to pairs (vertical, anything) is the k x (n+k) row block M of
// the full symmetric Hessian; its rank drives the Morse/regular
// classification and all the dimension bookkeeping:
//   dim ker(T eta-tilde) cap T S-bar = k - rank(M)
//   dim(T S-bar cap T V-polar)       = (n+k) - rank(M)
struct HessianReport {
  Eigen::MatrixXd full;      // (n+k) x (n+k) coordinate Hessian at the point
  Eigen::MatrixXd vertical;  // k x (n+k), the last k rows of full
  int rank = 0;              // numerical rank of the vertical block
  int kernel_dim = 0;        // k - rank
};

inline int matrix_rank(const Eigen::MatrixXd& m, double tol = kRankTol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > tol * smax && sigma(i) > 0.0) ++rank;
  return rank;
}

inline HessianReport family_hessian(const FamilySpec& fam,
                                    const Eigen::VectorXd& q,
                                    const Eigen::VectorXd& lambda,
                                    double crit_tol = kCriticalTol) {
  const int k = fam.fiber_dim();
  const Jet2 jet = fam.jet(q, lambda);
  const double rnorm = jet.grad().tail(k).norm();
  if (rnorm > crit_tol)
    throw not_critical_error(
        "family Hessian requested off the critical set: residual norm " +
        std::to_string(rnorm));
  HessianReport rep;
  rep.full = jet.hess();
  rep.vertical = jet.hess().bottomRows(k);
  rep.rank = matrix_rank(rep.vertical);
  rep.kernel_dim = k - rep.rank;
  return rep;
}

// Kernel of the family Hessian: vertical vectors (0, dl) with dl in the
// left null space of M, embedded into R^{n+k}.
inline SubspaceBasis hessian_kernel(const HessianReport& rep, int n, int k) {
  const Eigen::MatrixXd left_null =
      null_space(rep.vertical.transpose());  // {dl : dl^T M = 0}
  Eigen::MatrixXd embedded = Eigen::MatrixXd::Zero(n + k, left_null.cols());
  embedded.bottomRows(k) = left_null;
  return SubspaceBasis::from_vectors(embedded);
}

// Coordinate Hessian of a function on Q at a critical point, or the
// relative Hessian H(U - F) when a reference function with matching
// differential is supplied.
inline Eigen::MatrixXd function_hessian(const EnergyFamily& f,
                                        const Eigen::VectorXd& q,
                                        const EnergyFamily* reference = nullptr,
                                        double crit_tol = kCriticalTol) {
  const Jet2 jf = f.jet(q);
  if (reference == nullptr) {
    if (jf.grad().norm() > crit_tol)
      throw not_critical_error(
          "Hessian at a non-critical point requires a reference function "
          "(gradient norm " +
          std::to_string(jf.grad().norm()) + ")");
    return jf.hess();
  }
  const Jet2 jr = reference->jet(q);
  const double mismatch = (jf.grad() - jr.grad()).norm();
  if (mismatch > crit_tol * std::max(1.0, jf.grad().norm()))
    throw std::invalid_argument(
        "reference function differential does not match (|df - dF| = " +
        std::to_string(mismatch) + ")");
  return jf.hess() - jr.hess();
}

// The vertical row block of the Hessian of U - F o eta computed in one jet
// pass. F o eta has no fiber dependence, so this equals the vertical block
// of the Hessian of U exactly (used to verify reference independence).
inline Eigen::MatrixXd relative_vertical_block(const FamilySpec& fam,
                                               const EnergyFamily& reference,
                                               const Eigen::VectorXd& q,
                                               const Eigen::VectorXd& lambda) {
  const int n = fam.base_dim(), k = fam.fiber_dim();
  const Jet2 ju = fam.jet(q, lambda);
  const Jet2 jf = reference.jet(q);
  Eigen::MatrixXd hess = ju.hess();
  hess.topLeftCorner(n, n) -= jf.hess();
  return hess.bottomRows(k);
}

struct SampleClassification {
  int rank = 0;
  int tangent_dim = 0;  // sampled dim of T Cr at the point
  int codim = 0;        // (n+k) - tangent_dim
};

struct ClassificationResult {
  FamilyClass family_class = FamilyClass::irregular_nonconstant_rank;
  bool rank_constant = false;
  int rank = -1;  // common rank when constant
  std::vector<SampleClassification> samples;
  std::string evidence;
};

// Classifies a family from critical samples: Morse when the vertical block
// has full rank k everywhere; regular when the rank is constant and equals
// the codimension of the critical set at every sample; degenerate when the
// rank is constant but falls short of the codimension. The codimension is
// measured from the sampled local tangent of the critical set, not from
// ker M, because the two differ exactly in the non-regular case.
inline ClassificationResult classify_family(
    const FamilySpec& fam, const std::vector<CriticalPoint>& samples,
    double crit_tol = kCriticalTol, std::uint64_t rng_seed = 12345) {
  if (samples.empty())
    throw std::invalid_argument("classification requires at least one sample");
  const int n = fam.base_dim(), k = fam.fiber_dim();
  ClassificationResult out;
  bool all_full = true, constant = true, rank_is_codim = true;
  int first_rank = -1;
  for (const auto& cp : samples) {
    const HessianReport rep = family_hessian(fam, cp.q, cp.lambda, crit_tol);
    SampleClassification sc;
    sc.rank = rep.rank;
    sc.tangent_dim =
        critical_tangent(fam, cp.q, cp.lambda, rng_seed).dim();
    sc.codim = (n + k) - sc.tangent_dim;
    if (first_rank < 0) first_rank = sc.rank;
    constant = constant && sc.rank == first_rank;
    all_full = all_full && sc.rank == k;
    rank_is_codim = rank_is_codim && sc.rank == sc.codim;
    out.samples.push_back(sc);
  }
  out.rank_constant = constant;
  out.rank = constant ? first_rank : -1;
  if (all_full)
    out.family_class = FamilyClass::morse;
  else if (constant && rank_is_codim)
    out.family_class = FamilyClass::regular;
  else if (constant)
    out.family_class = FamilyClass::degenerate;
  else
    out.family_class = FamilyClass::irregular_nonconstant_rank;

  std::ostringstream ev;
  ev << samples.size() << " samples; rank "
     << (constant ? std::to_string(first_rank) : std::string("non-constant"))
     << "; codim";
  int prev = -1;
  for (const auto& sc : out.samples)
    if (sc.codim != prev) {
      ev << ' ' << sc.codim;
      prev = sc.codim;
    }
  out.evidence = ev.str();
  return out;
}

}  // namespace genfam
