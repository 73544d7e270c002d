#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "genfam/common.hpp"
#include "genfam/family.hpp"
#include "genfam/symplectic.hpp"

namespace genfam {

struct SolveConfig {
  double newton_tol = 1e-12;
  int max_iters = 50;
  int seeds = 32;
  double seed_lo = -2.0;  // per-component seed box when the family has none
  double seed_hi = 2.0;
  double dedup_radius = 1e-6;
  std::uint64_t rng_seed = 0;
  // Cap on ||kappa step|| / ||base step|| during continuation; 0 = adaptive
  // (checked against 10x the running median by the caller).
  double continuation_ratio_cap = 0.0;

  void validate() const {
    if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (seeds < 1) throw std::invalid_argument("seeds must be >= 1");
    if (!(dedup_radius > 0.0))
      throw std::invalid_argument("dedup_radius must be > 0");
    if (!(seed_hi > seed_lo)) throw std::invalid_argument("empty seed box");
  }
};

struct CriticalPoint {
  Eigen::VectorXd q;
  Eigen::VectorXd lambda;
  double residual_norm = 0.0;
  int branch_id = -1;
  int newton_iters = 0;
};

enum class NewtonStatus { converged, diverged, stagnated, eval_error };

inline const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::converged: return "converged";
    case NewtonStatus::diverged: return "diverged";
    case NewtonStatus::stagnated: return "stagnated";
    case NewtonStatus::eval_error: return "eval_error";
  }
  return "?";
}

struct NewtonResult {
  NewtonStatus status = NewtonStatus::diverged;
  CriticalPoint point;  // valid iff status == converged
  bool ok() const { return status == NewtonStatus::converged; }
};

namespace detail {

// Solve A x = b with a rank-revealing SVD. When A is rank deficient at the
// relative tolerance the step is Tikhonov-damped (mu = 1e-10), which moves
// only within the numerically visible range and converges to the nearest
// point of a critical manifold instead of blowing up along its tangent.
inline Eigen::VectorXd damped_solve(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b) {
  constexpr double mu = 1e-10;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  const bool deficient =
      smax <= 0.0 || sigma(sigma.size() - 1) <= kRankTol * smax;
  Eigen::VectorXd coeffs = svd.matrixU().transpose() * b;
  for (int i = 0; i < sigma.size(); ++i) {
    const double s = sigma(i);
    coeffs(i) *= deficient ? s / (s * s + mu) : 1.0 / s;
  }
  return svd.matrixV() * coeffs;
}

inline double canonical_coordinate(double value, double period) {
  if (period <= 0.0) return value;
  double r = value - period * std::round(value / period);
  // Map the boundary representative -p/2 to +p/2 so equal angles compare
  // equal after canonicalization.
  if (r <= -period / 2 + 1e-15) r += period;
  return r;
}

inline Eigen::VectorXd canonical_fiber(const FamilySpec& fam,
                                       const Eigen::VectorXd& lambda) {
  const Fibration& fib = fam.fibration();
  Eigen::VectorXd out = fam.canonical_sheet(lambda);
  for (int i = 0; i < fib.fiber_dim; ++i)
    out(i) = canonical_coordinate(out(i), fib.period(i));
  return out;
}

inline double fiber_distance(const Fibration& fib, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b) {
  double acc = 0.0;
  for (int i = 0; i < fib.fiber_dim; ++i) {
    double d = std::abs(a(i) - b(i));
    const double p = fib.period(i);
    if (p > 0.0) d = std::min(d, p - d);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace detail

// Newton iteration on the fiber over a fixed base point, using the
// vertical-vertical Hessian block as the Jacobian of the residual.
inline NewtonResult newton_solve(const FamilySpec& fam,
                                 const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& lambda0,
                                 const SolveConfig& cfg = {}) {
  cfg.validate();
  const int k = fam.fiber_dim();
  Eigen::VectorXd lambda = lambda0;
  NewtonResult out;
  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    Jet2 jet;
    try {
      jet = fam.jet(q, lambda);
    } catch (const domain_error&) {
      out.status = NewtonStatus::eval_error;
      return out;
    }
    const Eigen::VectorXd r = jet.grad().tail(k);
    const double rnorm = r.norm();
    if (!std::isfinite(rnorm)) {
      out.status = NewtonStatus::diverged;
      return out;
    }
    if (rnorm <= cfg.newton_tol) {
      out.status = NewtonStatus::converged;
      out.point = CriticalPoint{q, lambda, rnorm, -1, iter};
      return out;
    }
    if (iter == cfg.max_iters) break;
    const Eigen::MatrixXd block =
        jet.hess().bottomRightCorner(k, k);
    const Eigen::VectorXd step = detail::damped_solve(block, -r);
    const double step_norm = step.norm();
    if (!std::isfinite(step_norm)) {
      out.status = NewtonStatus::diverged;
      return out;
    }
    if (step_norm <= 1e-16 * std::max(1.0, lambda.norm())) {
      out.status = NewtonStatus::stagnated;
      return out;
    }
    lambda += step;
  }
  out.status = NewtonStatus::diverged;
  return out;
}

namespace detail {

// Deterministic low-discrepancy seeds: the R_k Kronecker sequence offset by
// a seeded uniform start point.
inline std::vector<Eigen::VectorXd> seed_points(const FamilySpec& fam,
                                                const SolveConfig& cfg) {
  const int k = fam.fiber_dim();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(std::max(k, 1), cfg.seed_lo);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(std::max(k, 1), cfg.seed_hi);
  if (fam.has_seed_box()) {
    lo = fam.seed_lo();
    hi = fam.seed_hi();
  }
  // Generalized golden ratio: the positive root of x^(k+1) = x + 1.
  double phi = 1.5;
  for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (k + 1));
  Eigen::VectorXd alpha(std::max(k, 1));
  double a = 1.0;
  for (int i = 0; i < alpha.size(); ++i) {
    a /= phi;
    alpha(i) = a;
  }
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd start(std::max(k, 1));
  for (int i = 0; i < start.size(); ++i) start(i) = unit(rng);

  std::vector<Eigen::VectorXd> seeds;
  const int count = k == 0 ? 1 : cfg.seeds;
  seeds.reserve(count);
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd u(k);
    for (int i = 0; i < k; ++i) {
      double t = start(i) + (s + 1) * alpha(i);
      t -= std::floor(t);
      u(i) = lo(i) + t * (hi(i) - lo(i));
    }
    seeds.push_back(u);
  }
  return seeds;
}

}  // namespace detail

// Multistart over the fiber: distinct critical points over one base point,
// deduplicated (periodic fiber coordinates compared modulo their period)
// and labeled in sorted order. An empty result is a normal outcome.
inline std::vector<CriticalPoint> multistart(const FamilySpec& fam,
                                             const Eigen::VectorXd& q,
                                             const SolveConfig& cfg = {}) {
  cfg.validate();
  std::vector<CriticalPoint> found;
  for (const Eigen::VectorXd& seed : detail::seed_points(fam, cfg)) {
    NewtonResult r = newton_solve(fam, q, seed, cfg);
    if (!r.ok()) continue;
    r.point.lambda = detail::canonical_fiber(fam, r.point.lambda);
    if (!fam.in_fiber_domain(r.point.lambda)) continue;
    found.push_back(std::move(r.point));
  }
  std::sort(found.begin(), found.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              for (int i = 0; i < a.lambda.size(); ++i)
                if (a.lambda(i) != b.lambda(i)) return a.lambda(i) < b.lambda(i);
              return a.residual_norm < b.residual_norm;
            });
  std::vector<CriticalPoint> unique;
  for (auto& cp : found) {
    bool fresh = true;
    for (const auto& rep : unique)
      if (detail::fiber_distance(fam.fibration(), cp.lambda, rep.lambda) <=
          cfg.dedup_radius) {
        fresh = false;
        break;
      }
    if (fresh) unique.push_back(std::move(cp));
  }
  for (std::size_t i = 0; i < unique.size(); ++i)
    unique[i].branch_id = static_cast<int>(i);
  return unique;
}

struct ContinuationResult {
  std::vector<CriticalPoint> points;
  bool fold = false;          // Newton failure or singular vertical block
  std::size_t fold_index = 0; // base-path index where the fold was seen
  std::vector<double> kappa_step_ratios;  // ||d kappa|| / ||d q|| per step
};

// Continues a critical point along a list of base points, re-solving from
// the previous fiber point. Stops with a labeled break when Newton fails;
// a rank-deficient vertical block at a converged point is reported as a
// fold as well (the Morse condition fails there) without stopping.
inline ContinuationResult continue_branch(const FamilySpec& fam,
                                          const std::vector<Eigen::VectorXd>& base_path,
                                          const CriticalPoint& start,
                                          const SolveConfig& cfg = {}) {
  cfg.validate();
  ContinuationResult out;
  if (base_path.empty()) return out;
  Eigen::VectorXd lambda = start.lambda;
  std::optional<Covector> prev_kappa;
  Eigen::VectorXd prev_q;
  for (std::size_t i = 0; i < base_path.size(); ++i) {
    NewtonResult r = newton_solve(fam, base_path[i], lambda, cfg);
    if (!r.ok()) {
      out.fold = true;
      out.fold_index = i;
      break;
    }
    CriticalPoint cp = r.point;
    cp.branch_id = start.branch_id;
    lambda = cp.lambda;

    const Jet2 jet = fam.jet(cp.q, cp.lambda);
    const int k = fam.fiber_dim();
    if (k > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          jet.hess().bottomRightCorner(k, k));
      const auto& sigma = svd.singularValues();
      if (sigma(0) <= 0.0 || sigma(sigma.size() - 1) <= kRankTol * sigma(0)) {
        out.fold = true;
        out.fold_index = i;
      }
    }
    const Covector kap{cp.q, jet.grad().head(fam.base_dim())};
    if (prev_kappa) {
      const double dq = (cp.q - prev_q).norm();
      const double dk = (kap.f - prev_kappa->f).norm();
      if (dq > 0.0) {
        const double ratio = dk / dq;
        out.kappa_step_ratios.push_back(ratio);
        if (cfg.continuation_ratio_cap > 0.0 &&
            ratio > cfg.continuation_ratio_cap) {
          out.fold = true;
          out.fold_index = i;
        }
      }
    }
    prev_kappa = kap;
    prev_q = cp.q;
    out.points.push_back(std::move(cp));
  }
  return out;
}

// Gauss-Newton projection onto the critical set with all of (q, lambda)
// free. Converges linearly (step halving) even when the residual cuts out
// the critical set non-regularly, so the iteration cap is generous.
inline std::optional<Eigen::VectorXd> project_to_critical(
    const FamilySpec& fam, const Eigen::VectorXd& x0, double tol = 1e-16,
    int max_iters = 300) {
  const int k = fam.fiber_dim();
  Eigen::VectorXd x = x0;
  for (int iter = 0; iter < max_iters; ++iter) {
    Jet2 jet;
    try {
      jet = fam.jet_at(x);
    } catch (const domain_error&) {
      return std::nullopt;
    }
    const Eigen::VectorXd r = jet.grad().tail(k);
    if (!r.allFinite()) return std::nullopt;
    if (r.norm() <= tol) return x;
    const Eigen::MatrixXd jac = jet.hess().bottomRows(k);
    const Eigen::VectorXd step = detail::damped_solve(jac, -r);
    if (!step.allFinite()) return std::nullopt;
    if (step.norm() <= 1e-17 * std::max(1.0, x.norm())) break;
    x += step;
  }
  // Accept a stagnated point only if it is critical at a loose tolerance.
  Jet2 jet = fam.jet_at(x);
  if (jet.grad().tail(k).norm() <= 1e-10) return x;
  return std::nullopt;
}

// Local tangent basis of the critical set at a critical point, estimated by
// projecting perturbed points back onto the set and factoring the observed
// displacements. The vertical Hessian block M always satisfies
// T Cr <= ker M; the sampling detects the strictly smaller tangent of
// non-regularly cut critical sets (where ker M overestimates).
inline SubspaceBasis critical_tangent(const FamilySpec& fam,
                                      const Eigen::VectorXd& q,
                                      const Eigen::VectorXd& lambda,
                                      std::uint64_t rng_seed = 12345) {
  const int n = fam.base_dim(), k = fam.fiber_dim();
  const int total = n + k;
  const Eigen::VectorXd p = fam.join(q, lambda);
  const Jet2 jet = fam.jet_at(p);
  const Eigen::MatrixXd kernel = null_space(jet.hess().bottomRows(k));
  const int r = static_cast<int>(kernel.cols());
  if (r == 0) return SubspaceBasis(total);

  const double scale = std::max(1.0, p.lpNorm<Eigen::Infinity>());
  const double h = 1e-4 * scale;
  const int samples = std::max(2 * r + 4, 8);
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Eigen::VectorXd> displacements;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd coeff(r);
    for (int i = 0; i < r; ++i) coeff(i) = gauss(rng);
    if (coeff.norm() == 0.0) continue;
    const Eigen::VectorXd dir = (kernel * coeff).normalized();
    const auto projected = project_to_critical(fam, p + h * dir);
    if (!projected) continue;
    const Eigen::VectorXd delta = *projected - p;
    if (delta.norm() > 3.0 * h) continue;  // jumped to another sheet
    displacements.push_back(delta / h);
  }
  if (displacements.empty()) return SubspaceBasis(total);

  Eigen::MatrixXd d(total, static_cast<int>(displacements.size()));
  for (std::size_t j = 0; j < displacements.size(); ++j)
    d.col(static_cast<int>(j)) = displacements[j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  int dim = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > std::max(0.02 * smax, 0.01)) ++dim;
  // When every kernel direction is genuinely tangent, ker M *is* T Cr and
  // its basis is exact to machine precision; the sampled basis (accurate
  // only to O(h)) is needed just for non-regularly cut critical sets.
  if (dim == r) return SubspaceBasis::from_vectors(kernel);
  return SubspaceBasis::from_vectors(svd.matrixU().leftCols(dim));
}

}  // namespace genfam
