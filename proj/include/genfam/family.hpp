#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "genfam/common.hpp"
#include "genfam/expr.hpp"
#include "genfam/jet.hpp"

namespace genfam {

// Trivial fibration eta: Q x F -> Q. Coordinates on the total space are
// (q1..qn, l1..lk); eta is the projection onto the first n coordinates and
// the vertical subspace at any point is the span of the last k coordinate
// directions.
struct Fibration {
  int base_dim = 1;   // n
  int fiber_dim = 0;  // k
  // Period of each fiber coordinate (0 = not periodic). Angle charts set
  // 2*pi so that solutions can be deduplicated modulo the period.
  Eigen::VectorXd fiber_period;

  int total_dim() const { return base_dim + fiber_dim; }

  void validate() const {
    if (base_dim < 1) throw std::invalid_argument("base dimension must be >= 1");
    if (fiber_dim < 0) throw std::invalid_argument("fiber dimension must be >= 0");
    if (fiber_period.size() != 0 && fiber_period.size() != fiber_dim)
      throw std::invalid_argument("fiber_period size must equal fiber dim");
  }

  double period(int fiber_index) const {
    return fiber_period.size() > 0 ? fiber_period(fiber_index) : 0.0;
  }
};

// A scalar family evaluable both over plain doubles and over second-order
// jets along the same code path.
class EnergyFamily {
 public:
  virtual ~EnergyFamily() = default;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Jet2 jet(const Eigen::VectorXd& x) const = 0;
};

class ExprEnergy final : public EnergyFamily {
 public:
  ExprEnergy(ExprAst ast, std::map<std::string, double> params)
      : ast_(std::move(ast)), params_(std::move(params)) {}

  double value(const Eigen::VectorXd& x) const override {
    return ast_.eval_scalar(x, params_);
  }
  Jet2 jet(const Eigen::VectorXd& x) const override {
    return ast_.eval_jet(x, params_);
  }
  const ExprAst& ast() const { return ast_; }
  const std::map<std::string, double>& params() const { return params_; }

 private:
  ExprAst ast_;
  std::map<std::string, double> params_;
};

// A covector on the base: a point q together with components f of an
// element of T*Q at q.
struct Covector {
  Eigen::VectorXd q;
  Eigen::VectorXd f;
};

// A family of functions over a trivial fibration, immutable after
// construction. All evaluations are pure; concurrent use is safe.
class FamilySpec {
 public:
  FamilySpec(Fibration fib, std::shared_ptr<const EnergyFamily> energy,
             std::string label = {})
      : fib_(std::move(fib)), energy_(std::move(energy)), label_(std::move(label)) {
    fib_.validate();
    if (!energy_) throw std::invalid_argument("null energy");
  }

  const Fibration& fibration() const { return fib_; }
  int base_dim() const { return fib_.base_dim; }
  int fiber_dim() const { return fib_.fiber_dim; }
  const std::string& label() const { return label_; }
  const EnergyFamily& energy() const { return *energy_; }

  // Optional per-family seed box for fiber multistart (angle charts restrict
  // seeds away from chart boundaries). Empty = use the solver config box.
  void set_seed_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != fib_.fiber_dim || hi.size() != fib_.fiber_dim)
      throw std::invalid_argument("seed box size must equal fiber dim");
    seed_lo_ = std::move(lo);
    seed_hi_ = std::move(hi);
  }
  bool has_seed_box() const { return seed_lo_.size() > 0; }
  const Eigen::VectorXd& seed_lo() const { return seed_lo_; }
  const Eigen::VectorXd& seed_hi() const { return seed_hi_; }

  // Optional map folding redundant chart sheets onto a canonical one (e.g.
  // the mirror symmetry of a sphere chart); applied before periodic folding
  // when deduplicating solutions.
  void set_fiber_canonicalizer(
      std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn) {
    fiber_canon_ = std::move(fn);
  }
  Eigen::VectorXd canonical_sheet(const Eigen::VectorXd& lambda) const {
    return fiber_canon_ ? fiber_canon_(lambda) : lambda;
  }

  // Optional chart-domain predicate over canonicalized fiber points. Charts
  // with degenerate loci (sphere poles) exclude them here; solutions outside
  // the domain are chart artifacts, not critical points of the family.
  void set_fiber_domain(std::function<bool(const Eigen::VectorXd&)> fn) {
    fiber_domain_ = std::move(fn);
  }
  bool in_fiber_domain(const Eigen::VectorXd& lambda) const {
    return fiber_domain_ ? fiber_domain_(lambda) : true;
  }

  Eigen::VectorXd join(const Eigen::VectorXd& q,
                       const Eigen::VectorXd& lambda) const {
    if (q.size() != fib_.base_dim || lambda.size() != fib_.fiber_dim)
      throw std::invalid_argument("point dimensions do not match fibration");
    Eigen::VectorXd x(fib_.total_dim());
    x << q, lambda;
    return x;
  }

  double value(const Eigen::VectorXd& q, const Eigen::VectorXd& lambda) const {
    return energy_->value(join(q, lambda));
  }

  Jet2 jet(const Eigen::VectorXd& q, const Eigen::VectorXd& lambda) const {
    return energy_->jet(join(q, lambda));
  }

  Jet2 jet_at(const Eigen::VectorXd& x) const { return energy_->jet(x); }

  // Vertical residual (dU/dl1, ..., dU/dlk); zero exactly on the critical
  // set of the family.
  Eigen::VectorXd residual(const Eigen::VectorXd& q,
                           const Eigen::VectorXd& lambda) const {
    return jet(q, lambda).grad().tail(fib_.fiber_dim);
  }

  double residual_norm(const Eigen::VectorXd& q,
                       const Eigen::VectorXd& lambda) const {
    return residual(q, lambda).norm();
  }

  // Full differential dU(qbar) as covector components over the total space.
  Eigen::VectorXd differential(const Eigen::VectorXd& q,
                               const Eigen::VectorXd& lambda) const {
    return jet(q, lambda).grad();
  }

  // The map assigning to a critical point the covector on the base obtained
  // from the horizontal differential. Refused off the critical set.
  Covector kappa(const Eigen::VectorXd& q, const Eigen::VectorXd& lambda,
                 double tol = kCriticalTol) const {
    const Jet2 j = jet(q, lambda);
    const double rnorm = j.grad().tail(fib_.fiber_dim).norm();
    if (rnorm > tol)
      throw not_critical_error(
          "kappa is only defined on the critical set: residual norm " +
          std::to_string(rnorm) + " exceeds tolerance " + std::to_string(tol));
    return Covector{q, j.grad().head(fib_.base_dim)};
  }

 private:
  Fibration fib_;
  std::shared_ptr<const EnergyFamily> energy_;
  std::string label_;
  Eigen::VectorXd seed_lo_, seed_hi_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fiber_canon_;
  std::function<bool(const Eigen::VectorXd&)> fiber_domain_;
};

// True iff a covector over the total space annihilates all vertical vectors,
// i.e. its last k components vanish. Tolerance is relative to the covector
// scale.
inline bool in_vertical_polar(const Fibration& fib, const Eigen::VectorXd& cov,
                              double tol = kCriticalTol) {
  if (cov.size() != fib.total_dim())
    throw std::invalid_argument("covector has wrong dimension");
  const double scale = std::max(1.0, cov.norm());
  return cov.tail(fib.fiber_dim).norm() <= tol * scale;
}

// Reduction map eta-tilde on the vertical polar: projects a covector with
// vanishing fiber components to the base covector at the projected point.
inline Covector reduce(const Fibration& fib, const Eigen::VectorXd& qbar,
                       const Eigen::VectorXd& cov, double tol = kCriticalTol) {
  if (qbar.size() != fib.total_dim())
    throw std::invalid_argument("point has wrong dimension");
  if (!in_vertical_polar(fib, cov, tol))
    throw std::invalid_argument(
        "covector is not in the vertical polar (fiber components "
        "do not vanish)");
  return Covector{qbar.head(fib.base_dim), cov.head(fib.base_dim)};
}

}  // namespace genfam
