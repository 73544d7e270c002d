#include <catch2/catch_amalgamated.hpp>

#include "genfam/catalog.hpp"
#include "genfam/solver.hpp"
#include "oracles.hpp"

using genfam::CatalogId;
using genfam::CriticalPoint;
using genfam::NewtonStatus;
using genfam::SolveConfig;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("newton converges onto the two_springs critical circle") {
  const auto entry = genfam::instantiate(CatalogId::two_springs);
  const Eigen::VectorXd q = vec({0.5, 0.0});
  const auto r = genfam::newton_solve(entry.family, q, vec({1.2, 0.3}));
  REQUIRE(r.ok());
  CHECK(r.point.residual_norm <= 1e-12);
  CHECK(std::abs((r.point.lambda - q).norm() - 1.0) < 1e-10);
}

TEST_CASE("newton on the degenerate family") {
  const auto entry = genfam::instantiate(CatalogId::lambda_x2);
  // Residual is constant in the fiber: the seed comes back unchanged.
  const auto at_zero =
      genfam::newton_solve(entry.family, vec({0.0}), vec({3.25}));
  REQUIRE(at_zero.ok());
  CHECK(at_zero.point.lambda(0) == 3.25);
  CHECK(at_zero.point.newton_iters == 0);
  // Off the critical set no fiber motion can zero the residual.
  const auto off = genfam::newton_solve(entry.family, vec({0.5}), vec({0.0}));
  CHECK_FALSE(off.ok());
  CHECK(off.status == NewtonStatus::stagnated);
}

TEST_CASE("every multistart point satisfies the residual bound") {
  const auto entry = genfam::instantiate(CatalogId::two_springs);
  SolveConfig cfg;
  const auto points = genfam::multistart(entry.family, vec({0.5, 0.0}), cfg);
  REQUIRE(points.size() >= 4);  // the critical circle is one-dimensional
  for (const auto& cp : points) {
    CHECK(cp.residual_norm <= cfg.newton_tol);
    CHECK(entry.family.residual(cp.q, cp.lambda).norm() <= cfg.newton_tol);
  }
  // Deduplication is a partition.
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      CHECK((points[i].lambda - points[j].lambda).norm() > cfg.dedup_radius);
}

TEST_CASE("rod_spring multistart finds exactly the two branches") {
  const auto entry = genfam::instantiate(CatalogId::rod_spring);
  const auto points = genfam::multistart(entry.family, vec({2.0, 0.0}));
  REQUIRE(points.size() == 2);
  // theta = 0 and theta = pi (mod 2 pi), in either representative order.
  std::vector<double> found = {std::abs(points[0].lambda(0)),
                               std::abs(points[1].lambda(0))};
  std::sort(found.begin(), found.end());
  CHECK(found[0] < 1e-8);
  CHECK(std::abs(found[1] - M_PI) < 1e-8);
}

TEST_CASE("multistart over an empty critical fiber returns nothing") {
  const auto entry = genfam::instantiate(CatalogId::lambda_x2);
  const auto points = genfam::multistart(entry.family, vec({0.3}));
  CHECK(points.empty());
}

TEST_CASE("continuation tracks the minus branch closed form") {
  const auto entry = genfam::instantiate(CatalogId::rod_spring);
  std::vector<Eigen::VectorXd> path;
  for (int i = 0; i < 16; ++i)
    path.push_back(vec({1.5 + 1.5 * i / 15.0, 0.0}));
  CriticalPoint start;
  start.q = path[0];
  start.lambda = vec({0.0});
  start.branch_id = 0;
  const auto run = genfam::continue_branch(entry.family, path, start);
  REQUIRE(run.points.size() == 16);
  CHECK_FALSE(run.fold);
  for (const auto& cp : run.points) {
    const auto kappa = entry.family.kappa(cp.q, cp.lambda);
    const double r = cp.q.norm();
    const Eigen::VectorXd expected = (1.0 - 1.0 / r) * cp.q;  // minus branch
    CHECK((kappa.f - expected).norm() <= 1e-8);
    CHECK(cp.branch_id == 0);
  }
  // kappa varies smoothly: each step ratio within 10x the median ratio.
  std::vector<double> ratios = run.kappa_step_ratios;
  REQUIRE_FALSE(ratios.empty());
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (double r : ratios) CHECK(r <= 10.0 * std::max(median, 1e-12));
}

TEST_CASE("constant path repeats the start") {
  const auto entry = genfam::instantiate(CatalogId::rod_spring);
  std::vector<Eigen::VectorXd> path(4, vec({2.0, 0.0}));
  CriticalPoint start;
  start.q = path[0];
  start.lambda = vec({0.0});
  const auto run = genfam::continue_branch(entry.family, path, start);
  REQUIRE(run.points.size() == 4);
  for (const auto& cp : run.points) CHECK(std::abs(cp.lambda(0)) < 1e-10);
}

TEST_CASE("continuation through the excluded set reports a fold") {
  const auto entry = genfam::instantiate(CatalogId::rod_spring);
  std::vector<Eigen::VectorXd> path;
  for (int i = 0; i < 16; ++i)
    path.push_back(vec({1.5 * (1.0 - i / 15.0), 0.0}));  // ends at q = q0
  CriticalPoint start;
  start.q = path[0];
  start.lambda = vec({0.0});
  const auto run = genfam::continue_branch(entry.family, path, start);
  CHECK(run.fold);  // the vertical block degenerates at q = q0
}

TEST_CASE("projection onto the critical set") {
  const auto two = genfam::instantiate(CatalogId::two_springs);
  const auto p1 = genfam::project_to_critical(
      two.family, vec({0.4, 0.1, 1.9, 0.2}));
  REQUIRE(p1.has_value());
  CHECK(two.family.jet_at(*p1).grad().tail(2).norm() <= 1e-10);

  const auto lx2 = genfam::instantiate(CatalogId::lambda_x2);
  const auto p2 = genfam::project_to_critical(lx2.family, vec({1e-3, 2.0}));
  REQUIRE(p2.has_value());
  CHECK(std::abs((*p2)(0)) <= 1e-7);
  CHECK(std::abs((*p2)(1) - 2.0) <= 1e-7);
}

TEST_CASE("sampled tangent dimension of the critical set") {
  // two_springs: Cr is the cylinder ||l - q|| = a, a 3-manifold in R^4.
  const auto two = genfam::instantiate(CatalogId::two_springs);
  CHECK(genfam::critical_tangent(two.family, vec({0.5, 0.0}), vec({1.5, 0.0}))
            .dim() == 3);
  // rod_spring: Cr is a double cover of the base, dimension 2 in R^3.
  const auto rod = genfam::instantiate(CatalogId::rod_spring);
  CHECK(genfam::critical_tangent(rod.family, vec({2.0, 0.0}), vec({0.0}))
            .dim() == 2);
  // lambda_x2: Cr = {x = 0} is 1-dimensional even though ker M is all of
  // R^2; the sampled tangent sees the difference.
  const auto lx2 = genfam::instantiate(CatalogId::lambda_x2);
  const auto tcr = genfam::critical_tangent(lx2.family, vec({0.0}), vec({5.0}));
  CHECK(tcr.dim() == 1);
  // Sampled (not exact) basis: accurate to the sampling step.
  CHECK(tcr.contains(vec({0.0, 1.0}), 1e-3));
}

TEST_CASE("multistart is deterministic for a fixed seed") {
  const auto entry = genfam::instantiate(CatalogId::two_springs);
  SolveConfig cfg;
  cfg.rng_seed = 99;
  const auto a = genfam::multistart(entry.family, vec({0.5, 0.0}), cfg);
  const auto b = genfam::multistart(entry.family, vec({0.5, 0.0}), cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].lambda == b[i].lambda);
}
