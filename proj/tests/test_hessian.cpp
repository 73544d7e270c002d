#include <catch2/catch_amalgamated.hpp>

#include "genfam/catalog.hpp"
#include "genfam/expr.hpp"
#include "genfam/hessian.hpp"
#include "oracles.hpp"

using genfam::CatalogId;
using genfam::ExprAst;
using genfam::ExprEnergy;
using genfam::HessianReport;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const std::map<std::string, double> kNoParams;

}  // namespace

TEST_CASE("two_springs vertical block has the rank-one outer structure") {
  const auto entry = genfam::instantiate(CatalogId::two_springs);
  const Eigen::VectorXd q = vec({0.5, 0.0});
  const Eigen::VectorXd l = vec({1.5, 0.0});
  const HessianReport rep = genfam::family_hessian(entry.family, q, l);

  // M = [-P | P] with P = d d^T for the unit separation d = (1, 0).
  Eigen::MatrixXd p2 = Eigen::MatrixXd::Zero(2, 2);
  p2(0, 0) = 1.0;
  Eigen::MatrixXd expected(2, 4);
  expected << -p2, p2;
  CHECK((rep.vertical - expected).norm() < 1e-9);
  CHECK(rep.rank == 1);
  CHECK(rep.kernel_dim == 1);

  // Cross-check the full Hessian against central finite differences.
  auto value = [&](const Eigen::VectorXd& x) {
    return entry.family.energy().value(x);
  };
  const Eigen::MatrixXd fd =
      oracle::fd_hessian_matrix(value, entry.family.join(q, l));
  CHECK((rep.full - fd).norm() / std::max(1.0, fd.norm()) < 1e-6);
}

TEST_CASE("rod_spring vertical block is nonzero of full rank") {
  const auto entry = genfam::instantiate(CatalogId::rod_spring);
  const HessianReport rep =
      genfam::family_hessian(entry.family, vec({2.0, 0.0}), vec({0.0}));
  CHECK(rep.vertical.rows() == 1);
  CHECK(rep.vertical.cols() == 3);
  CHECK(rep.vertical.norm() > 0.1);
  CHECK(rep.rank == 1);

  auto value = [&](const Eigen::VectorXd& x) {
    return entry.family.energy().value(x);
  };
  const Eigen::MatrixXd fd = oracle::fd_hessian_matrix(
      value, entry.family.join(vec({2.0, 0.0}), vec({0.0})));
  CHECK((rep.full - fd).norm() / std::max(1.0, fd.norm()) < 1e-6);
}

TEST_CASE("lambda_x2 family Hessian is the zero form") {
  const auto entry = genfam::instantiate(CatalogId::lambda_x2);
  for (double l0 : {-3.0, 0.0, 7.0}) {
    const HessianReport rep =
        genfam::family_hessian(entry.family, vec({0.0}), vec({l0}));
    CHECK(rep.vertical.norm() == 0.0);
    CHECK(rep.rank == 0);
    CHECK(rep.kernel_dim == 1);
  }
}

TEST_CASE("family Hessian is refused off the critical set") {
  const auto entry = genfam::instantiate(CatalogId::two_springs);
  CHECK_THROWS_AS(
      genfam::family_hessian(entry.family, vec({0.5, 0.0}), vec({2.5, 0.0})),
      genfam::not_critical_error);
}

TEST_CASE("hessian kernel dimensions and directions") {
  const auto two = genfam::instantiate(CatalogId::two_springs);
  const HessianReport rep =
      genfam::family_hessian(two.family, vec({0.5, 0.0}), vec({1.5, 0.0}));
  const auto kernel = genfam::hessian_kernel(rep, 2, 2);
  CHECK(kernel.dim() == 1);
  // Vertical direction orthogonal to the separation d = (1, 0).
  CHECK(kernel.contains(vec({0.0, 0.0, 0.0, 1.0})));

  const auto rod = genfam::instantiate(CatalogId::rod_spring);
  const auto rod_rep =
      genfam::family_hessian(rod.family, vec({2.0, 0.0}), vec({0.0}));
  CHECK(genfam::hessian_kernel(rod_rep, 2, 1).dim() == 0);

  const auto lx2 = genfam::instantiate(CatalogId::lambda_x2);
  const auto lx2_rep =
      genfam::family_hessian(lx2.family, vec({0.0}), vec({4.0}));
  const auto lx2_kernel = genfam::hessian_kernel(lx2_rep, 1, 1);
  CHECK(lx2_kernel.dim() == 1);
  CHECK(lx2_kernel.contains(vec({0.0, 1.0})));
}

TEST_CASE("rank plus kernel dimension equals the fiber dimension") {
  std::mt19937_64 rng(53);
  for (CatalogId id :
       {CatalogId::rod_spring, CatalogId::two_springs, CatalogId::lambda_x2}) {
    const auto entry = genfam::instantiate(id);
    const int k = entry.family.fiber_dim();
    for (int trial = 0; trial < 6; ++trial) {
      Eigen::VectorXd q;
      std::vector<genfam::CriticalPoint> pts;
      if (id == CatalogId::lambda_x2) {
        genfam::CriticalPoint cp;
        cp.q = vec({0.0});
        cp.lambda = vec({trial - 3.0});
        pts.push_back(cp);
      } else {
        q = oracle::random_vector(rng, 2, 0.6, 2);
        pts = genfam::multistart(entry.family, q);
      }
      for (const auto& cp : pts) {
        const auto rep = genfam::family_hessian(entry.family, cp.q, cp.lambda);
        CHECK(rep.rank + rep.kernel_dim == k);
        CHECK(genfam::hessian_kernel(rep, entry.family.base_dim(), k).dim() ==
              rep.kernel_dim);
      }
    }
  }
}

TEST_CASE("function Hessians at critical points") {
  const ExprAst sq = ExprAst::parse("q1^2", 1, 0, kNoParams);
  ExprEnergy f(sq, {});
  const Eigen::MatrixXd h = genfam::function_hessian(f, vec({0.0}));
  CHECK(h(0, 0) == 2.0);

  const ExprAst xy = ExprAst::parse("q1*q2", 2, 0, kNoParams);
  ExprEnergy g(xy, {});
  const Eigen::MatrixXd h2 = genfam::function_hessian(g, vec({0.0, 0.0}));
  CHECK(h2(0, 1) == 1.0);
  CHECK(h2(1, 0) == 1.0);
  CHECK(h2(0, 0) == 0.0);

  const ExprAst shifted =
      ExprAst::parse("(q1-1)^2 + 3*(q2+2)^2", 2, 0, kNoParams);
  ExprEnergy s(shifted, {});
  const Eigen::MatrixXd h3 = genfam::function_hessian(s, vec({1.0, -2.0}));
  auto value = [&](const Eigen::VectorXd& x) { return s.value(x); };
  const Eigen::MatrixXd fd = oracle::fd_hessian_matrix(value, vec({1.0, -2.0}));
  CHECK((h3 - Eigen::Vector2d(2.0, 6.0).asDiagonal().toDenseMatrix()).norm() <
        1e-12);
  CHECK((h3 - fd).norm() / fd.norm() < 1e-6);

  // Off a critical point the Hessian needs a matching reference function.
  CHECK_THROWS_AS(genfam::function_hessian(s, vec({0.0, 0.0})),
                  genfam::not_critical_error);
  const ExprAst lin = ExprAst::parse("-2*q1 + 12*q2", 2, 0, kNoParams);
  ExprEnergy ref(lin, {});
  const Eigen::MatrixXd rel =
      genfam::function_hessian(s, vec({0.0, 0.0}), &ref);
  CHECK((rel - Eigen::Vector2d(2.0, 6.0).asDiagonal().toDenseMatrix()).norm() <
        1e-12);
  const ExprAst wrong = ExprAst::parse("q1", 2, 0, kNoParams);
  ExprEnergy bad(wrong, {});
  CHECK_THROWS_AS(genfam::function_hessian(s, vec({0.0, 0.0}), &bad),
                  std::invalid_argument);
}

TEST_CASE("reference independence of the family Hessian") {
  // Subtracting F o eta for any F with matching differential leaves the
  // vertical block bitwise unchanged.
  std::mt19937_64 rng(59);
  for (CatalogId id :
       {CatalogId::rod_spring, CatalogId::two_springs, CatalogId::lambda_x2}) {
    const auto entry = genfam::instantiate(id);
    const int n = entry.family.base_dim();
    Eigen::VectorXd q, l;
    if (id == CatalogId::lambda_x2) {
      q = vec({0.0});
      l = vec({2.5});
    } else {
      q = oracle::random_vector(rng, n, 0.6, 1.8);
      const auto pts = genfam::multistart(entry.family, q);
      REQUIRE_FALSE(pts.empty());
      l = pts.front().lambda;
    }
    const auto rep = genfam::family_hessian(entry.family, q, l, 1e-6);
    const auto kappa = entry.family.kappa(q, l, 1e-6);
    for (int trial = 0; trial < 5; ++trial) {
      // Random smooth G plus the linear correction matching d F(q) = kappa.
      std::string src = "sin(q1)";
      for (int i = 1; i <= n; ++i)
        src += " + " + std::to_string(0.1 * ((rng() % 7) + 1)) + "*q" +
               std::to_string(i) + "^2";
      const ExprAst g_ast = ExprAst::parse(src, n, 0, kNoParams);
      ExprEnergy g_energy(g_ast, {});
      const Eigen::VectorXd g_grad = g_energy.jet(q).grad();
      const Eigen::VectorXd c = kappa.f - g_grad;
      std::string full = src;
      for (int i = 1; i <= n; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " + (%.17g)*q%d", c(i - 1), i);
        full += buf;
      }
      ExprEnergy reference(ExprAst::parse(full, n, 0, kNoParams), {});
      const Eigen::MatrixXd block =
          genfam::relative_vertical_block(entry.family, reference, q, l);
      CHECK(block == rep.vertical);
    }
  }
}

TEST_CASE("classification requires samples") {
  const auto entry = genfam::instantiate(CatalogId::two_springs);
  CHECK_THROWS_AS(genfam::classify_family(entry.family, {}),
                  std::invalid_argument);
}
