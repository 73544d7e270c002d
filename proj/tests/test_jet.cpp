#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "genfam/jet.hpp"
#include "oracles.hpp"

using genfam::Jet2;
using Catch::Approx;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// A pile of composed primitives kept away from domain boundaries.
Jet2 composed(const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  std::vector<Jet2> v;
  for (int i = 0; i < d; ++i) v.push_back(Jet2::variable(d, i, x(i)));
  Jet2 s = genfam::sin(v[0] * 1.3) * genfam::cos(v[1 % d]) +
           genfam::exp(v[0] * 0.3 - v[1 % d] * 0.2);
  Jet2 r = genfam::sqrt(v[0] * v[0] + v[1 % d] * v[1 % d] + 2.5);
  Jet2 q = genfam::log(r + 3.0) / (v[0] * v[0] + 4.0);
  return s * q + genfam::pow_int(v[1 % d] - 0.5, 3) / r;
}

double composed_value(const Eigen::VectorXd& x) {
  const double a = x(0), b = x(1 % x.size());
  const double s = std::sin(a * 1.3) * std::cos(b) + std::exp(a * 0.3 - b * 0.2);
  const double r = std::sqrt(a * a + b * b + 2.5);
  const double q = std::log(r + 3.0) / (a * a + 4.0);
  return s * q + std::pow(b - 0.5, 3) / r;
}

}  // namespace

TEST_CASE("product jet at a point") {
  // f = x*y at (2,3): value 6, grad (3,2), hess [[0,1],[1,0]]
  const Jet2 x = Jet2::variable(2, 0, 2.0);
  const Jet2 y = Jet2::variable(2, 1, 3.0);
  const Jet2 f = x * y;
  CHECK(f.value() == 6.0);
  CHECK(f.grad()(0) == 3.0);
  CHECK(f.grad()(1) == 2.0);
  CHECK(f.hess()(0, 0) == 0.0);
  CHECK(f.hess()(0, 1) == 1.0);
  CHECK(f.hess()(1, 0) == 1.0);
  CHECK(f.hess()(1, 1) == 0.0);
}

TEST_CASE("family polynomial jet") {
  // f = l*x^2 at (x,l)=(1,2): value 2, grad (4,1), hess [[4,2],[2,0]]
  const Jet2 x = Jet2::variable(2, 0, 1.0);
  const Jet2 l = Jet2::variable(2, 1, 2.0);
  const Jet2 f = l * genfam::pow_int(x, 2);
  CHECK(f.value() == 2.0);
  CHECK(f.grad()(0) == 4.0);
  CHECK(f.grad()(1) == 1.0);
  CHECK(f.hess()(0, 0) == 4.0);
  CHECK(f.hess()(0, 1) == 2.0);
  CHECK(f.hess()(1, 0) == 2.0);
  CHECK(f.hess()(1, 1) == 0.0);
}

TEST_CASE("euclidean norm jet matches the closed form and finite differences") {
  // f = sqrt(x^2+y^2) at (3,4): value 5, grad (0.6,0.8),
  // hess = (I - g g^T)/5 with g = (0.6, 0.8).
  Eigen::VectorXd p(2);
  p << 3.0, 4.0;
  auto eval = [](const Eigen::VectorXd& x) {
    return std::sqrt(x(0) * x(0) + x(1) * x(1));
  };
  const Jet2 x = Jet2::variable(2, 0, 3.0);
  const Jet2 y = Jet2::variable(2, 1, 4.0);
  const Jet2 f = genfam::sqrt(x * x + y * y);

  CHECK(f.value() == Approx(5.0).epsilon(1e-14));
  CHECK(f.grad()(0) == Approx(0.6).epsilon(1e-14));
  CHECK(f.grad()(1) == Approx(0.8).epsilon(1e-14));
  Eigen::Vector2d g(0.6, 0.8);
  const Eigen::Matrix2d expected =
      (Eigen::Matrix2d::Identity() - g * g.transpose()) / 5.0;
  CHECK((f.hess() - expected).norm() < 1e-13);

  CHECK(std::abs(oracle::fd_gradient(eval, p, 0) - 0.6) < 1e-6);
  CHECK(std::abs(oracle::fd_gradient(eval, p, 1) - 0.8) < 1e-6);
  // Second differences at step 1e-5 carry a roundoff floor of
  // eps*|f|/h^2 ~ 1e-5; compare at that scale.
  const Eigen::MatrixXd fd = oracle::fd_hessian_matrix(eval, p);
  CHECK((f.hess() - fd).norm() < 5e-5);
}

TEST_CASE("mixed second derivative") {
  const Jet2 x = Jet2::variable(2, 0, 0.0);
  const Jet2 y = Jet2::variable(2, 1, 0.0);
  const Jet2 f = x * y;
  Eigen::VectorXd u(2), v(2);
  u << 1, 0;
  v << 0, 1;
  CHECK(genfam::mixed_second(f, u, v) == 1.0);
  CHECK(genfam::mixed_second(f, Eigen::VectorXd::Zero(2), v) == 0.0);

  // lambda x^2 at (0, 5): vertical against horizontal vanishes.
  const Jet2 a = Jet2::variable(2, 0, 0.0);
  const Jet2 l = Jet2::variable(2, 1, 5.0);
  const Jet2 g = l * a * a;
  Eigen::VectorXd vert(2), horiz(2);
  vert << 0, 1;
  horiz << 1, 0;
  CHECK(genfam::mixed_second(g, vert, horiz) == 0.0);
}

TEST_CASE("jets agree with central finite differences on composed expressions") {
  // The suite keeps expression values small against their curvature so the
  // second-difference roundoff floor eps*|f|/h^2 stays below the stated
  // 1e-6 relative tolerance at step 1e-5.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(0.6, 1.4);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd a = oracle::random_vector(rng, 2, -1.5, 1.5);
    const double c1 = coef(rng), c2 = coef(rng), c3 = coef(rng);
    auto value = [&](const Eigen::VectorXd& p) {
      const double u = p(0) - a(0), v = p(1) - a(1);
      return 2.0 * c1 * u * v + std::cos(3.5 * c2 * u) +
             std::log(1.0 + v * v) + std::sqrt(0.09 + u * u) * 0.5 +
             0.25 * std::exp(2.0 * c3 * v - u) + u * u * u +
             std::sin(2.8 * v) * 0.5;
    };
    auto jet_of = [&](const Eigen::VectorXd& p) {
      const Jet2 u = Jet2::variable(2, 0, p(0)) - a(0);
      const Jet2 v = Jet2::variable(2, 1, p(1)) - a(1);
      return 2.0 * c1 * u * v + genfam::cos(3.5 * c2 * u) +
             genfam::log(1.0 + v * v) + genfam::sqrt(0.09 + u * u) * 0.5 +
             0.25 * genfam::exp(2.0 * c3 * v - u) + u * u * u +
             genfam::sin(2.8 * v) * 0.5;
    };
    const Jet2 jet = jet_of(a);
    CHECK(rel_err(jet.value(), value(a)) < 1e-14);
    for (int i = 0; i < 2; ++i)
      CHECK(rel_err(jet.grad()(i), oracle::fd_gradient(value, a, i)) < 1e-6);
    const Eigen::MatrixXd fd = oracle::fd_hessian_matrix(value, a);
    CHECK((jet.hess() - fd).norm() / std::max(1.0, fd.norm()) < 1e-6);
  }
}

TEST_CASE("hessian symmetry and bilinearity of the mixed second derivative") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::VectorXd x = oracle::random_vector(rng, 2, -1.2, 1.2);
    const Jet2 jet = composed(x);
    const Eigen::MatrixXd h = jet.hess();
    CHECK((h - h.transpose()).norm() <= 1e-12 * std::max(1.0, h.norm()));

    const Eigen::VectorXd u = oracle::random_vector(rng, 2, -1, 1);
    const Eigen::VectorXd v = oracle::random_vector(rng, 2, -1, 1);
    const Eigen::VectorXd w = oracle::random_vector(rng, 2, -1, 1);
    const double a = 0.7, b = -1.9;
    CHECK(genfam::mixed_second(jet, u, v) ==
          Approx(genfam::mixed_second(jet, v, u)).margin(1e-14));
    const double lhs = genfam::mixed_second(jet, a * u + b * w, v);
    const double rhs = a * genfam::mixed_second(jet, u, v) +
                       b * genfam::mixed_second(jet, w, v);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("path independence of the cross derivative") {
  // For theta(s,t) = x + s u + t v + s t w the cross derivative equals
  // u^T H v + <grad, w>; the u^T H v part is independent of the curvature w.
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd x = oracle::random_vector(rng, 2, -1.2, 1.2);
    const Eigen::VectorXd u = oracle::random_vector(rng, 2, -1, 1);
    const Eigen::VectorXd v = oracle::random_vector(rng, 2, -1, 1);
    const Eigen::VectorXd w1 = oracle::random_vector(rng, 2, -1, 1);
    const Eigen::VectorXd w2 = oracle::random_vector(rng, 2, -1, 1);
    const Jet2 jet = composed(x);

    auto through = [&](const Eigen::VectorXd& w) {
      return [&, w](double s, double t) {
        return composed_value(x + s * u + t * v + s * t * w);
      };
    };
    const double d11_1 = oracle::cross_derivative(through(w1));
    const double d11_2 = oracle::cross_derivative(through(w2));
    const double bilinear = genfam::mixed_second(jet, u, v);
    const double scale = std::max(1.0, std::abs(bilinear));
    CHECK(std::abs(d11_1 - (bilinear + jet.grad().dot(w1))) / scale < 1e-8);
    CHECK(std::abs(d11_2 - (bilinear + jet.grad().dot(w2))) / scale < 1e-8);
    // Same first-order data, different curvature: the curvature-corrected
    // values agree.
    CHECK(std::abs((d11_1 - jet.grad().dot(w1)) -
                   (d11_2 - jet.grad().dot(w2))) /
              scale <
          1e-8);
  }
}

TEST_CASE("domain errors") {
  const Jet2 x = Jet2::variable(1, 0, -1.0);
  CHECK_THROWS_AS(genfam::sqrt(x), genfam::domain_error);
  CHECK_THROWS_AS(genfam::log(x), genfam::domain_error);
  const Jet2 zero = Jet2::variable(1, 0, 0.0);
  CHECK_THROWS_AS(genfam::sqrt(zero), genfam::domain_error);
  CHECK_THROWS_AS(x / zero, genfam::domain_error);
  CHECK_THROWS_AS(genfam::pow_int(zero, -1), genfam::domain_error);
  CHECK_NOTHROW(genfam::pow_int(zero, 2));
}
