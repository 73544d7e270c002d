#pragma once

// Test-only oracles, independent of the implementation paths they check:
// central finite differences for derivatives, Richardson-extrapolated cross
// derivatives for two-parameter maps, and a hand-rolled row-reduction rank.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

inline double fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, int i,
                          double h = 1e-5) {
  Eigen::VectorXd xp = x, xm = x;
  xp(i) += h;
  xm(i) -= h;
  return (f(xp) - f(xm)) / (2 * h);
}

inline double fd_hessian(const ScalarFn& f, const Eigen::VectorXd& x, int i,
                         int j, double h = 1e-5) {
  if (i == j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    return (f(xp) - 2 * f(x) + f(xm)) / (h * h);
  }
  Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
  xpp(i) += h; xpp(j) += h;
  xpm(i) += h; xpm(j) -= h;
  xmp(i) -= h; xmp(j) += h;
  xmm(i) -= h; xmm(j) -= h;
  return (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h * h);
}

inline Eigen::MatrixXd fd_hessian_matrix(const ScalarFn& f,
                                         const Eigen::VectorXd& x,
                                         double h = 1e-5) {
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd hess(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) hess(i, j) = fd_hessian(f, x, i, j, h);
  return hess;
}

// D^(1,1)(f o theta)(0,0) for a two-parameter map theta, by the four-point
// cross difference with one Richardson step (error O(h^4) + roundoff).
inline double cross_derivative(const std::function<double(double, double)>& g,
                               double h = 1e-3) {
  auto cross = [&](double step) {
    return (g(step, step) - g(step, -step) - g(-step, step) + g(-step, -step)) /
           (4 * step * step);
  };
  const double coarse = cross(h), fine = cross(h / 2);
  return (4 * fine - coarse) / 3;
}

// Row-reduction rank with partial pivoting; independent of the SVD path.
inline int rref_rank(Eigen::MatrixXd m, double tol = 1e-10) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = rank;
    for (int r = rank + 1; r < rows; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) <= tol * scale) continue;
    m.row(pivot).swap(m.row(rank));
    for (int r = 0; r < rows; ++r) {
      if (r == rank) continue;
      m.row(r) -= (m(r, col) / m(rank, col)) * m.row(rank);
    }
    ++rank;
  }
  return rank;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int d, double lo,
                                     double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace oracle
