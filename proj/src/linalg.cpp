#include "mib/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "mib/parallel.hpp"

namespace mib {

std::vector<double> cholesky_solve(std::vector<double>& a, size_t n,
                                   std::vector<double> b) {
  // A = L L', lower triangle stored in place.
  for (size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0))
      throw std::runtime_error("matrix is not positive definite in Cholesky solve");
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  // L z = b
  for (size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  // L' x = z
  for (size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
    b[ii] = s / a[ii * n + ii];
  }
  return b;
}

RidgeSolution ridge_normal_solve(const std::vector<double>& a, size_t n, size_t p,
                                 const std::vector<double>& y, double eps) {
  // Gram matrix entries are independent, so they parallelize cleanly; each
  // entry's inner sum runs in a fixed serial order for reproducibility.
  std::vector<double> gram(p * p, 0.0);
  par_for(p * p, [&](size_t idx) {
    const size_t r = idx / p;
    const size_t c = idx % p;
    if (c < r) return;  // fill upper triangle, mirror below
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i * p + r] * a[i * p + c];
    gram[r * p + c] = s;
  });
  for (size_t r = 0; r < p; ++r)
    for (size_t c = 0; c < r; ++c) gram[r * p + c] = gram[c * p + r];
  for (size_t j = 0; j < p; ++j) gram[j * p + j] += eps;

  std::vector<double> aty(p, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < p; ++j) aty[j] += a[i * p + j] * y[i];

  std::vector<double> gram_copy = gram;
  RidgeSolution sol;
  sol.w = cholesky_solve(gram_copy, p, aty);

  double res2 = 0.0, rhs2 = 0.0;
  for (size_t r = 0; r < p; ++r) {
    double s = -aty[r];
    for (size_t c = 0; c < p; ++c) s += gram[r * p + c] * sol.w[c];
    res2 += s * s;
    rhs2 += aty[r] * aty[r];
  }
  sol.normal_residual = std::sqrt(res2) / std::max(std::sqrt(rhs2), 1.0);
  return sol;
}

LinearModel fit_linear(const std::vector<double>& x, size_t n, size_t p,
                       const std::vector<double>& y, double eps) {
  std::vector<double> aug(n * (p + 1));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < p; ++j) aug[i * (p + 1) + j] = x[i * p + j];
    aug[i * (p + 1) + p] = 1.0;
  }
  RidgeSolution sol = ridge_normal_solve(aug, n, p + 1, y, eps);
  LinearModel m;
  m.weights.assign(sol.w.begin(), sol.w.begin() + p);
  m.intercept = sol.w[p];
  m.normal_residual = sol.normal_residual;
  return m;
}

double predict_linear(const LinearModel& m, const double* row) {
  double s = m.intercept;
  for (size_t j = 0; j < m.weights.size(); ++j) s += m.weights[j] * row[j];
  return s;
}

}  // namespace mib
