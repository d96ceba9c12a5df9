#pragma once

#include <cstddef>
#include <vector>

namespace mib {

/// In-place Cholesky solve of the symmetric positive-definite system
/// A x = b. A is n*n row-major and is overwritten with its factor.
std::vector<double> cholesky_solve(std::vector<double>& a, size_t n,
                                   std::vector<double> b);

struct RidgeSolution {
  std::vector<double> w;
  // ||A'A w + eps w - A'y|| / max(||A'y||, 1), a direct check that the
  // normal equations were actually solved.
  double normal_residual = 0.0;
};

/// Minimizes ||A w - y||^2 + eps ||w||^2 via the normal equations.
/// A is n*p row-major.
RidgeSolution ridge_normal_solve(const std::vector<double>& a, size_t n, size_t p,
                                 const std::vector<double>& y, double eps);

struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double normal_residual = 0.0;
};

/// Ridge regression with an intercept term. The intercept is treated as an
/// ordinary coefficient on a constant feature, so eps shrinks it too.
LinearModel fit_linear(const std::vector<double>& x, size_t n, size_t p,
                       const std::vector<double>& y, double eps);

double predict_linear(const LinearModel& m, const double* row);

}  // namespace mib
