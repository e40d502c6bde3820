#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ragattr/coalition.hpp"

namespace ragattr {

// Binary membership design: row i is the indicator vector of a coalition.
struct DesignMatrix {
  Eigen::MatrixXd x;  // m x n, entries in {0, 1}
  Eigen::VectorXd y;  // m
  Eigen::VectorXd w;  // m, all > 0
  bool fit_intercept = true;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }

  // Throws ConfigError on shape mismatch, non-binary entries, non-positive
  // weights or an empty design.
  void validate() const;

  static DesignMatrix from_masks(std::span<const CoalitionMask> masks, std::span<const double> targets,
                                 std::span<const double> weights = {}, bool fit_intercept = true);
};

struct LinearFit {
  Eigen::VectorXd coef;
  double intercept = 0.0;
  double condition_number = 1.0;  // of the normal matrix
  bool ill_conditioned = false;   // condition number above 1e10
  bool rank_deficient = false;    // only set by the minimum-norm fallback
};

// Weighted least squares via the normal equations and a Cholesky factor,
// with one round of iterative refinement. Throws SingularSystemError naming
// the columns that are linear combinations of earlier ones (after centering
// when an intercept is fitted).
LinearFit solve_wls(const DesignMatrix& design);

// As solve_wls, subject to sum(coef) == constraint_total. The last
// coefficient is eliminated and recovered from the constraint. With
// min_norm_fallback, a rank-deficient reduced system is solved for the
// minimum-norm solution instead of throwing.
LinearFit solve_constrained_wls(const DesignMatrix& design, double constraint_total, bool min_norm_fallback = false);

struct LassoFit {
  Eigen::VectorXd coef;            // original scale
  double intercept = 0.0;          // original scale
  Eigen::VectorXd standardized;    // coefficients on standardized columns
  int iterations = 0;              // full coordinate sweeps
  bool converged = false;
  std::vector<double> objective;   // after each sweep, standardized problem
};

// Cyclic coordinate descent with soft-thresholding on weighted-standardized
// columns. Minimizes
//   (1/2) sum_i w~_i (y_i - b0 - z_i' b)^2 + lambda * |b|_1,  w~ = w / sum(w)
// where z are the columns centered and scaled to unit weighted variance.
// Constant columns get a zero coefficient. Converged once the largest
// coefficient change in a sweep drops below tol. An intercept is always fitted.
LassoFit solve_lasso(const DesignMatrix& design, double lambda, int max_iter = 10000, double tol = 1e-8);

// Smallest lambda at which every lasso coefficient is zero.
double lasso_lambda_max(const DesignMatrix& design);

// Lasso optimality conditions on the standardized scale, with g_j the
// gradient of the smooth part:
//   zero coefficient:    |g_j| <= lambda (1 + tol)
//   nonzero coefficient: |g_j + sign(b_j) lambda| <= tol
struct KktCheck {
  double worst_inactive_ratio = 0.0;  // max |g_j| / lambda over zero coefficients
  double worst_active_gap = 0.0;      // max |g_j + sign(b_j) lambda| over nonzero ones
  bool holds(double tol = 1e-6) const { return worst_inactive_ratio <= 1 + tol && worst_active_gap <= tol; }
};
KktCheck lasso_kkt(const DesignMatrix& design, const LassoFit& fit, double lambda);

}  // namespace ragattr
