#include "ragattr/regress.hpp"

#include <cmath>
#include <string>

#include "ragattr/errors.hpp"

namespace ragattr {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kConditionWarn = 1e10;

struct Standardized {
  Eigen::MatrixXd z;       // centered (and possibly scaled) columns
  Eigen::VectorXd yc;      // centered targets
  Eigen::VectorXd omega;   // normalized weights, sum 1
  Eigen::RowVectorXd x_mean;
  Eigen::VectorXd scale;   // 0 for constant columns
  double y_mean = 0.0;
};

Standardized center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, bool subtract,
                    bool scale) {
  Standardized s;
  s.omega = w / w.sum();
  s.x_mean = subtract ? Eigen::RowVectorXd(s.omega.transpose() * x) : Eigen::RowVectorXd::Zero(x.cols());
  s.y_mean = subtract ? s.omega.dot(y) : 0.0;
  s.z = x.rowwise() - s.x_mean;
  s.yc = y.array() - s.y_mean;
  s.scale = Eigen::VectorXd::Ones(x.cols());
  if (scale) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double var = s.omega.dot(s.z.col(j).cwiseAbs2());
      s.scale(j) = var > 1e-24 ? std::sqrt(var) : 0.0;
      if (s.scale(j) > 0) {
        s.z.col(j) /= s.scale(j);
      } else {
        s.z.col(j).setZero();
      }
    }
  }
  return s;
}

// Columns that are (numerically) in the span of earlier columns under the
// weighted inner product.
std::vector<std::size_t> dependent_columns(const Eigen::MatrixXd& z, const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  std::vector<Eigen::VectorXd> basis;
  std::vector<std::size_t> out;
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) max_norm = std::max(max_norm, (sw.asDiagonal() * z.col(j)).norm());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    Eigen::VectorXd v = sw.asDiagonal() * z.col(j);
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= q.dot(v) * q;
    }
    const double left = v.norm();
    if (left <= kRankTol * std::max(original, max_norm) || left == 0.0) {
      out.push_back(static_cast<std::size_t>(j));
    } else {
      basis.push_back(v / left);
    }
  }
  return out;
}

std::string list_columns(const std::vector<std::size_t>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + std::to_string(cols[i]);
  return s;
}

// General (not necessarily binary) weighted least squares.
LinearFit wls_general(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                      bool fit_intercept) {
  const Standardized s = center(x, y, w, fit_intercept, false);
  LinearFit fit;
  if (x.cols() == 0) {
    fit.coef = Eigen::VectorXd(0);
    fit.intercept = s.y_mean;
    return fit;
  }
  if (auto dep = dependent_columns(s.z, w); !dep.empty()) {
    throw SingularSystemError("design is rank deficient; dependent columns: " + list_columns(dep), dep);
  }
  const Eigen::MatrixXd a = s.z.transpose() * w.asDiagonal() * s.z;
  const Eigen::VectorXd b = s.z.transpose() * (w.asDiagonal() * s.yc);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  fit.condition_number = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  fit.ill_conditioned = fit.condition_number > kConditionWarn;

  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("normal matrix is not positive definite", {});
  }
  fit.coef = llt.solve(b);
  fit.coef += llt.solve(b - a * fit.coef);
  fit.intercept = fit_intercept ? s.y_mean - s.x_mean.dot(fit.coef) : 0.0;
  return fit;
}

LinearFit min_norm_general(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                           bool fit_intercept) {
  const Standardized s = center(x, y, w, fit_intercept, false);
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * s.z;
  const Eigen::VectorXd b = sw.asDiagonal() * s.yc;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(kRankTol);
  LinearFit fit;
  fit.coef = cod.solve(b);
  fit.intercept = fit_intercept ? s.y_mean - s.x_mean.dot(fit.coef) : 0.0;
  fit.rank_deficient = cod.rank() < a.cols();
  fit.condition_number = std::numeric_limits<double>::infinity();
  fit.ill_conditioned = true;
  return fit;
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace

void DesignMatrix::validate() const {
  if (x.rows() < 1) throw ConfigError("design matrix has no rows");
  if (y.size() != x.rows() || w.size() != x.rows()) throw ConfigError("design matrix dimensions disagree");
  if ((w.array() <= 0).any() || !w.allFinite()) throw ConfigError("design weights must be positive");
  if (!y.allFinite()) throw ConfigError("design targets must be finite");
  if (((x.array() != 0.0) && (x.array() != 1.0)).any()) throw ConfigError("design entries must be 0 or 1");
}

DesignMatrix DesignMatrix::from_masks(std::span<const CoalitionMask> masks, std::span<const double> targets,
                                      std::span<const double> weights, bool fit_intercept) {
  if (masks.empty()) throw ConfigError("design matrix has no rows");
  if (targets.size() != masks.size() || (!weights.empty() && weights.size() != masks.size())) {
    throw ConfigError("design matrix dimensions disagree");
  }
  const int n = masks.front().n();
  DesignMatrix d;
  d.fit_intercept = fit_intercept;
  d.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(masks.size()), n);
  d.y.resize(d.x.rows());
  d.w = Eigen::VectorXd::Ones(d.x.rows());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int j : masks[i].members()) d.x(r, j) = 1.0;
    d.y(r) = targets[i];
    if (!weights.empty()) d.w(r) = weights[i];
  }
  d.validate();
  return d;
}

LinearFit solve_wls(const DesignMatrix& design) {
  design.validate();
  return wls_general(design.x, design.y, design.w, design.fit_intercept);
}

LinearFit solve_constrained_wls(const DesignMatrix& design, double constraint_total, bool min_norm_fallback) {
  design.validate();
  const Eigen::Index n = design.cols();
  if (n == 0) throw ConfigError("design matrix has no columns");
  const Eigen::Index last = n - 1;

  // beta_last = total - sum(rest):  y - total * x_last = sum_j beta_j (x_j - x_last)
  const Eigen::MatrixXd reduced = design.x.leftCols(last).colwise() - design.x.col(last);
  const Eigen::VectorXd target = design.y - constraint_total * design.x.col(last);

  LinearFit inner;
  try {
    inner = wls_general(reduced, target, design.w, design.fit_intercept);
  } catch (const SingularSystemError&) {
    if (!min_norm_fallback) throw;
    inner = min_norm_general(reduced, target, design.w, design.fit_intercept);
  }
  LinearFit fit = inner;
  fit.coef.resize(n);
  fit.coef.head(last) = inner.coef;
  fit.coef(last) = constraint_total - inner.coef.sum();
  return fit;
}

double lasso_lambda_max(const DesignMatrix& design) {
  design.validate();
  const Standardized s = center(design.x, design.y, design.w, true, true);
  return (s.z.transpose() * s.omega.asDiagonal() * s.yc).cwiseAbs().maxCoeff();
}

LassoFit solve_lasso(const DesignMatrix& design, double lambda, int max_iter, double tol) {
  design.validate();
  if (!(lambda >= 0)) throw ConfigError("lasso lambda must be >= 0");
  const Standardized s = center(design.x, design.y, design.w, true, true);
  const Eigen::Index p = design.cols();

  LassoFit fit;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = s.yc;
  auto objective = [&] { return 0.5 * s.omega.dot(residual.cwiseAbs2()) + lambda * beta.lpNorm<1>(); };

  for (fit.iterations = 0; fit.iterations < max_iter;) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (s.scale(j) == 0.0) continue;
      const double rho = s.omega.dot(s.z.col(j).cwiseProduct(residual)) + beta(j);
      const double updated = soft_threshold(rho, lambda);
      const double change = updated - beta(j);
      if (change != 0.0) {
        residual -= change * s.z.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    ++fit.iterations;
    fit.objective.push_back(objective());
    if (max_change < tol) {
      fit.converged = true;
      break;
    }
  }

  fit.standardized = beta;
  fit.coef = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (s.scale(j) > 0) fit.coef(j) = beta(j) / s.scale(j);
  }
  fit.intercept = s.y_mean - s.x_mean.dot(fit.coef);
  return fit;
}

KktCheck lasso_kkt(const DesignMatrix& design, const LassoFit& fit, double lambda) {
  const Standardized s = center(design.x, design.y, design.w, true, true);
  const Eigen::VectorXd residual = s.yc - s.z * fit.standardized;
  KktCheck out;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    if (s.scale(j) == 0.0) continue;
    const double grad = -s.omega.dot(s.z.col(j).cwiseProduct(residual));
    const double b = fit.standardized(j);
    if (b == 0.0) {
      const double ratio = lambda > 0 ? std::abs(grad) / lambda : (std::abs(grad) <= 1e-12 ? 0.0 : HUGE_VAL);
      out.worst_inactive_ratio = std::max(out.worst_inactive_ratio, ratio);
    } else {
      out.worst_active_gap = std::max(out.worst_active_gap, std::abs(grad + (b > 0 ? lambda : -lambda)));
    }
  }
  return out;
}

}  // namespace ragattr
