#pragma once

#include "profex/kernels.hpp"
#include "profex/trend.hpp"
#include "profex/types.hpp"

#include <cstdint>
#include <string>

namespace profex {

struct FitConfig {
  int n_starts = 10;
  double start_log_ell_lo = -4.605170185988091;  // log(1e-2)
  double start_log_ell_hi = 0.6931471805599453;  // log(2)
  double bound_log_ell_lo = -4.605170185988091;  // log(1e-2)
  double bound_log_ell_hi = 0.6931471805599453;  // log(2): twice the unit input range
  int max_iter = 60;
  std::uint64_t seed = 42;
};

// Universal-kriging emulator with cached factorizations. Immutable after
// construction; all evaluators are safe for concurrent use.
class GpModel {
 public:
  GpModel() = default;
  // Fixed hyperparameters; estimates trend coefficients by GLS and caches
  // the Cholesky factor (with escalating jitter if needed).
  GpModel(Matrix X, Vector y, KernelSpec spec, TrendBasis trend);

  Index n() const { return y_.size(); }
  Index dim() const { return X_.cols(); }

  double posterior_mean(const Vector& x) const;
  Vector posterior_mean_grad(const Vector& x) const;
  double posterior_cov(const Vector& x, const Vector& x2) const;
  double posterior_var(const Vector& x) const;  // clamped at 0

  const Matrix& design() const { return X_; }
  const Vector& observations() const { return y_; }
  const KernelSpec& kernel() const { return kernel_; }
  const TrendBasis& trend() const { return trend_; }
  const Vector& trend_coefficients() const { return chat_; }
  double jitter() const { return jitter_; }

  // Internals shared with the approximating-process machinery.
  const DesignCache& cache() const { return cache_; }
  const Matrix& trend_matrix() const { return H_; }
  const Matrix& kinv_trend() const { return KinvH_; }     // K^-1 H
  const Matrix& trend_gram_inv() const { return KHinv_; } // (H^T K^-1 H)^-1
  Vector solve_kernel(const Vector& rhs) const { return llt_.solve(rhs); }
  Matrix solve_kernel(const Matrix& rhs) const { return llt_.solve(rhs); }

 private:
  Matrix X_;
  Vector y_;
  KernelSpec kernel_;
  TrendBasis trend_;
  DesignCache cache_;
  Eigen::LLT<Matrix> llt_;
  double jitter_ = 0.0;
  Matrix H_;
  Matrix KinvH_;
  Matrix KHinv_;
  Vector chat_;
  Vector alpha_;  // K^-1 (y - H chat)
};

// Cholesky with an escalating relative jitter ladder; returns the jitter
// that succeeded (0 when none was needed).
double cholesky_with_jitter(Matrix K, double scale, Eigen::LLT<Matrix>& llt,
                            double rel_start = 1e-10, double rel_max = 1e-4);

// Concentrated negative log-likelihood (trend and variance profiled out)
// plus the profiled variance estimate for the given log-lengthscales.
struct ConcentratedLik {
  double nll;
  double variance;
};
ConcentratedLik concentrated_nll(const Matrix& X, const Vector& y, KernelFamily family,
                                 KernelStructure structure, const TrendBasis& trend,
                                 const Vector& log_ell);

// Maximum-likelihood fit: multi-start bound-constrained quasi-Newton on the
// log-lengthscales. Deterministic given cfg.seed; ties resolved by lowest
// start index.
GpModel fit_gp(const Matrix& X, const Vector& y, KernelFamily family,
               KernelStructure structure, const TrendBasis& trend, const FitConfig& cfg = {});

double q2(const GpModel& model, const Matrix& Xtest, const Vector& ytest);
double loo_q2(const GpModel& model);

void save_model(const GpModel& model, const std::string& path);
GpModel load_model(const std::string& path);

}  // namespace profex
