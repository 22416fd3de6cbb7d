#pragma once

#include "profex/gp.hpp"
#include "profex/profiles.hpp"
#include "profex/projection.hpp"
#include "profex/rng.hpp"
#include "profex/types.hpp"

#include <cstdint>
#include <vector>

namespace profex {

struct PilotSelection {
  Matrix pilots;  // selected rows, in selection order
  std::vector<Index> pool_indices;
  bool truncated = false;  // halted early: remaining pool variance ~ 0
};

// Greedy sequential maximization of the posterior variance over a candidate
// pool (pivoted-Cholesky form, so nested runs share their prefix).
PilotSelection select_pilot_points(const GpModel& model, Index count, const Matrix& pool);

// Default candidate pool: a Sobol' set, design points excluded by distance.
Matrix sobol_pool(Index count, Index d);

// Finite-dimensional approximating process: the universal-kriging
// interpolant through the data and the pilot values. Unbiased by
// construction (its mean path is the posterior mean).
class ApproxProcess {
 public:
  ApproxProcess(GpModel model, Matrix pilots);

  const GpModel& model() const { return model_; }
  const Matrix& pilots() const { return pilots_; }
  Index n_pilots() const { return pilots_.rows(); }
  Index dim() const { return model_.dim(); }

  // Interpolation weights for one vector of pilot values.
  struct Weights {
    Vector chat;  // trend coefficients of the augmented fit
    Vector beta;  // K_A^-1 (w - H_A chat)
  };
  Weights weights(const Vector& pilot_values) const;
  double eval(const Weights& w, const Vector& x) const;
  Vector grad(const Weights& w, const Vector& x) const;

  const Vector& pilot_mean() const { return pilot_mean_; }
  const Matrix& pilot_cov() const { return pilot_cov_; }
  const Matrix& pilot_cov_chol() const { return pilot_chol_; }

  // Variance of the difference process at x: K_Delta(x,x) >= 0.
  double delta_var(const Vector& x) const;
  // Covariance of the difference process (used by the validity checks).
  double delta_cov(const Vector& x, const Vector& y) const;

 private:
  Vector lambda_pilot(const Vector& x) const;  // pilot block of the weights
  Vector posterior_cross_pilots(const Vector& x) const;

  GpModel model_;
  Matrix pilots_;
  Matrix A_;  // [X; G]
  DesignCache cacheA_;
  Eigen::LLT<Matrix> lltA_;
  Matrix HA_, KinvHA_, KHinvA_;
  Vector pilot_mean_;
  Matrix pilot_cov_;   // posterior covariance of Z_G given the data
  Matrix pilot_chol_;  // lower factor (jittered)
  Matrix S_;           // K^-1 K(X, G), n x l
  Matrix lamG_;        // l x m trend residual weights of the pilots
};

struct RealizationSet {
  Matrix samples;  // s x l pilot values
  std::uint64_t seed = 0;
};

// samples = pilot mean + L eps, eps from the counter generator; sample i
// uses its own stream, so generation order and thread count do not matter.
// zero_noise forces eps = 0 (test hook).
RealizationSet simulate_realizations(const ApproxProcess& proc, Index s, std::uint64_t seed,
                                     bool zero_noise = false);

// Empirical quantile with linear interpolation of order statistics at
// 1-based position (s-1)q + 1.
double empirical_quantile(std::vector<double> values, double q);

struct EnvelopeResult {
  Vector sup_lo, sup_hi;  // beta / 1-beta quantiles of the profile sup
  Vector inf_lo, inf_hi;  // same for the profile inf
  Matrix sup_samples;     // s x g (diagnostics and oracles)
  Matrix inf_samples;
  std::vector<int> failures;  // per grid node
  std::vector<bool> flagged;  // > 5% of realizations failed
};

// Profile curves of every realization plus per-node quantile envelopes.
EnvelopeResult profile_envelope(const ApproxProcess& proc, const RealizationSet& reals,
                                const Projection& proj, const BoxDomain& box,
                                const ProfileGrid& grid, double beta,
                                const ProfileConfig& cfg = {});

// Quantile maps across realization profile maps (p = 2 lattices).
struct MapEnvelopeResult {
  Vector sup_lo, sup_hi, inf_lo, inf_hi;  // per lattice node, NaN when masked
  std::vector<int> failures;
  std::vector<bool> flagged;
};
MapEnvelopeResult map_envelope(const ApproxProcess& proc, const RealizationSet& reals,
                               const Projection& proj, const BoxDomain& box,
                               const ProfileGrid& lattice, double beta,
                               const ProfileConfig& cfg = {});

// Per-node sup of K_Delta over the 2-d fibers of a lattice.
Vector delta_var_lattice(const ApproxProcess& proc, const Projection& proj,
                         const BoxDomain& box, const ProfileGrid& lattice,
                         const ProfileConfig& cfg = {});

// sup over the fiber (or the whole box) of K_Delta(x,x), by the same
// multi-start constrained optimizer the profiles use.
double delta_var_sup(const ApproxProcess& proc, const EqualityFiber& fiber, const BoxDomain& box,
                     const ConstrainedConfig& cfg = {});
double delta_var_sup_box(const ApproxProcess& proc, const BoxDomain& box,
                         const LbfgsConfig& cfg = {}, int n_starts = 5,
                         std::uint64_t seed = 77);
// Per grid node, for p = 1 projections.
Vector delta_var_curve(const ApproxProcess& proc, const Projection& proj, const BoxDomain& box,
                       const ProfileGrid& grid, const ProfileConfig& cfg = {});

// Conservative band: u_hi = q_hi + sqrt(2 v log(2/(a-b))),
//                    u_lo = q_lo - sqrt(2 v log(2/(a-2b))), per node.
// delta_var holds (sigma^Delta_T)^2 per node. Requires a > 2b > 0.
struct BoundPair {
  Vector u_lo, u_hi;
};
BoundPair bound_envelope(const Vector& q_lo, const Vector& q_hi, const Vector& delta_var,
                         double alpha, double beta);

// Two-sided tail bound 2 exp(-(u - mu)^2 / (2 sigma^2)) clamped to [0,1];
// mu is the worst-case bias (0 for the unbiased construction), sigma the
// worst-case standard deviation of the difference process.
double borell_tis_tail(double u, double mu_delta, double sigma_delta);

// Trapezoid rule over the grid of the per-node difference variance.
double integrated_delta_variance(const Vector& delta_var, const ProfileGrid& grid);

}  // namespace profex
