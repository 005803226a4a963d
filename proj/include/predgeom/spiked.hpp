#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "predgeom/expfam.hpp"
#include "predgeom/rng.hpp"

namespace predgeom {

// Zero-mean Gaussian with a single planted spike: Sigma = lambda u u' + I_l,
// eigenvalues {lambda+1, 1, ..., 1}.
struct SpikedParam {
  double lambda = 1.0;
  Vec u;  // unit direction
};

Mat covariance(const SpikedParam& p);

// lambda ~ half-Cauchy(cauchy_scale), u ~ uniform on the sphere.  Both are
// proper, so the posterior and its mean are always well defined.
struct SpikedPrior {
  double cauchy_scale = 1.0;
};

// Cached sufficient statistics: S = sum_t x_t x_t' and its trace.  All
// posterior evaluations run off these, never the raw samples.
struct SpikedSuffStats {
  long n = 0;
  Mat s;
  double tr_s = 0.0;
};

SpikedSuffStats make_suff_stats(const std::vector<Vec>& samples);

// Unnormalized log posterior via the rank-one identities
//   Sigma^{-1} = I - (lambda/(1+lambda)) u u',  log det Sigma = log(1+lambda):
//   -(n l/2) log 2pi - (n/2) log(1+lambda)
//   - (tr S - (lambda/(1+lambda)) u'S u)/2 + log prior(lambda).
double log_posterior(const SpikedPrior& prior, const SpikedSuffStats& stats,
                     const SpikedParam& p);

struct McmcConfig {
  long n_draws = 1000;
  long burn_in = 250;
  double log_lambda_scale = 0.15;  // random-walk step on log lambda
  double u_scale_factor = 0.3;     // direction step is this / sqrt(l)
  uint64_t seed = 0;
  uint64_t stream_id = 0;  // RNG stream within the master seed
};

struct PosteriorDraws {
  std::vector<SpikedParam> draws;  // post-burn-in states only
  long burn_in = 0;
  double accept_rate_lambda = 0.0;  // measured after burn-in
  double accept_rate_u = 0.0;
  uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Metropolis-within-Gibbs: block 1 is a Gaussian random walk on log lambda
// (acceptance ratio includes the lambda'/lambda change-of-variables factor),
// block 2 proposes u' = normalize(u + s z) with z standard normal in the
// orthogonal complement of u — an angle-symmetric proposal, so the plain
// ratio applies.  The chain starts from the top eigenpair of S.
PosteriorDraws sample_posterior(const SpikedPrior& prior,
                                const SpikedSuffStats& stats,
                                const McmcConfig& config);

// Posterior mean of Sigma over the retained draws; symmetric with all
// eigenvalues >= 1 (convex combination of matrices >= I).
Mat posterior_mean_sigma(const PosteriorDraws& draws);

struct BayesEstimate {
  SpikedParam param;  // lambda = posterior mean; u = top eigenvector of
                      // posterior_mean_sigma, largest-magnitude entry positive
  bool degeneracy_warning = false;  // top eigengap too small to resolve
};

BayesEstimate bayes_estimator(const PosteriorDraws& draws);

// (1/2)(tr(Sigma1^{-1} Sigma0) - l + log det Sigma1 - log det Sigma0).
// Throws domain_error unless both matrices are symmetric positive definite.
double gaussian_kl_zero_mean(const Mat& sigma0, const Mat& sigma1);

// log N(y; 0, Sigma(p)) through the rank-one identities.
double spiked_log_density(const SpikedParam& p, const Vec& y);

// log of the draw-averaged density (1/J) sum_j N(y; 0, Sigma_j), stabilized
// by running max-subtraction; each component uses the rank-one identities.
double mixture_log_density(const std::vector<SpikedParam>& draws,
                           const Vec& y);

enum class SpikedPredictiveKind { BayesPlugin, ExtendedPlugin, Mixture };

struct SpikedPredictive {
  SpikedPredictiveKind kind = SpikedPredictiveKind::BayesPlugin;
  Mat sigma;                       // plugin kinds: N(0, sigma)
  std::vector<SpikedParam> draws;  // mixture only
};

// KL from N(0, Sigma(truth)) to the predictive: exact for the plugin kinds,
// Monte Carlo E_y[log p_true - mixture_log_density] over the given y draws
// for the mixture (callers share y_samples across predictives).
double kl_risk_terms(const SpikedParam& truth, const SpikedPredictive& pred,
                     const std::vector<Vec>& y_samples);

// One draw from N(0, Sigma(p)) without forming Sigma:
// x = z + (sqrt(1+lambda) - 1)(u'z) u for z standard normal.
Vec sample_spiked(RngStream& s, const SpikedParam& p);

struct PowerIterationResult {
  Vec v;
  double value = 0.0;       // Rayleigh quotient at the returned vector
  bool degenerate = false;  // no convergence in 10^4 iterations + restart
  long iterations = 0;
};

// Top eigenvector of a symmetric PSD matrix by power iteration, tolerance
// 1e-12.  Deterministic start with support on every axis (components
// 1/sqrt(i+1)), plus a single all-ones restart on stall: a coordinate start
// can coincide with a non-top eigenvector and converge to it instantly.
PowerIterationResult top_eigenvector_power(const Mat& m);

// Tangent chart of the spiked model inside zero_mean_gaussian_family(l):
// omega = (lambda, v) with u(v) = normalize(u0 + V v), V an orthonormal
// basis of the complement of the anchor u0.  Full-rank wherever the target
// direction is not orthogonal to u0; used for likelihood and geometry work.
CurvedModel spiked_curved_model(int l, const Vec& anchor_u0);

}  // namespace predgeom
