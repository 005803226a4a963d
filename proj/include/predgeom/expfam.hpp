#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "predgeom/rng.hpp"

namespace predgeom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy: parameter-domain violations, iterative-solver failures,
// data degeneracies (e.g. a zero resultant for the circle model), and
// rank-deficient geometry.
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degeneracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct geometry_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NaturalParam {
  Vec theta;
};

struct ExpectationParam {
  Vec eta;
};

// A full m-dimensional exponential family p(x;theta) = s(x) exp(theta.t(x)
// - psi(theta)).  Everything is a plain callable so concrete families are
// just factory functions; instances are immutable and safe to share.
struct ExponentialFamily {
  int m = 0;           // parameter dimension
  int sample_dim = 0;  // dimension of sample-space points x

  std::function<double(const Vec&)> psi;
  std::function<Vec(const Vec&)> grad_psi;
  std::function<Mat(const Vec&)> hess_psi;
  std::function<bool(const Vec&)> theta_in_domain;
  std::function<bool(const Vec&)> eta_in_domain;
  std::function<Vec(const Vec&)> suff_stat;          // t(x)
  std::function<double(const Vec&)> log_base_measure;  // log s(x)
  std::function<Vec(const Vec&, RngStream&)> sample;

  // Optional closed-form inverse of grad_psi; empty means "use Newton".
  std::function<Vec(const Vec&)> eta_to_theta_closed;
  // Optional Newton starting point for eta_to_theta when no closed form.
  std::function<Vec(const Vec&)> newton_init;
};

struct DataSummary {
  long n = 0;
  Vec sum_t;                 // sum over samples of the sufficient statistic
  std::vector<Vec> samples;  // optional raw samples

  Vec mean_t() const { return sum_t / static_cast<double>(n); }
};

// A d-dimensional curved submodel omega -> theta(omega) of a full family.
struct CurvedModel {
  int d = 0;
  std::function<Vec(const Vec&)> embed;
  std::function<bool(const Vec&)> omega_in_domain;
  // Data-driven starting point for the likelihood ascent; throws
  // degeneracy_error when the data admit no well-defined start.
  std::function<Vec(const ExponentialFamily&, const DataSummary&)> mle_init;
};

ExpectationParam theta_to_eta(const ExponentialFamily& fam,
                              const NaturalParam& th);

// Inverse of theta_to_eta: closed form when the family provides one,
// otherwise damped Newton (step halving, <=100 iterations, relative
// residual 1e-10).
NaturalParam eta_to_theta(const ExponentialFamily& fam,
                          const ExpectationParam& e);

double log_density(const ExponentialFamily& fam, const NaturalParam& th,
                   const Vec& x);

// KL divergence inside the full family, in Bregman form:
//   D(theta || theta_hat) = (theta - theta_hat).eta(theta)
//                           - psi(theta) + psi(theta_hat).
double kl_divergence(const ExponentialFamily& fam, const NaturalParam& th_true,
                     const NaturalParam& th_hat);

struct AvgLogLik {
  double value = 0.0;
  bool base_measure_included = false;
};

// (1/n) sum_t log p(x_t; theta(omega)).  The base-measure term is constant
// in omega; it is added only when requested and raw samples are available,
// and the flag in the result records whether it was.
AvgLogLik avg_log_likelihood(const ExponentialFamily& fam,
                             const CurvedModel& model, const DataSummary& data,
                             const Vec& omega,
                             bool include_base_measure = false);

// Maximum-likelihood omega by damped Newton ascent from model.mle_init;
// converged when the likelihood gradient norm is <= 1e-10.
Vec mle(const ExponentialFamily& fam, const CurvedModel& model,
        const DataSummary& data);

// ---------------------------------------------------------------- families

// N(mu, sigma2 * I_dim) with known sigma2: theta = mu/sigma2, eta = mu.
ExponentialFamily isotropic_gaussian_family(int dim, double sigma2 = 1.0);

// Zero-mean l-variate Gaussian with eta = the components of Sigma.
//
// Packing convention: symmetric matrices are half-vectorized row-major over
// the upper triangle, (0,0),(0,1),...,(0,l-1),(1,1),...,(l-1,l-1), with
// off-diagonal entries stored unscaled.  The sufficient statistic is
// t(x)_(ii) = x_i^2 and t(x)_(ij) = x_i x_j for i<j, and theta packs
// A = Sigma^{-1} as theta_(ii) = -A_ii/2, theta_(ij) = -A_ij, so that
// theta.t(x) = -x'Ax/2 and grad_psi(theta) = vech(Sigma) exactly.
ExponentialFamily zero_mean_gaussian_family(int l);

int vech_dim(int l);
int vech_index(int l, int i, int j);
Vec vech_of(const Mat& m);
Mat mat_of_vech(int l, const Vec& v);

// Curved models used throughout: the unit circle in the plane family and a
// tangent chart of the spiked covariance model (declared where they live,
// circle.hpp / spiked.hpp).

}  // namespace predgeom
