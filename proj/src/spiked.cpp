#include "predgeom/spiked.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace predgeom {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

double spiked_log_density(const SpikedParam& p, const Vec& y) {
  const double ratio = p.lambda / (1.0 + p.lambda);
  const double uy = p.u.dot(y);
  return -0.5 * (y.size() * kLog2Pi + std::log1p(p.lambda) +
                 y.squaredNorm() - ratio * uy * uy);
}

Mat covariance(const SpikedParam& p) {
  const int l = static_cast<int>(p.u.size());
  return p.lambda * (p.u * p.u.transpose()) + Mat::Identity(l, l);
}

SpikedSuffStats make_suff_stats(const std::vector<Vec>& samples) {
  if (samples.empty()) throw domain_error("make_suff_stats: no samples");
  const int l = static_cast<int>(samples.front().size());
  SpikedSuffStats st;
  st.n = static_cast<long>(samples.size());
  st.s = Mat::Zero(l, l);
  for (const Vec& x : samples) st.s.noalias() += x * x.transpose();
  st.tr_s = st.s.trace();
  return st;
}

double log_posterior(const SpikedPrior& prior, const SpikedSuffStats& stats,
                     const SpikedParam& p) {
  if (!(p.lambda > 0.0))
    throw domain_error("log_posterior: lambda must be positive");
  const int l = static_cast<int>(p.u.size());
  const double ratio = p.lambda / (1.0 + p.lambda);
  const double quad = stats.tr_s - ratio * p.u.dot(stats.s * p.u);
  const double loglik = -0.5 * (stats.n * (l * kLog2Pi + std::log1p(p.lambda)) + quad);
  const double t = p.lambda / prior.cauchy_scale;
  const double logprior = std::log(2.0 / std::numbers::pi / prior.cauchy_scale) -
                          std::log1p(t * t);
  return loglik + logprior;
}

PosteriorDraws sample_posterior(const SpikedPrior& prior,
                                const SpikedSuffStats& stats,
                                const McmcConfig& config) {
  if (stats.n < 2) throw domain_error("sample_posterior: need n >= 2");
  if (config.n_draws < 1)
    throw domain_error("sample_posterior: need at least one draw");
  const int l = static_cast<int>(stats.s.rows());

  // start at the top eigenpair of S (empirical spike)
  const PowerIterationResult top = top_eigenvector_power(stats.s);
  double lam = std::max(top.value / static_cast<double>(stats.n) - 1.0, 0.1);
  Vec u = top.v;

  RngStream rng = make_stream(config.seed, config.stream_id);
  double lp = log_posterior(prior, stats, {lam, u});
  const double u_step = config.u_scale_factor / std::sqrt(static_cast<double>(l));

  PosteriorDraws out;
  out.burn_in = config.burn_in;
  out.seed = config.seed;
  out.draws.reserve(config.n_draws);
  long acc_lam = 0, acc_u = 0;

  const long total = config.burn_in + config.n_draws;
  for (long iter = 0; iter < total; ++iter) {
    // block 1: random walk on log lambda
    const double lam_new = lam * std::exp(config.log_lambda_scale * normal(rng));
    const double lp_lam = log_posterior(prior, stats, {lam_new, u});
    const double log_ratio = lp_lam - lp + std::log(lam_new) - std::log(lam);
    if (std::log(uniform01(rng)) < log_ratio) {
      lam = lam_new;
      lp = lp_lam;
      if (iter >= config.burn_in) ++acc_lam;
    }

    // block 2: angle-symmetric step on the sphere
    const Vec zeta = normal_vector(rng, l);
    const Vec z = zeta - u.dot(zeta) * u;
    const Vec u_new = (u + u_step * z).normalized();
    const double lp_u = log_posterior(prior, stats, {lam, u_new});
    if (std::log(uniform01(rng)) < lp_u - lp) {
      u = u_new;
      lp = lp_u;
      if (iter >= config.burn_in) ++acc_u;
    }

    if (iter >= config.burn_in) out.draws.push_back({lam, u});
  }

  const double denom = static_cast<double>(config.n_draws);
  out.accept_rate_lambda = acc_lam / denom;
  out.accept_rate_u = acc_u / denom;
  for (const auto& [rate, name] :
       {std::pair<double, const char*>{out.accept_rate_lambda, "lambda"},
        std::pair<double, const char*>{out.accept_rate_u, "direction"}}) {
    if (rate < 0.05 || rate > 0.8)
      out.warnings.push_back(std::string(name) + " block acceptance rate " +
                             std::to_string(rate) +
                             " outside [0.05, 0.8]; check proposal scales");
  }
  return out;
}

Mat posterior_mean_sigma(const PosteriorDraws& draws) {
  if (draws.draws.empty())
    throw domain_error("posterior_mean_sigma: no draws");
  const int l = static_cast<int>(draws.draws.front().u.size());
  Mat acc = Mat::Zero(l, l);
  for (const SpikedParam& p : draws.draws)
    acc.noalias() += p.lambda * (p.u * p.u.transpose());
  acc /= static_cast<double>(draws.draws.size());
  return acc + Mat::Identity(l, l);
}

BayesEstimate bayes_estimator(const PosteriorDraws& draws) {
  if (draws.draws.empty()) throw domain_error("bayes_estimator: no draws");
  double lam = 0.0;
  for (const SpikedParam& p : draws.draws) lam += p.lambda;
  lam /= static_cast<double>(draws.draws.size());

  const PowerIterationResult top = top_eigenvector_power(posterior_mean_sigma(draws));
  Vec u = top.v;
  int imax = 0;
  for (int i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
  if (u[imax] < 0.0) u = -u;

  return {{lam, u}, top.degenerate};
}

double gaussian_kl_zero_mean(const Mat& sigma0, const Mat& sigma1) {
  const int l = static_cast<int>(sigma0.rows());
  if (sigma0.cols() != l || sigma1.rows() != l || sigma1.cols() != l)
    throw domain_error("gaussian_kl_zero_mean: dimension mismatch");
  const double scale0 = 1.0 + sigma0.cwiseAbs().maxCoeff();
  const double scale1 = 1.0 + sigma1.cwiseAbs().maxCoeff();
  if ((sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale0 ||
      (sigma1 - sigma1.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale1)
    throw domain_error("gaussian_kl_zero_mean: inputs must be symmetric");

  Eigen::LLT<Mat> llt0(sigma0), llt1(sigma1);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success)
    throw domain_error("gaussian_kl_zero_mean: inputs must be positive definite");

  auto logdet = [l](const Eigen::LLT<Mat>& llt) {
    double acc = 0.0;
    for (int i = 0; i < l; ++i) acc += std::log(llt.matrixL()(i, i));
    return 2.0 * acc;
  };
  const double trace_term = llt1.solve(sigma0).trace();
  return 0.5 * (trace_term - l + logdet(llt1) - logdet(llt0));
}

double mixture_log_density(const std::vector<SpikedParam>& draws,
                           const Vec& y) {
  if (draws.empty()) throw domain_error("mixture_log_density: no draws");
  // running-max log-sum-exp; no scratch allocation so evaluation cost is
  // exactly one rank-one density per draw
  double mx = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (const SpikedParam& p : draws) {
    const double s = spiked_log_density(p, y);
    if (s <= mx) {
      acc += std::exp(s - mx);
    } else {
      acc = acc * std::exp(mx - s) + 1.0;
      mx = s;
    }
  }
  return mx + std::log(acc / static_cast<double>(draws.size()));
}

double kl_risk_terms(const SpikedParam& truth, const SpikedPredictive& pred,
                     const std::vector<Vec>& y_samples) {
  switch (pred.kind) {
    case SpikedPredictiveKind::BayesPlugin:
    case SpikedPredictiveKind::ExtendedPlugin:
      return gaussian_kl_zero_mean(covariance(truth), pred.sigma);
    case SpikedPredictiveKind::Mixture: {
      if (y_samples.empty())
        throw domain_error("kl_risk_terms: mixture branch needs y samples");
      double acc = 0.0;
      for (const Vec& y : y_samples)
        acc += spiked_log_density(truth, y) -
               mixture_log_density(pred.draws, y);
      return acc / static_cast<double>(y_samples.size());
    }
  }
  throw domain_error("kl_risk_terms: unknown predictive kind");
}

Vec sample_spiked(RngStream& s, const SpikedParam& p) {
  const int l = static_cast<int>(p.u.size());
  const Vec z = normal_vector(s, l);
  return z + (std::sqrt(1.0 + p.lambda) - 1.0) * p.u.dot(z) * p.u;
}

PowerIterationResult top_eigenvector_power(const Mat& m) {
  const int l = static_cast<int>(m.rows());
  const long kMaxIter = 10000;
  const double kTol = 1e-12;

  PowerIterationResult res;
  // Deterministic start with support on every axis: a coordinate start such
  // as e1 can be an exact eigenvector of a valid input (say 2 e2 e2' + I),
  // where the iteration "converges" instantly to a non-top eigenpair and no
  // stall is ever detected.  The decaying profile overlaps every eigenvector
  // of anything that is not adversarially aligned with it.
  Vec start(l);
  for (int i = 0; i < l; ++i) start[i] = 1.0 / std::sqrt(double(i + 1));
  res.v = start.normalized();
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (attempt == 1) res.v = Vec::Ones(l).normalized();  // restart on stall
    for (long it = 0; it < kMaxIter; ++it) {
      Vec w = m * res.v;
      const double nw = w.norm();
      if (nw == 0.0) break;  // start vector in the kernel; restart
      w /= nw;
      ++res.iterations;
      if ((w - res.v).norm() <= kTol) {
        res.v = w;
        res.value = res.v.dot(m * res.v);
        return res;
      }
      res.v = w;
    }
  }
  res.value = res.v.dot(m * res.v);
  res.degenerate = true;  // eigengap too small to separate within budget
  return res;
}

CurvedModel spiked_curved_model(int l, const Vec& anchor_u0) {
  if (l < 2) throw domain_error("spiked_curved_model: need l >= 2");
  if (anchor_u0.size() != l || anchor_u0.norm() == 0.0)
    throw domain_error("spiked_curved_model: bad anchor direction");
  const Vec u0 = anchor_u0.normalized();

  // orthonormal basis of the complement of u0: trailing columns of a
  // Householder Q whose first column spans u0
  Mat seed(l, 1);
  seed.col(0) = u0;
  const Mat q = Eigen::HouseholderQR<Mat>(seed).householderQ();
  const Mat v_basis = q.rightCols(l - 1);

  CurvedModel model;
  model.d = l;
  model.embed = [l, u0, v_basis](const Vec& om) -> Vec {
    const double lam = om[0];
    const Vec u = (u0 + v_basis * om.tail(l - 1)).normalized();
    const double ratio = lam / (1.0 + lam);
    const Mat a = Mat::Identity(l, l) - ratio * (u * u.transpose());
    Vec th(vech_dim(l));
    for (int i = 0; i < l; ++i)
      for (int j = i; j < l; ++j)
        th[vech_index(l, i, j)] = (i == j) ? -0.5 * a(i, i) : -a(i, j);
    return th;
  };
  model.omega_in_domain = [l](const Vec& om) {
    return om.size() == l && om.allFinite() && om[0] > 0.0;
  };
  model.mle_init = [l, u0, v_basis](const ExponentialFamily&,
                                    const DataSummary& data) -> Vec {
    const Mat sbar = mat_of_vech(l, data.mean_t());
    const PowerIterationResult top = top_eigenvector_power(sbar);
    Vec u_hat = top.v;
    const double align = u0.dot(u_hat);
    if (std::abs(align) < 1e-8)
      throw degeneracy_error(
          "spiked mle: empirical spike is orthogonal to the chart anchor");
    if (align < 0.0) u_hat = -u_hat;
    Vec om(l);
    om[0] = std::max(top.value - 1.0, 0.1);
    om.tail(l - 1) = v_basis.transpose() * u_hat / u0.dot(u_hat);
    return om;
  };
  return model;
}

}  // namespace predgeom
