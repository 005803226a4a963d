#include "predgeom/expfam.hpp"

#include <cmath>

#include "predgeom/fdiff.hpp"

namespace predgeom {

ExpectationParam theta_to_eta(const ExponentialFamily& fam,
                              const NaturalParam& th) {
  if (!fam.theta_in_domain(th.theta))
    throw domain_error("theta_to_eta: theta outside the natural domain");
  return {fam.grad_psi(th.theta)};
}

NaturalParam eta_to_theta(const ExponentialFamily& fam,
                          const ExpectationParam& e) {
  if (!fam.eta_in_domain(e.eta))
    throw domain_error("eta_to_theta: eta outside the mean domain");
  if (fam.eta_to_theta_closed) return {fam.eta_to_theta_closed(e.eta)};

  Vec th;
  if (fam.newton_init) {
    th = fam.newton_init(e.eta);
  } else {
    th = Vec::Zero(fam.m);
  }
  if (!fam.theta_in_domain(th))
    throw convergence_error("eta_to_theta: no valid starting point");

  const double scale = 1.0 + e.eta.norm();
  Vec resid = fam.grad_psi(th) - e.eta;
  for (int it = 0; it < 100; ++it) {
    if (resid.norm() <= 1e-10 * scale) return {th};
    const Mat hess = fam.hess_psi(th);
    const Vec step = hess.ldlt().solve(resid);
    double damp = 1.0;
    for (int half = 0; half < 40; ++half) {
      const Vec cand = th - damp * step;
      if (fam.theta_in_domain(cand)) {
        const Vec r2 = fam.grad_psi(cand) - e.eta;
        if (r2.norm() < resid.norm()) {
          th = cand;
          resid = r2;
          break;
        }
      }
      damp *= 0.5;
      if (half == 39)
        throw convergence_error(
            "eta_to_theta: damped Newton stalled, residual " +
            std::to_string(resid.norm()));
    }
  }
  throw convergence_error("eta_to_theta: no convergence in 100 iterations, "
                          "residual " + std::to_string(resid.norm()));
}

double log_density(const ExponentialFamily& fam, const NaturalParam& th,
                   const Vec& x) {
  if (!fam.theta_in_domain(th.theta))
    throw domain_error("log_density: theta outside the natural domain");
  return fam.log_base_measure(x) + th.theta.dot(fam.suff_stat(x)) -
         fam.psi(th.theta);
}

double kl_divergence(const ExponentialFamily& fam, const NaturalParam& th_true,
                     const NaturalParam& th_hat) {
  if (!fam.theta_in_domain(th_true.theta) ||
      !fam.theta_in_domain(th_hat.theta))
    throw domain_error("kl_divergence: parameter outside the natural domain");
  const Vec eta = fam.grad_psi(th_true.theta);
  return (th_true.theta - th_hat.theta).dot(eta) - fam.psi(th_true.theta) +
         fam.psi(th_hat.theta);
}

AvgLogLik avg_log_likelihood(const ExponentialFamily& fam,
                             const CurvedModel& model, const DataSummary& data,
                             const Vec& omega, bool include_base_measure) {
  if (!model.omega_in_domain(omega))
    throw domain_error("avg_log_likelihood: omega outside the model domain");
  const Vec th = model.embed(omega);
  const double n = static_cast<double>(data.n);
  AvgLogLik out;
  out.value = (th.dot(data.sum_t) - n * fam.psi(th)) / n;
  if (include_base_measure && !data.samples.empty()) {
    double base = 0.0;
    for (const Vec& x : data.samples) base += fam.log_base_measure(x);
    out.value += base / n;
    out.base_measure_included = true;
  }
  return out;
}

Vec mle(const ExponentialFamily& fam, const CurvedModel& model,
        const DataSummary& data) {
  Vec om = model.mle_init(fam, data);
  const Vec xbar_t = data.mean_t();
  const int d = model.d;

  auto grad_at = [&](const Vec& w) -> Vec {
    // d/d omega_a of avg log-likelihood = (d theta/d omega_a) . (tbar - eta)
    const Mat jth = fd_jacobian(model.embed, w, fam.m);
    const Vec eta = fam.grad_psi(model.embed(w));
    return jth.transpose() * (xbar_t - eta);
  };

  Vec grad = grad_at(om);
  for (int it = 0; it < 200; ++it) {
    if (grad.norm() <= 1e-10) return om;

    const Mat jth = fd_jacobian(model.embed, om, fam.m);
    const Vec th = model.embed(om);
    const Vec eta = fam.grad_psi(th);
    const Mat gmat = jth.transpose() * fam.hess_psi(th) * jth;
    const auto th2 = fd_second(model.embed, om, fam.m);

    // negative likelihood Hessian: g_ab - (d2 theta).(tbar - eta)
    Mat neg_hess = gmat;
    const Vec diff = xbar_t - eta;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        neg_hess(a, b) -= th2[static_cast<size_t>(a) * d + b].dot(diff);

    Eigen::LDLT<Mat> fac(neg_hess);
    Vec step;
    if (fac.info() == Eigen::Success && fac.isPositive()) {
      step = fac.solve(grad);
    } else {
      step = gmat.ldlt().solve(grad);  // Fisher-scoring fallback
    }

    double damp = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      const Vec cand = om + damp * step;
      if (model.omega_in_domain(cand)) {
        const Vec g2 = grad_at(cand);
        if (g2.norm() < grad.norm()) {
          om = cand;
          grad = g2;
          moved = true;
          break;
        }
      }
      damp *= 0.5;
    }
    if (!moved)
      throw convergence_error("mle: ascent stalled at gradient norm " +
                              std::to_string(grad.norm()));
  }
  throw convergence_error("mle: no convergence in 200 iterations");
}

// ---------------------------------------------------------------- families

ExponentialFamily isotropic_gaussian_family(int dim, double sigma2) {
  ExponentialFamily f;
  f.m = dim;
  f.sample_dim = dim;
  const double s2 = sigma2;
  f.psi = [s2](const Vec& th) { return 0.5 * s2 * th.squaredNorm(); };
  f.grad_psi = [s2](const Vec& th) -> Vec { return s2 * th; };
  f.hess_psi = [s2, dim](const Vec&) -> Mat {
    return s2 * Mat::Identity(dim, dim);
  };
  f.theta_in_domain = [](const Vec& th) { return th.allFinite(); };
  f.eta_in_domain = [](const Vec& e) { return e.allFinite(); };
  f.suff_stat = [](const Vec& x) -> Vec { return x; };
  f.log_base_measure = [s2, dim](const Vec& x) {
    return -0.5 * dim * std::log(2.0 * M_PI * s2) -
           x.squaredNorm() / (2.0 * s2);
  };
  f.sample = [s2](const Vec& th, RngStream& rng) -> Vec {
    const double sd = std::sqrt(s2);
    Vec x = s2 * th;  // mean
    for (int i = 0; i < x.size(); ++i) x[i] += sd * normal(rng);
    return x;
  };
  f.eta_to_theta_closed = [s2](const Vec& e) -> Vec { return e / s2; };
  return f;
}

int vech_dim(int l) { return l * (l + 1) / 2; }

int vech_index(int l, int i, int j) {
  if (i > j) std::swap(i, j);
  // row-major upper triangle: row i starts after i*l - i(i-1)/2 entries
  return i * l - i * (i - 1) / 2 + (j - i);
}

Vec vech_of(const Mat& m) {
  const int l = static_cast<int>(m.rows());
  Vec v(vech_dim(l));
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j) v[vech_index(l, i, j)] = m(i, j);
  return v;
}

Mat mat_of_vech(int l, const Vec& v) {
  Mat m(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j)
      m(i, j) = m(j, i) = v[vech_index(l, i, j)];
  return m;
}

namespace {

// theta packs A = Sigma^{-1} with theta_(ii) = -A_ii/2, theta_(ij) = -A_ij.
Mat precision_of_theta(int l, const Vec& th) {
  Mat a(l, l);
  for (int i = 0; i < l; ++i) {
    a(i, i) = -2.0 * th[vech_index(l, i, i)];
    for (int j = i + 1; j < l; ++j) a(i, j) = a(j, i) = -th[vech_index(l, i, j)];
  }
  return a;
}

Vec theta_of_precision(const Mat& a) {
  const int l = static_cast<int>(a.rows());
  Vec th(vech_dim(l));
  for (int i = 0; i < l; ++i) {
    th[vech_index(l, i, i)] = -0.5 * a(i, i);
    for (int j = i + 1; j < l; ++j) th[vech_index(l, i, j)] = -a(i, j);
  }
  return th;
}

bool is_spd(const Mat& m) {
  if (!m.allFinite()) return false;
  Eigen::LLT<Mat> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

ExponentialFamily zero_mean_gaussian_family(int l) {
  ExponentialFamily f;
  f.m = vech_dim(l);
  f.sample_dim = l;
  f.psi = [l](const Vec& th) {
    // psi = log det(Sigma)/2 = -log det(A)/2 via Cholesky of A
    Eigen::LLT<Mat> llt(precision_of_theta(l, th));
    if (llt.info() != Eigen::Success)
      throw domain_error("zero-mean Gaussian: theta not in the natural domain");
    double logdet_a = 0.0;
    for (int i = 0; i < l; ++i) logdet_a += std::log(llt.matrixL()(i, i));
    return -logdet_a;  // = -(1/2) log det A
  };
  f.grad_psi = [l](const Vec& th) -> Vec {
    const Mat sigma = precision_of_theta(l, th).inverse();
    return vech_of(sigma);
  };
  f.hess_psi = [l](const Vec& th) -> Mat {
    // covariance of t(x): cov(x_i x_j, x_k x_m) =
    //   Sigma_ik Sigma_jm + Sigma_im Sigma_jk
    const Mat sigma = precision_of_theta(l, th).inverse();
    const int m = vech_dim(l);
    Mat h(m, m);
    for (int i = 0; i < l; ++i)
      for (int j = i; j < l; ++j)
        for (int k = 0; k < l; ++k)
          for (int mm = k; mm < l; ++mm)
            h(vech_index(l, i, j), vech_index(l, k, mm)) =
                sigma(i, k) * sigma(j, mm) + sigma(i, mm) * sigma(j, k);
    return h;
  };
  f.theta_in_domain = [l](const Vec& th) {
    return th.allFinite() && is_spd(precision_of_theta(l, th));
  };
  f.eta_in_domain = [l](const Vec& e) {
    return e.allFinite() && is_spd(mat_of_vech(l, e));
  };
  f.suff_stat = [l](const Vec& x) -> Vec {
    Vec t(vech_dim(l));
    for (int i = 0; i < l; ++i)
      for (int j = i; j < l; ++j) t[vech_index(l, i, j)] = x[i] * x[j];
    return t;
  };
  f.log_base_measure = [l](const Vec&) {
    return -0.5 * l * std::log(2.0 * M_PI);
  };
  f.sample = [l](const Vec& th, RngStream& rng) -> Vec {
    const Mat sigma = precision_of_theta(l, th).inverse();
    return mvn_zero_mean(rng, sigma);
  };
  f.eta_to_theta_closed = [l](const Vec& e) -> Vec {
    return theta_of_precision(mat_of_vech(l, e).inverse());
  };
  f.newton_init = [l](const Vec& e) -> Vec {
    // diagonal-only guess: A = diag(1/eta_ii), always in the domain
    Mat a = Mat::Zero(l, l);
    for (int i = 0; i < l; ++i) a(i, i) = 1.0 / e[vech_index(l, i, i)];
    return theta_of_precision(a);
  };
  return f;
}

}  // namespace predgeom
