#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "predgeom/circle.hpp"
#include "predgeom/expfam.hpp"
#include "predgeom/fdiff.hpp"
#include "predgeom/rng.hpp"
#include "predgeom/spiked.hpp"
#include "reference_values.hpp"

using namespace predgeom;

namespace {

Vec random_theta_isotropic(RngStream& s, int dim) {
  return normal_vector(s, dim);
}

// a random natural parameter of the zero-mean Gaussian family: build a
// random SPD precision and pack -A/2 on the diagonal, -A off it
Vec random_theta_zero_mean(RngStream& s, int l) {
  Mat b(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) b(i, j) = normal(s);
  Mat a = b * b.transpose() + 0.5 * Mat::Identity(l, l);
  Mat packed = -a;
  packed.diagonal() *= 0.5;
  return vech_of(packed);
}

}  // namespace

TEST_CASE("vech packing round-trips and indexes the upper triangle") {
  CHECK(vech_dim(1) == 1);
  CHECK(vech_dim(4) == 10);
  CHECK(vech_index(3, 0, 0) == 0);
  CHECK(vech_index(3, 0, 2) == 2);
  CHECK(vech_index(3, 1, 1) == 3);
  CHECK(vech_index(3, 2, 2) == 5);
  CHECK(vech_index(3, 2, 1) == vech_index(3, 1, 2));

  RngStream s = make_stream(8, 0);
  Mat b(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b(i, j) = normal(s);
  const Mat sym = 0.5 * (b + b.transpose());
  const Mat back = mat_of_vech(4, vech_of(sym));
  CHECK((back - sym).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theta to eta and back, both families") {
  RngStream s = make_stream(17, 1);

  const ExponentialFamily iso = isotropic_gaussian_family(3, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec th = random_theta_isotropic(s, 3);
    const ExpectationParam e = theta_to_eta(iso, NaturalParam{th});
    const NaturalParam back = eta_to_theta(iso, e);
    CHECK((back.theta - th).norm() <= 1e-8 * (1.0 + th.norm()));
  }

  const ExponentialFamily zg = zero_mean_gaussian_family(4);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec th = random_theta_zero_mean(s, 4);
    const ExpectationParam e = theta_to_eta(zg, NaturalParam{th});
    const NaturalParam back = eta_to_theta(zg, e);
    CHECK((back.theta - th).norm() <= 1e-8 * (1.0 + th.norm()));
  }
}

TEST_CASE("eta_to_theta falls back to Newton when the closed form is removed") {
  ExponentialFamily zg = zero_mean_gaussian_family(3);
  RngStream s = make_stream(23, 2);
  const Vec th = random_theta_zero_mean(s, 3);
  const ExpectationParam e = theta_to_eta(zg, NaturalParam{th});

  zg.eta_to_theta_closed = nullptr;  // force the iterative path
  const NaturalParam back = eta_to_theta(zg, e);
  CHECK((back.theta - th).norm() <= 1e-7 * (1.0 + th.norm()));
}

TEST_CASE("grad_psi matches finite differences of psi") {
  RngStream s = make_stream(29, 3);
  const ExponentialFamily iso = isotropic_gaussian_family(2, 0.7);
  const ExponentialFamily zg = zero_mean_gaussian_family(3);

  for (int rep = 0; rep < 10; ++rep) {
    const Vec th1 = random_theta_isotropic(s, 2);
    const Vec g1 = fd_gradient(iso.psi, th1);
    CHECK((iso.grad_psi(th1) - g1).norm() <= 1e-6 * (1.0 + g1.norm()));

    const Vec th2 = random_theta_zero_mean(s, 3);
    const Vec g2 = fd_gradient(zg.psi, th2);
    CHECK((zg.grad_psi(th2) - g2).norm() <= 1e-5 * (1.0 + g2.norm()));
  }
}

TEST_CASE("isotropic family closed forms") {
  const double sigma2 = 1.7;
  const ExponentialFamily fam = isotropic_gaussian_family(2, sigma2);
  Vec th(2);
  th << 0.3, -0.7;
  // eta = sigma2 * theta is the mean
  const ExpectationParam e = theta_to_eta(fam, NaturalParam{th});
  CHECK(std::abs(e.eta[0] - sigma2 * 0.3) <= 1e-15);
  CHECK(std::abs(e.eta[1] - sigma2 * (-0.7)) <= 1e-15);
  // psi = sigma2 |theta|^2 / 2
  CHECK(std::abs(fam.psi(th) - 0.5 * sigma2 * th.squaredNorm()) <= 1e-15);
  // hess is sigma2 I
  const Mat h = fam.hess_psi(th);
  CHECK((h - sigma2 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("zero-mean family recovers covariances") {
  const ExponentialFamily fam = zero_mean_gaussian_family(3);

  // eta of the packed precision of diag(2,1,1) is vech(diag(2,1,1))
  Mat sig = Mat::Identity(3, 3);
  sig(0, 0) = 2.0;
  const Mat a = sig.inverse();
  Mat packed = -a;
  packed.diagonal() *= 0.5;
  const ExpectationParam e = theta_to_eta(fam, NaturalParam{vech_of(packed)});
  CHECK((mat_of_vech(3, e.eta) - sig).cwiseAbs().maxCoeff() <= 1e-12);

  // and the inverse map returns the packed -Sigma^{-1}
  Mat sig2(2, 2);
  sig2 << 2.0, 0.5,
          0.5, 1.0;
  const ExponentialFamily fam2 = zero_mean_gaussian_family(2);
  const NaturalParam th = eta_to_theta(fam2, ExpectationParam{vech_of(sig2)});
  const Mat a2 = sig2.inverse();
  Mat expect = -a2;
  expect.diagonal() *= 0.5;
  CHECK((th.theta - vech_of(expect)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("hess_psi is the sampling covariance of the sufficient statistic") {
  const ExponentialFamily fam = zero_mean_gaussian_family(2);
  Mat sig(2, 2);
  sig << 1.5, -0.4,
         -0.4, 0.8;
  Mat packed = -sig.inverse().eval();
  packed.diagonal() *= 0.5;
  const Vec th = vech_of(packed);
  const Vec eta = fam.grad_psi(th);
  const Mat h = fam.hess_psi(th);

  RngStream s = make_stream(41, 6);
  const long n = 1000000;
  Mat acc = Mat::Zero(3, 3);
  Mat acc2 = Mat::Zero(3, 3);  // squares, for an empirical standard error
  for (long i = 0; i < n; ++i) {
    const Vec t = fam.suff_stat(fam.sample(th, s)) - eta;
    const Mat prod = t * t.transpose();
    acc += prod;
    acc2 += prod.cwiseProduct(prod);
  }
  acc /= double(n);
  acc2 /= double(n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double se =
          std::sqrt((acc2(i, j) - acc(i, j) * acc(i, j)) / double(n));
      CHECK(std::abs(acc(i, j) - h(i, j)) < 5.0 * se + 1e-6);
    }
}

TEST_CASE("kl_divergence: zero at equality, positive elsewhere, exact value") {
  const ExponentialFamily fam = zero_mean_gaussian_family(5);
  Mat packed_id = -Mat::Identity(5, 5).eval();
  packed_id.diagonal() *= 0.5;
  const Vec th_id = vech_of(packed_id);

  Mat packed_two = -(0.5 * Mat::Identity(5, 5)).eval();
  packed_two.diagonal() *= 0.5;
  const Vec th_two = vech_of(packed_two);  // Sigma = 2 I5

  CHECK(kl_divergence(fam, NaturalParam{th_id}, NaturalParam{th_id}) == 0.0);
  const double kl = kl_divergence(fam, NaturalParam{th_two},
                                  NaturalParam{th_id});
  CHECK(std::abs(kl - refvals::kKlTwoI5VsI5) <= 1e-12);
  CHECK(kl_divergence(fam, NaturalParam{th_id}, NaturalParam{th_two}) > 0.0);
}

TEST_CASE("kl_divergence equals the Monte Carlo expected log ratio") {
  const ExponentialFamily fam = isotropic_gaussian_family(2, 1.3);
  RngStream s = make_stream(47, 9);
  for (int rep = 0; rep < 10; ++rep) {
    const Vec th_a = random_theta_isotropic(s, 2);
    const Vec th_b = random_theta_isotropic(s, 2);
    const double kl = kl_divergence(fam, NaturalParam{th_a}, NaturalParam{th_b});

    const long n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n; ++i) {
      const Vec x = fam.sample(th_a, s);
      const double d = log_density(fam, NaturalParam{th_a}, x) -
                       log_density(fam, NaturalParam{th_b}, x);
      sum += d;
      sumsq += d * d;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - kl) <= 4.0 * sd + 1e-10);
  }
}

TEST_CASE("average log likelihood peaks at the true parameter region") {
  // circle model: the likelihood of omega depends on the data only through
  // xbar, and is maximized exactly at the resultant angle phi
  const ExponentialFamily fam = circle_family(1.0);
  const CurvedModel model = circle_model(1.0);

  DataSummary data;
  data.n = 40;
  Vec xbar(2);
  xbar << 0.6, 0.45;
  data.sum_t = double(data.n) * xbar;

  const double phi = std::atan2(xbar[1], xbar[0]);
  Vec at_phi(1), off1(1), off2(1);
  at_phi << phi;
  off1 << phi + 0.15;
  off2 << phi - 0.4;
  const double l0 = avg_log_likelihood(fam, model, data, at_phi).value;
  CHECK(l0 > avg_log_likelihood(fam, model, data, off1).value);
  CHECK(l0 > avg_log_likelihood(fam, model, data, off2).value);

  // base measure shifts the value by a constant and sets the flag, but only
  // when raw samples exist
  AvgLogLik no_base = avg_log_likelihood(fam, model, data, at_phi, true);
  CHECK_FALSE(no_base.base_measure_included);

  data.samples.assign(40, xbar);
  AvgLogLik with_base = avg_log_likelihood(fam, model, data, at_phi, true);
  CHECK(with_base.base_measure_included);
  CHECK(with_base.value != l0);
}

TEST_CASE("mle on the circle lands on the resultant angle") {
  const ExponentialFamily fam = circle_family(1.0);
  const CurvedModel model = circle_model(1.0);
  DataSummary data;
  data.n = 30;
  Vec xbar(2);
  xbar << -0.2, 0.9;
  data.sum_t = double(data.n) * xbar;

  const Vec om = mle(fam, model, data);
  const double phi = std::atan2(xbar[1], xbar[0]);
  CHECK(std::abs(std::remainder(om[0] - phi, 2.0 * M_PI)) <= 1e-9);
}

TEST_CASE("mle on the spiked chart recovers a strong planted spike") {
  const int l = 3;
  const double lam_true = 4.0;
  SpikedParam truth{lam_true, Vec::Unit(l, 0)};

  RngStream s = make_stream(53, 12);
  const long n = 10000;
  DataSummary data;
  data.n = n;
  const ExponentialFamily fam = zero_mean_gaussian_family(l);
  data.sum_t = Vec::Zero(vech_dim(l));
  for (long i = 0; i < n; ++i)
    data.sum_t += fam.suff_stat(sample_spiked(s, truth));

  const CurvedModel model = spiked_curved_model(l, Vec::Unit(l, 0));
  const Vec om = mle(fam, model, data);

  // chart: omega[0] = lambda, remaining coordinates are tangent offsets
  CHECK(std::abs(om[0] - lam_true) < 0.4);  // 10% of lambda
  Vec u = Vec::Unit(l, 0);
  const Mat sig_hat =
      mat_of_vech(l, theta_to_eta(fam, NaturalParam{model.embed(om)}).eta);
  // top eigenvector of the fitted covariance aligns with e1
  Eigen::SelfAdjointEigenSolver<Mat> es(sig_hat);
  const Vec top = es.eigenvectors().col(l - 1);
  CHECK(std::abs(top.dot(u)) > 0.99);
}

TEST_CASE("domain violations are rejected") {
  const ExponentialFamily zg = zero_mean_gaussian_family(2);
  // a non-negative-definite "precision" packing is outside the domain
  Mat bad = Mat::Identity(2, 2).eval();  // positive instead of negative
  bad.diagonal() *= 0.5;
  CHECK_THROWS_AS((void)theta_to_eta(zg, NaturalParam{vech_of(bad)}),
                  predgeom::domain_error);

  Mat notpd(2, 2);
  notpd << 1.0, 2.0,
           2.0, 1.0;
  CHECK_THROWS_AS((void)eta_to_theta(zg, ExpectationParam{vech_of(notpd)}),
                  predgeom::domain_error);
}
