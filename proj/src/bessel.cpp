#include "predgeom/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace predgeom {
namespace {

constexpr double kSeriesCut = 30.0;

// Ascending series around z=0:
//   I_nu(z) = (z/2)^nu * sum_k (z^2/4)^k / (k! (k+nu)!)
// All terms are positive, so the only numerical concern is accumulation
// error, handled by Kahan compensation.
double series_sum(double z, int nu) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (int k = 1; k <= 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + nu));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

double series_i0(double z) { return series_sum(z, 0); }
double series_i1(double z) { return 0.5 * z * series_sum(z, 1); }

// Scaled asymptotic series: I_nu(z) ~ e^z / sqrt(2 pi z) * S_nu(z),
//   S_nu(z) = sum_k (-1)^k a_k(nu) / z^k,
//   a_k(nu) = (4nu^2-1)(4nu^2-9)...(4nu^2-(2k-1)^2) / (k! 8^k).
// For nu in {0,1} the terms decay monotonically once z >= 30; 12 terms put
// the truncation near 1e-15 at the series/asymptotic boundary.
double asymptotic_scaled(double z, int nu) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * z);
    sum += term;
  }
  return sum;
}

double log_inu_large(double z, int nu) {
  return z + std::log(asymptotic_scaled(z, nu) / std::sqrt(2.0 * M_PI * z));
}

void require_nonnegative(double z) {
  if (!(z >= 0.0))
    throw std::domain_error("bessel: argument must be >= 0");
}

}  // namespace

double bessel_i0(double z) {
  require_nonnegative(z);
  if (z < kSeriesCut) return series_i0(z);
  return std::exp(log_inu_large(z, 0));
}

double bessel_i1(double z) {
  require_nonnegative(z);
  if (z < kSeriesCut) return series_i1(z);
  return std::exp(log_inu_large(z, 1));
}

double log_bessel_i0(double z) {
  require_nonnegative(z);
  if (z < kSeriesCut) return std::log(series_i0(z));
  return log_inu_large(z, 0);
}

double log_bessel_i1(double z) {
  require_nonnegative(z);
  if (z == 0.0) return -std::numeric_limits<double>::infinity();
  if (z < kSeriesCut) return std::log(series_i1(z));
  return log_inu_large(z, 1);
}

double bessel_ratio_i1_i0(double z) {
  require_nonnegative(z);
  if (z < kSeriesCut) return series_i1(z) / series_i0(z);
  // the e^z / sqrt(2 pi z) prefactors cancel exactly
  return asymptotic_scaled(z, 1) / asymptotic_scaled(z, 0);
}

}  // namespace predgeom
