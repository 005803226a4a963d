#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace predgeom {

// Central finite differences for model-parameter derivatives.
//
// First derivatives use h = max(1e-5, 1e-5 |w|): truncation ~h^2 and
// roundoff ~eps/h are both near 1e-10.  Second derivatives need a larger
// step, since their roundoff grows like eps/h^2; h2 = max(6e-4, 6e-4 |w|)
// balances that against truncation at ~3e-8 overall.

inline double fd_step1(double w) { return std::max(1e-5, 1e-5 * std::abs(w)); }
inline double fd_step2(double w) { return std::max(6e-4, 6e-4 * std::abs(w)); }

using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// m x d Jacobian: column a holds the derivative of f along omega_a.
inline Eigen::MatrixXd fd_jacobian(const VecFn& f, const Eigen::VectorXd& om,
                                   int m) {
  const int d = static_cast<int>(om.size());
  Eigen::MatrixXd jac(m, d);
  Eigen::VectorXd w = om;
  for (int a = 0; a < d; ++a) {
    const double h = fd_step1(om[a]);
    w[a] = om[a] + h;
    const Eigen::VectorXd fp = f(w);
    w[a] = om[a] - h;
    const Eigen::VectorXd fm = f(w);
    w[a] = om[a];
    jac.col(a) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

// All second derivatives d^2 f / (d omega_a d omega_b), returned as a
// symmetric (d*d)-indexed array of m-vectors (entry a*d+b).  Diagonal terms
// use the 3-point second difference; mixed terms the 4-point cross stencil
// (together the classic 9-point pattern for a 2-D Hessian).
inline std::vector<Eigen::VectorXd> fd_second(const VecFn& f,
                                              const Eigen::VectorXd& om,
                                              int m) {
  const int d = static_cast<int>(om.size());
  std::vector<Eigen::VectorXd> out(static_cast<size_t>(d) * d);
  const Eigen::VectorXd f0 = f(om);
  Eigen::VectorXd w = om;
  for (int a = 0; a < d; ++a) {
    const double ha = fd_step2(om[a]);
    w[a] = om[a] + ha;
    const Eigen::VectorXd fp = f(w);
    w[a] = om[a] - ha;
    const Eigen::VectorXd fm = f(w);
    w[a] = om[a];
    out[static_cast<size_t>(a) * d + a] = (fp - 2.0 * f0 + fm) / (ha * ha);
    for (int b = a + 1; b < d; ++b) {
      const double hb = fd_step2(om[b]);
      w[a] = om[a] + ha; w[b] = om[b] + hb;
      Eigen::VectorXd acc = f(w);
      w[b] = om[b] - hb;
      acc -= f(w);
      w[a] = om[a] - ha;
      acc += f(w);
      w[b] = om[b] + hb;
      acc -= f(w);
      w[a] = om[a]; w[b] = om[b];
      out[static_cast<size_t>(a) * d + b] = acc / (4.0 * ha * hb);
      out[static_cast<size_t>(b) * d + a] = out[static_cast<size_t>(a) * d + b];
    }
  }
  return out;
}

// Gradient of a scalar function of omega.
inline Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& om) {
  const int d = static_cast<int>(om.size());
  Eigen::VectorXd g(d);
  Eigen::VectorXd w = om;
  for (int a = 0; a < d; ++a) {
    const double h = fd_step1(om[a]);
    w[a] = om[a] + h;
    const double fp = f(w);
    w[a] = om[a] - h;
    const double fm = f(w);
    w[a] = om[a];
    g[a] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace predgeom
