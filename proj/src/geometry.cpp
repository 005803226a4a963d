#include "predgeom/geometry.hpp"

#include <cmath>

#include "predgeom/fdiff.hpp"

namespace predgeom {
namespace {

struct LocalDerivs {
  Vec theta, eta;
  Mat hess;        // hess_psi at theta(omega)
  Mat jth, jeta;   // m x d first derivatives of theta(omega), eta(omega)
  std::vector<Vec> th2, eta2;  // second derivatives, (a*d+b)-indexed
};

LocalDerivs local_derivs(const ExponentialFamily& fam, const CurvedModel& model,
                         const Vec& omega, bool need_second) {
  if (!model.omega_in_domain(omega))
    throw domain_error("geometry: omega outside the model domain");
  LocalDerivs ld;
  ld.theta = model.embed(omega);
  ld.hess = fam.hess_psi(ld.theta);
  ld.eta = fam.grad_psi(ld.theta);
  auto eta_of = [&](const Vec& w) -> Vec { return fam.grad_psi(model.embed(w)); };
  ld.jth = fd_jacobian(model.embed, omega, fam.m);
  ld.jeta = fd_jacobian(eta_of, omega, fam.m);
  if (need_second) {
    ld.th2 = fd_second(model.embed, omega, fam.m);
    ld.eta2 = fd_second(eta_of, omega, fam.m);
  }
  return ld;
}

Mat metric_of(const LocalDerivs& ld) {
  return ld.jth.transpose() * ld.hess * ld.jth;
}

}  // namespace

GeometryReport geometry_at(const ExponentialFamily& fam,
                           const CurvedModel& model, const Vec& omega) {
  const int d = model.d;
  const LocalDerivs ld = local_derivs(fam, model, omega, true);

  GeometryReport rep;
  rep.g = metric_of(ld);
  Eigen::LLT<Mat> llt(rep.g);
  if (llt.info() != Eigen::Success)
    throw geometry_error("geometry_at: metric not positive definite");
  rep.g_inv = llt.solve(Mat::Identity(d, d));

  rep.gamma_e = Tensor3(d, d, d);
  rep.gamma_m = Tensor3(d, d, d);
  rep.skew = Tensor3(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        const size_t ab = static_cast<size_t>(a) * d + b;
        rep.gamma_e(a, b, c) = ld.th2[ab].dot(ld.jeta.col(c));
        rep.gamma_m(a, b, c) = ld.eta2[ab].dot(ld.jth.col(c));
        rep.skew(a, b, c) = rep.gamma_m(a, b, c) - rep.gamma_e(a, b, c);
      }

  rep.skew_vec = Vec::Zero(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        rep.skew_vec[a] += rep.skew(a, b, c) * rep.g_inv(b, c);

  double det = 1.0;
  for (int i = 0; i < d; ++i) det *= llt.matrixL()(i, i);
  rep.jeffreys = det;  // sqrt(det g) = prod of Cholesky diagonal
  return rep;
}

AncillaryFrame ancillary_frame(const ExponentialFamily& fam,
                               const CurvedModel& model, const Vec& omega) {
  const int m = fam.m;
  const int d = model.d;
  const LocalDerivs ld = local_derivs(fam, model, omega, false);

  // inner product of eta-component vectors: <u,v> = u' hess^{-1} v
  Eigen::LDLT<Mat> hfac(ld.hess);
  auto inner = [&](const Vec& u, const Vec& v) {
    return u.dot(hfac.solve(v));
  };

  // start from the model tangents, then extend with canonical basis vectors
  std::vector<Vec> ortho;  // orthonormalized spanning set (tangents first)
  ortho.reserve(m);
  auto push_orthonormalized = [&](Vec v) -> bool {
    for (const Vec& w : ortho) v -= inner(w, v) * w;
    // second pass for numerical orthogonality
    for (const Vec& w : ortho) v -= inner(w, v) * w;
    const double nn = inner(v, v);
    if (nn < 1e-18) return false;
    ortho.push_back(v / std::sqrt(nn));
    return true;
  };

  for (int a = 0; a < d; ++a)
    if (!push_orthonormalized(ld.jeta.col(a)))
      throw geometry_error("ancillary_frame: embedding is rank deficient");

  AncillaryFrame frame;
  frame.basis = Mat(m, m - d);
  int filled = 0;
  for (int i = 0; i < m && filled < m - d; ++i)
    if (push_orthonormalized(Vec::Unit(m, i))) {
      frame.basis.col(filled) = ortho.back();
      ++filled;
    }
  if (filled != m - d)
    throw geometry_error("ancillary_frame: could not complete the frame");
  frame.g_orth = Mat::Identity(m - d, m - d);
  return frame;
}

EmbeddingCurvature embedding_curvature(const ExponentialFamily& fam,
                                       const CurvedModel& model,
                                       const Vec& omega,
                                       const AncillaryFrame& frame) {
  const int d = model.d;
  const int k = static_cast<int>(frame.basis.cols());
  const LocalDerivs ld = local_derivs(fam, model, omega, true);
  Eigen::LDLT<Mat> hfac(ld.hess);

  // d_kappa theta^i = hess^{-1} (frame vector in eta-components)
  Mat frame_theta(fam.m, k);
  for (int kk = 0; kk < k; ++kk)
    frame_theta.col(kk) = hfac.solve(frame.basis.col(kk));

  EmbeddingCurvature curv;
  curv.h = Tensor3(d, d, k);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const Vec& eab = ld.eta2[static_cast<size_t>(a) * d + b];
      for (int kk = 0; kk < k; ++kk)
        curv.h(a, b, kk) = eab.dot(frame_theta.col(kk));
    }
  return curv;
}

ShiftVector optimal_beta(const ExponentialFamily& fam, const CurvedModel& model,
                         const Vec& omega) {
  const GeometryReport rep = geometry_at(fam, model, omega);
  const AncillaryFrame frame = ancillary_frame(fam, model, omega);
  const EmbeddingCurvature curv =
      embedding_curvature(fam, model, omega, frame);
  const int d = model.d;
  const int k = static_cast<int>(frame.basis.cols());

  ShiftVector sv;
  sv.alpha = Vec::Zero(d);
  sv.beta = Vec::Zero(k);
  // beta^kappa = (1/2) H_ab^kappa g^{ab}; the frame is orthonormal so index
  // position on kappa is immaterial
  for (int kk = 0; kk < k; ++kk) {
    double acc = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        acc += curv.h(a, b, kk) * rep.g_inv(a, b);
    sv.beta[kk] = 0.5 * acc;
  }
  return sv;
}

double risk_improvement(const ExponentialFamily& fam, const CurvedModel& model,
                        const Vec& omega, long n) {
  if (n < 1) throw domain_error("risk_improvement: n must be >= 1");
  const GeometryReport rep = geometry_at(fam, model, omega);
  const AncillaryFrame frame = ancillary_frame(fam, model, omega);
  const EmbeddingCurvature curv =
      embedding_curvature(fam, model, omega, frame);
  const int d = model.d;
  const int k = static_cast<int>(frame.basis.cols());

  // mean-curvature contraction: sum_kappa (H_ab^kappa g^{ab})^2 in the
  // orthonormal frame
  double acc = 0.0;
  for (int kk = 0; kk < k; ++kk) {
    double tracepart = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        tracepart += curv.h(a, b, kk) * rep.g_inv(a, b);
    acc += tracepart * tracepart;
  }
  const double nn = static_cast<double>(n);
  return acc / (8.0 * nn * nn);
}

double projection_angle_cos(double improvement_in_e, double improvement_in_f) {
  if (!(improvement_in_f > 0.0) || improvement_in_e < 0.0 ||
      improvement_in_e > improvement_in_f)
    throw domain_error(
        "projection_angle_cos: need 0 <= improvement_in_E <= improvement_in_F "
        "with improvement_in_F > 0");
  return std::sqrt(improvement_in_e / improvement_in_f);
}

namespace {

// Shared scaffolding for the two posterior-mean expansions: geometry at the
// MLE plus the prior-gradient term.
struct ExpansionParts {
  Vec om_hat;
  LocalDerivs ld;
  GeometryReport rep;
  Vec prior_grad;      // d_b log(pi/pi_J) at om_hat (zero when pi = pi_J)
};

ExpansionParts expansion_parts(const ExponentialFamily& fam,
                               const CurvedModel& model,
                               const DataSummary& data,
                               const PriorLogRatio& prior) {
  ExpansionParts parts;
  parts.om_hat = mle(fam, model, data);
  parts.ld = local_derivs(fam, model, parts.om_hat, true);
  parts.rep = geometry_at(fam, model, parts.om_hat);
  parts.prior_grad = Vec::Zero(model.d);
  if (prior) parts.prior_grad = fd_gradient(prior, parts.om_hat);
  return parts;
}

}  // namespace

ExpectationParam expansion_estimator(const ExponentialFamily& fam,
                                     const CurvedModel& model,
                                     const DataSummary& data,
                                     const PriorLogRatio& prior) {
  const ExpansionParts parts = expansion_parts(fam, model, data, prior);
  const int d = model.d;
  const double n = static_cast<double>(data.n);
  const GeometryReport& rep = parts.rep;
  const LocalDerivs& ld = parts.ld;

  Vec eta_hat = ld.eta;

  // (g^{ab}/2n) (d_a d_b eta - Gamma(m)_ab^c d_c eta)
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Vec term = ld.eta2[static_cast<size_t>(a) * d + b];
      for (int c = 0; c < d; ++c) {
        double gm_up = 0.0;  // Gamma(m)_ab^c = Gamma(m)_abe g^{ec}
        for (int e = 0; e < d; ++e)
          gm_up += rep.gamma_m(a, b, e) * rep.g_inv(e, c);
        term -= gm_up * ld.jeta.col(c);
      }
      eta_hat += (rep.g_inv(a, b) / (2.0 * n)) * term;
    }

  // (g^{ab}/n) (d_b log(pi/pi_J) + T_b/2) d_a eta
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double coeff = rep.g_inv(a, b) *
                           (parts.prior_grad[b] + 0.5 * rep.skew_vec[b]) / n;
      eta_hat += coeff * ld.jeta.col(a);
    }

  return {eta_hat};
}

DensityShift expansion_density_shift(const ExponentialFamily& fam,
                                     const CurvedModel& model,
                                     const DataSummary& data,
                                     const PriorLogRatio& prior,
                                     const std::vector<Vec>& y_grid) {
  const ExpansionParts parts = expansion_parts(fam, model, data, prior);
  const int d = model.d;
  const double n = static_cast<double>(data.n);
  const GeometryReport& rep = parts.rep;
  const LocalDerivs& ld = parts.ld;
  Eigen::LDLT<Mat> hfac(ld.hess);

  const size_t ny = y_grid.size();
  DensityShift out;
  out.base = Vec::Zero(ny);
  out.parallel = Vec::Zero(ny);
  out.orthogonal = Vec::Zero(ny);

  // parallel coefficient per model direction a:
  //   g^{ab}(d_b log(pi/pi_J) + T_b/2)/n
  Vec par_coeff = Vec::Zero(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      par_coeff[a] += rep.g_inv(a, b) *
                      (parts.prior_grad[b] + 0.5 * rep.skew_vec[b]) / n;

  for (size_t iy = 0; iy < ny; ++iy) {
    const Vec& y = y_grid[iy];
    const double p = std::exp(
        fam.log_base_measure(y) + ld.theta.dot(fam.suff_stat(y)) -
        fam.psi(ld.theta));
    out.base[iy] = p;

    // score in the full family: d p/d theta^i = p (t(y) - eta)_i, and
    // d^i p = p * hess^{-1} (t(y) - eta)
    const Vec resid = fam.suff_stat(y) - ld.eta;
    const Vec dtheta_p = p * resid;
    const Vec dup = p * hfac.solve(resid);

    // model-direction derivatives d_a p = (d_a theta) . (d p/d theta)
    Vec da_p(d);
    for (int a = 0; a < d; ++a) da_p[a] = ld.jth.col(a).dot(dtheta_p);

    out.parallel[iy] = par_coeff.dot(da_p);

    // orthogonal shift: (g^{ab}/2n) [ (d_a d_b eta_i) d^i p
    //                                 - Gamma(m)_ab^c d_c p ]
    double orth = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double hab = ld.eta2[static_cast<size_t>(a) * d + b].dot(dup);
        for (int c = 0; c < d; ++c) {
          double gm_up = 0.0;
          for (int e = 0; e < d; ++e)
            gm_up += rep.gamma_m(a, b, e) * rep.g_inv(e, c);
          hab -= gm_up * da_p[c];
        }
        orth += rep.g_inv(a, b) * hab;
      }
    out.orthogonal[iy] = orth / (2.0 * n);
  }
  return out;
}

}  // namespace predgeom
