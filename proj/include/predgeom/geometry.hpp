#pragma once

#include <functional>
#include <vector>

#include "predgeom/expfam.hpp"

namespace predgeom {

// Dense rank-3 tensor with (i,j,k) indexing; just enough for the d x d x d
// connection coefficients and the d x d x (m-d) embedding curvature.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int n1, int n2, int n3)
      : n1_(n1), n2_(n2), n3_(n3),
        data_(static_cast<size_t>(n1) * n2 * n3, 0.0) {}

  double& operator()(int i, int j, int k) {
    return data_[(static_cast<size_t>(i) * n2_ + j) * n3_ + k];
  }
  double operator()(int i, int j, int k) const {
    return data_[(static_cast<size_t>(i) * n2_ + j) * n3_ + k];
  }
  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }

 private:
  int n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<double> data_;
};

// Metric, connections, skewness and Jeffreys density of the curved model at
// a point omega, all in model coordinates:
//   g_ab      = (d_a theta)' hess_psi (d_b theta)
//   Gamma(e)_abc = (d_a d_b theta^i)(d_c eta_i)
//   Gamma(m)_abc = (d_a d_b eta_i)(d_c theta^i)
//   T_abc     = Gamma(m)_abc - Gamma(e)_abc,   T_a = T_abc g^{bc}
//   jeffreys  = sqrt(det g)
struct GeometryReport {
  Mat g, g_inv;
  Tensor3 gamma_e, gamma_m, skew;
  Vec skew_vec;
  double jeffreys = 0.0;
};

// Orthogonal complement of the model tangent space at eta(omega), expressed
// in eta-coordinates.  Tangent vectors u, v written in eta-components have
// inner product u' hess_psi^{-1} v; the frame is orthonormalized in that
// metric (so g_orth is the identity) by Gram-Schmidt over the canonical
// basis in order, which makes it deterministic.
struct AncillaryFrame {
  Mat basis;   // m x (m-d), columns are eta-components of the frame vectors
  Mat g_orth;  // (m-d) x (m-d) Gram matrix of the frame
};

// Mixture embedding curvature H_ab^kappa = (d_a d_b eta_i)(d_kappa theta^i)
// in a given ancillary frame.  Frame-dependent by construction; only scalar
// contractions of it are comparable across runs.
struct EmbeddingCurvature {
  Tensor3 h;  // (d, d, m-d)
};

// Parallel / orthogonal shift coefficients (per 1/n).
struct ShiftVector {
  Vec alpha;  // d components along the model
  Vec beta;   // m-d components along the ancillary frame
};

GeometryReport geometry_at(const ExponentialFamily& fam,
                           const CurvedModel& model, const Vec& omega);

AncillaryFrame ancillary_frame(const ExponentialFamily& fam,
                               const CurvedModel& model, const Vec& omega);

EmbeddingCurvature embedding_curvature(const ExponentialFamily& fam,
                                       const CurvedModel& model,
                                       const Vec& omega,
                                       const AncillaryFrame& frame);

// Risk-optimal orthogonal shift beta^kappa = (1/2) H_ab^kappa g^{ab}
// (alpha is returned as zero: parallel shifts belong to the prior-dependent
// estimator expansion, not to this geometric optimum).
ShiftVector optimal_beta(const ExponentialFamily& fam, const CurvedModel& model,
                         const Vec& omega);

// Leading risk gain of the optimal orthogonal shift:
//   (1/(8 n^2)) H_ab^lambda H_cd^kappa g^{ab} g^{cd} g_{kappa lambda}.
double risk_improvement(const ExponentialFamily& fam, const CurvedModel& model,
                        const Vec& omega, long n);

// sqrt(improvement_in_E / improvement_in_F): cosine of the angle between the
// orthogonal shifts achievable inside the family and in the space of all
// densities.
double projection_angle_cos(double improvement_in_e, double improvement_in_f);

// log(pi / pi_J) as a function of omega; an empty function means pi = pi_J.
using PriorLogRatio = std::function<double(const Vec&)>;

// Second-order expansion of the posterior mean of eta around the MLE:
//   eta(om_hat) + (g^{ab}/2n)(d_a d_b eta - Gamma(m)_ab^c d_c eta)
//              + (g^{ab}/n)(d_b log(pi/pi_J) + T_b/2) d_a eta.
ExpectationParam expansion_estimator(const ExponentialFamily& fam,
                                     const CurvedModel& model,
                                     const DataSummary& data,
                                     const PriorLogRatio& prior = {});

// Density-level version of the same expansion, evaluated on a y grid:
// base term p(y; eta(om_hat)), the parallel shift along d_a p, and the
// orthogonal shift (g^{ab}/2n) h_ab with
//   h_ab(y) = (d_a d_b eta_i) d^i p - Gamma(m)_ab^c d_c p.
struct DensityShift {
  Vec base;        // p(y; eta(om_hat)) per grid point
  Vec parallel;    // parallel shift component per grid point
  Vec orthogonal;  // orthogonal shift component per grid point
};

DensityShift expansion_density_shift(const ExponentialFamily& fam,
                                     const CurvedModel& model,
                                     const DataSummary& data,
                                     const PriorLogRatio& prior,
                                     const std::vector<Vec>& y_grid);

}  // namespace predgeom
