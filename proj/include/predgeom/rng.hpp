#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace predgeom {

// Counter-based random stream built on Philox 4x32-10 (Salmon et al. 2011).
// The 64-bit key is the master seed; the 128-bit counter is split into a
// 64-bit stream id (high words) and a 64-bit block position (low words), so
// any (seed, id) pair addresses an independent stream and any block within it
// can be produced without sequencing.  Streams are value types: copying one
// and replaying it yields identical output, and no global state exists.
struct RngStream {
  uint64_t key = 0;
  uint64_t id = 0;
  uint64_t pos = 0;  // next unconsumed 128-bit block

  // buffered leftovers so consecutive calls use every generated bit
  uint64_t pending_bits = 0;
  bool has_pending_bits = false;
  double spare_normal = 0.0;
  bool has_spare_normal = false;
};

RngStream make_stream(uint64_t master_seed, uint64_t stream_id);

// Raw Philox block; exposed for the known-answer tests.
void philox4x32_10(const uint32_t counter[4], const uint32_t key[2],
                   uint32_t out[4]);

// Uniform on the open interval (0,1): never 0, never 1, safe under log().
double uniform01(RngStream& s);

// Standard normal via Box-Muller on counter-based uniforms.  Pairs are
// generated together; the second value is buffered in the stream.
double normal(RngStream& s);

Eigen::VectorXd normal_vector(RngStream& s, int n);

// Sample from N(0, sigma) by Cholesky factorization.  Throws
// std::domain_error when sigma is not symmetric positive definite.
Eigen::VectorXd mvn_zero_mean(RngStream& s, const Eigen::MatrixXd& sigma);

// Uniform direction on the unit sphere in R^l (normalized iid normals).
Eigen::VectorXd uniform_sphere(RngStream& s, int l);

}  // namespace predgeom
