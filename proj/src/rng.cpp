#include "predgeom/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace predgeom {
namespace {

constexpr uint32_t kWeyl0 = 0x9E3779B9u;  // golden-ratio key schedule
constexpr uint32_t kWeyl1 = 0xBB67AE85u;
constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;

inline void one_round(uint32_t c[4], const uint32_t k[2]) {
  const uint64_t p0 = static_cast<uint64_t>(kMul0) * c[0];
  const uint64_t p1 = static_cast<uint64_t>(kMul1) * c[2];
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t n0 = hi1 ^ c[1] ^ k[0];
  const uint32_t n2 = hi0 ^ c[3] ^ k[1];
  c[0] = n0;
  c[1] = lo1;
  c[2] = n2;
  c[3] = lo0;
}

// One block for stream (key, id) at position pos, returned as two 64-bit words.
inline void block_u64(const RngStream& s, uint64_t out[2]) {
  uint32_t c[4] = {static_cast<uint32_t>(s.pos),
                   static_cast<uint32_t>(s.pos >> 32),
                   static_cast<uint32_t>(s.id),
                   static_cast<uint32_t>(s.id >> 32)};
  uint32_t k[2] = {static_cast<uint32_t>(s.key),
                   static_cast<uint32_t>(s.key >> 32)};
  for (int r = 0; r < 10; ++r) {
    one_round(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  out[0] = c[0] | (static_cast<uint64_t>(c[1]) << 32);
  out[1] = c[2] | (static_cast<uint64_t>(c[3]) << 32);
}

inline double bits_to_open_unit(uint64_t x) {
  // 53 high bits, centered on half-steps: values in (0,1) exclusive.
  return (static_cast<double>(x >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

void philox4x32_10(const uint32_t counter[4], const uint32_t key[2],
                   uint32_t out[4]) {
  uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
  uint32_t k[2] = {key[0], key[1]};
  for (int r = 0; r < 10; ++r) {
    one_round(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  for (int i = 0; i < 4; ++i) out[i] = c[i];
}

RngStream make_stream(uint64_t master_seed, uint64_t stream_id) {
  RngStream s;
  s.key = master_seed;
  s.id = stream_id;
  return s;
}

double uniform01(RngStream& s) {
  if (s.has_pending_bits) {
    s.has_pending_bits = false;
    return bits_to_open_unit(s.pending_bits);
  }
  uint64_t w[2];
  block_u64(s, w);
  ++s.pos;
  s.pending_bits = w[1];
  s.has_pending_bits = true;
  return bits_to_open_unit(w[0]);
}

double normal(RngStream& s) {
  if (s.has_spare_normal) {
    s.has_spare_normal = false;
    return s.spare_normal;
  }
  const double u1 = uniform01(s);
  const double u2 = uniform01(s);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  s.spare_normal = rad * std::sin(ang);
  s.has_spare_normal = true;
  return rad * std::cos(ang);
}

Eigen::VectorXd normal_vector(RngStream& s, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(s);
  return v;
}

Eigen::VectorXd mvn_zero_mean(RngStream& s, const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::domain_error("mvn_zero_mean: sigma must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("mvn_zero_mean: sigma is not positive definite");
  return llt.matrixL() * normal_vector(s, static_cast<int>(sigma.rows()));
}

Eigen::VectorXd uniform_sphere(RngStream& s, int l) {
  for (;;) {
    Eigen::VectorXd v = normal_vector(s, l);
    const double nrm = v.norm();
    if (nrm > 1e-12) return v / nrm;
    // astronomically unlikely; draw again rather than divide by ~0
  }
}

}  // namespace predgeom
