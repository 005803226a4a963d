// Compares the production circle-risk kernel (OpenMP over trials, radial
// KL reduction) against itself at one thread and against the serial 2-D
// reference route.  Exercises the thread-invariance guarantee and shows the
// speed gap that justifies keeping two routes around.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "predgeom/risk.hpp"

namespace {

double time_run(predgeom::RiskEstimate (*fn)(const predgeom::CircleRiskConfig&),
                const predgeom::CircleRiskConfig& cfg,
                predgeom::RiskEstimate& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = fn(cfg);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const bool smoke = argc > 1 && std::string(argv[1]) == "--smoke";
  predgeom::CircleRiskConfig cfg;
  cfg.n = 25;
  cfg.sigma2 = 1.0;
  cfg.trials = smoke ? 200 : 20000;
  cfg.seed = 99;

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  predgeom::RiskEstimate serial_est;
  const double t_serial = time_run(predgeom::run_circle_risk, cfg, serial_est);

#ifdef _OPENMP
  omp_set_num_threads(max_threads);
#endif
  predgeom::RiskEstimate parallel_est;
  const double t_parallel =
      time_run(predgeom::run_circle_risk, cfg, parallel_est);

  bool identical = true;
  for (int i = 0; i < 3; ++i)
    identical = identical &&
                serial_est.mean_risk[i] == parallel_est.mean_risk[i] &&
                serial_est.stderr_risk[i] == parallel_est.stderr_risk[i] &&
                serial_est.diff_vs_first[i] == parallel_est.diff_vs_first[i];

  predgeom::CircleRiskConfig ref_cfg = cfg;
  ref_cfg.trials = smoke ? 50 : 500;
  predgeom::RiskEstimate ref_est;
  const double t_ref =
      time_run(predgeom::run_circle_risk_reference, ref_cfg, ref_est);
  predgeom::RiskEstimate fast_small;
  time_run(predgeom::run_circle_risk, ref_cfg, fast_small);
  const double route_gap =
      std::abs(ref_est.mean_risk[2] - fast_small.mean_risk[2]);

  std::printf("radial kernel, 1 thread : %8.0f trials/s (%.3f s, %ld trials)\n",
              cfg.trials / t_serial, t_serial, cfg.trials);
  std::printf("radial kernel, %d thread%s: %8.0f trials/s (%.3f s), speedup %.2fx\n",
              max_threads, max_threads == 1 ? " " : "s",
              cfg.trials / t_parallel, t_parallel, t_serial / t_parallel);
  std::printf("2-D reference, serial   : %8.0f trials/s (%.3f s, %ld trials)\n",
              ref_cfg.trials / t_ref, t_ref, ref_cfg.trials);
  std::printf("thread invariance       : %s\n",
              identical ? "bitwise identical" : "MISMATCH");
  std::printf("route agreement         : |mean KL gap| = %.3e over %ld trials\n",
              route_gap, ref_cfg.trials);

  if (!identical) {
    std::fprintf(stderr, "error: results depend on thread count\n");
    return 1;
  }
  if (!(route_gap < 1e-6)) {
    std::fprintf(stderr, "error: radial and 2-D routes disagree\n");
    return 1;
  }
  return 0;
}
