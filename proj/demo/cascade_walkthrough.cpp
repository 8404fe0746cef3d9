// Minimal library walkthrough: simulate one cascade, then watch the
// infectiousness estimate and the final-size prediction evolve over time.

#include <cstdio>

#include "seismic/predictor.hpp"
#include "seismic/simulator.hpp"

int main() {
  using namespace seismic;

  SimConfig sim;
  sim.p = PTrajectory::exp_decay(0.015, 7200.0);
  sim.degrees = DegreeDist::poisson(50.0);
  sim.root_degree = 12000;
  sim.seed = 21;
  const Cascade cascade = simulate_cascade(sim).cascade;
  const auto final_count = reshare_count(cascade, sim.horizon);

  const MemoryKernelParams kernel = MemoryKernelParams::from_shape(300.0, 0.242);
  PredictionParams params;  // stock alpha schedule, gamma_n_star = 20
  params.n_star = 50.0;

  std::printf("%8s %8s %10s %12s    (true final: %llu)\n", "t_min", "r_t",
              "p_hat", "r_inf_hat",
              static_cast<unsigned long long>(final_count));
  for (double minutes : {10.0, 20.0, 30.0, 60.0, 120.0, 240.0, 360.0}) {
    const double t = minutes * 60.0;
    const Prediction pred = predict(cascade, t, kernel, params);
    if (pred.state == CascadeState::supercritical)
      std::printf("%8.0f %8llu %10.5f %12s\n", minutes,
                  static_cast<unsigned long long>(pred.r_t), pred.p_hat,
                  "explosive");
    else
      std::printf("%8.0f %8llu %10.5f %12.1f\n", minutes,
                  static_cast<unsigned long long>(pred.r_t), pred.p_hat,
                  pred.r_inf_hat);
  }
  return 0;
}
