#ifndef BHVMC_OPTIMIZER_HPP
#define BHVMC_OPTIMIZER_HPP

#include <functional>
#include <string>
#include <vector>

#include "bhvmc/ansatz.hpp"
#include "bhvmc/hamiltonian.hpp"
#include "bhvmc/kernels.hpp"
#include "bhvmc/sampler.hpp"

namespace bhvmc {

struct SrConfig {
  double learning_rate = 1e-3;
  double diag_shift = 5e-4;
  enum class Solver { dense, cg } solver = Solver::dense;
  double cg_tol = 1e-10;
  int cg_max_iter = 5000;

  void validate() const;
};

// one-shot estimators over a batch with filled log_gradients / local_energy
Matrix estimate_qgt(const SampleBatch& batch, Exec exec = Exec::parallel);
std::vector<double> estimate_forces(const SampleBatch& batch, Exec exec = Exec::parallel);

struct SrSolveResult {
  std::vector<double> delta;  // solves (S + diag_shift I) delta = F
  double residual = 0.0;
  int iterations = 0;
};

SrSolveResult solve_sr_system(const Matrix& qgt, std::span<const double> forces,
                              const SrConfig& config);

// theta <- theta - eta * (S + lambda I)^{-1} F, applied in place
SrSolveResult sr_step(std::span<double> parameters, const Matrix& qgt,
                      std::span<const double> forces, const SrConfig& config);

struct TrainStage {
  std::string name = "all";
  bool jastrow_only = false;
  int steps = 0;
  double diag_shift = 5e-4;
};

struct TraceRow {
  int step = 0;
  double energy = 0.0;      // total, units of J
  double energy_err = 0.0;
  double energy_var = 0.0;  // population variance of the local energy
  double vscore = 0.0;
  double acceptance = 0.0;
  double wall_seconds = 0.0;
};

struct TrainConfig {
  int n_particles = 0;
  bool mf_prior = false;  // multiply in the ideal-condensate amplitude
  SamplerConfig sampler;
  SrConfig sr;
  std::vector<TrainStage> stages;
  int checkpoint_interval = 100;
  int divergence_window = 50;
  double divergence_factor = 1.0;  // abort when E exceeds the window best by
                                   // factor * (|best| + 1)
  Exec exec = Exec::parallel;

  // called at checkpoint intervals, stage boundaries and at the end
  std::function<void(int step, const AnsatzParameters&)> on_checkpoint;
  std::function<void(const TraceRow&)> on_trace;
};

// Two-stage stochastic reconfiguration: stage schedules mask the parameter
// set (Jastrow-only first, then everything); sampling restarts each step from
// per-step streams so a run is a pure function of (parameters, seed, step).
std::vector<TraceRow> train(const ModelParams& model, const LatticeGeometry& geometry,
                            AnsatzParameters& params, const TrainConfig& config,
                            int start_step = 0);

// App. C defaults: eta 1e-3, diag shift 5e-4 (Jastrow) / 1e-3 (backflow)
std::vector<TrainStage> default_stage_schedule(const BackflowShape& shape,
                                               int stage1_steps, int stage2_steps);

}  // namespace bhvmc

#endif
