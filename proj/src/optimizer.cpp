#include "bhvmc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <cstdio>
#include <numeric>

#include "bhvmc/errors.hpp"
#include "bhvmc/estimators.hpp"
#include "bhvmc/stats.hpp"

namespace bhvmc {

void SrConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("SrConfig: learning rate must be positive");
  if (diag_shift < 0.0) throw ConfigError("SrConfig: diagonal shift must be >= 0");
}

namespace {

std::vector<std::size_t> all_columns(std::size_t p) {
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

Matrix estimate_qgt(const SampleBatch& batch, Exec exec) {
  if (batch.n_samples == 0) throw SamplingError("estimate_qgt: empty batch");
  const auto centered =
      center_log_gradients(batch.log_gradients, all_columns(batch.log_gradients.cols()), exec);
  return qgt_from_centered(centered, exec);
}

std::vector<double> estimate_forces(const SampleBatch& batch, Exec exec) {
  if (batch.n_samples == 0) throw SamplingError("estimate_forces: empty batch");
  const auto centered =
      center_log_gradients(batch.log_gradients, all_columns(batch.log_gradients.cols()), exec);
  return forces_from_centered(centered, batch.local_energy, exec);
}

SrSolveResult solve_sr_system(const Matrix& qgt, std::span<const double> forces,
                              const SrConfig& config) {
  config.validate();
  const std::size_t p = forces.size();
  if (qgt.rows() != p || qgt.cols() != p)
    throw SolverError("solve_sr_system: shape mismatch");

  SrSolveResult out;
  out.delta.assign(p, 0.0);
  if (config.solver == SrConfig::Solver::dense) {
    Matrix shifted = qgt;
    for (std::size_t k = 0; k < p; ++k) shifted(k, k) += config.diag_shift;
    out.residual = cholesky_solve(shifted, forces, out.delta);
    out.iterations = 1;
  } else {
    const auto cg = cg_solve(
        [&](std::span<const double> x, std::span<double> y) {
          for (std::size_t i = 0; i < p; ++i) {
            double s = config.diag_shift * x[i];
            const double* row = qgt.row(i).data();
            for (std::size_t j = 0; j < p; ++j) s += row[j] * x[j];
            y[i] = s;
          }
        },
        forces, out.delta, config.cg_tol, config.cg_max_iter);
    out.residual = cg.residual;
    out.iterations = cg.iterations;
    if (!cg.converged)
      throw SolverError("solve_sr_system: conjugate gradient did not converge");
  }
  return out;
}

SrSolveResult sr_step(std::span<double> parameters, const Matrix& qgt,
                      std::span<const double> forces, const SrConfig& config) {
  auto result = solve_sr_system(qgt, forces, config);
  for (std::size_t k = 0; k < parameters.size(); ++k)
    parameters[k] -= config.learning_rate * result.delta[k];
  return result;
}

std::vector<TrainStage> default_stage_schedule(const BackflowShape& shape,
                                               int stage1_steps, int stage2_steps) {
  std::vector<TrainStage> stages;
  stages.push_back({"jastrow", true, stage1_steps, 5e-4});
  if (shape.has_network()) stages.push_back({"backflow", false, stage2_steps, 1e-3});
  return stages;
}

std::vector<TraceRow> train(const ModelParams& model, const LatticeGeometry& geometry,
                            AnsatzParameters& params, const TrainConfig& config,
                            int start_step) {
  model.validate();
  config.sampler.validate();
  config.sr.validate();
  if (config.n_particles < 1) throw ConfigError("train: particle count missing");
  if (config.stages.empty()) throw ConfigError("train: no stages configured");

  const int m = geometry.n_sites();
  const double nbar = static_cast<double>(config.n_particles) / m;
  const double e_mf =
      mean_field_energy(model.repulsion, model.hopping, nbar, geometry.coordination(), m);

  BackflowJastrow psi(geometry, params, config.mf_prior);
  const auto initial =
      default_initial_configuration(geometry, config.n_particles, config.sampler.seed);

  int total_steps = 0;
  for (const auto& st : config.stages) total_steps += st.steps;

  std::vector<TraceRow> trace;
  trace.reserve(total_steps - start_step);
  std::deque<double> window;
  const auto t0 = std::chrono::steady_clock::now();

  for (int step = start_step; step < total_steps; ++step) {
    // stage lookup from the global step index (stable across resume)
    int offset = step;
    const TrainStage* stage = nullptr;
    for (const auto& st : config.stages) {
      if (offset < st.steps) {
        stage = &st;
        break;
      }
      offset -= st.steps;
    }

    const std::uint64_t stream_base =
        static_cast<std::uint64_t>(step) * config.sampler.n_chains;
    auto batch = run_sampling(config.sampler, psi, geometry, initial, stream_base,
                              config.exec == Exec::parallel);
    if (batch.stuck_chain)
      std::fprintf(stderr, "warning: chain made no accepted move over a sweep window at step %d\n",
                   step);
    batch_local_energy(model, geometry, psi, batch, config.exec);

    std::vector<std::size_t> active;
    if (stage->jastrow_only) {
      batch_log_grad_jastrow(psi, batch, config.exec);
      active = params.jastrow_indices();
    } else {
      batch_log_grad(psi, batch, config.exec);
      active = all_columns(params.size());
    }

    const auto centered = center_log_gradients(batch.log_gradients, active, config.exec);
    const auto qgt = qgt_from_centered(centered, config.exec);
    const auto forces = forces_from_centered(centered, batch.local_energy, config.exec);

    SrConfig sr = config.sr;
    sr.diag_shift = stage->diag_shift;
    const auto solve = solve_sr_system(qgt, forces, sr);
    for (std::size_t k = 0; k < active.size(); ++k)
      params.flat()[active[k]] -= sr.learning_rate * solve.delta[k];

    const auto est = estimate_series(batch.local_energy, batch.n_chains);
    TraceRow row;
    row.step = step;
    row.energy = est.mean;
    row.energy_err = est.std_error;
    row.energy_var = est.variance;
    // undefined until the energy drops below the mean-field reference
    row.vscore = est.mean < e_mf ? vscore({est.mean, est.variance, e_mf, m})
                                 : std::numeric_limits<double>::quiet_NaN();
    row.acceptance = batch.acceptance_rate;
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.push_back(row);
    if (config.on_trace) config.on_trace(row);

    window.push_back(est.mean);
    while (static_cast<int>(window.size()) > config.divergence_window) window.pop_front();
    const double best = *std::min_element(window.begin(), window.end());
    if (est.mean > best + config.divergence_factor * (std::fabs(best) + 1.0))
      throw DivergenceError("train: energy diverged at step " + std::to_string(step));

    const bool last = step + 1 == total_steps;
    const bool stage_end = offset + 1 == stage->steps;
    if (config.on_checkpoint &&
        (last || stage_end ||
         (config.checkpoint_interval > 0 && (step + 1) % config.checkpoint_interval == 0)))
      config.on_checkpoint(step, params);
  }
  return trace;
}

}  // namespace bhvmc
