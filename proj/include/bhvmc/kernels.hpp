#ifndef BHVMC_KERNELS_HPP
#define BHVMC_KERNELS_HPP

#include <span>
#include <vector>

#include "bhvmc/ansatz.hpp"
#include "bhvmc/hamiltonian.hpp"
#include "bhvmc/lattice.hpp"
#include "bhvmc/linalg.hpp"
#include "bhvmc/sample_batch.hpp"
#include "bhvmc/wavefunction.hpp"

namespace bhvmc {

// Batch kernels over Monte Carlo samples. Every kernel has an OpenMP path and
// a serial reference path selected by `Exec`; both produce bit-identical
// results for any thread count (per-slot writes, index-ordered reductions).
// tools/bench.cpp compares their throughput.
enum class Exec { serial, parallel };

// per-sample local energies, written into batch.local_energy
void batch_local_energy(const ModelParams& model, const LatticeGeometry& geometry,
                        const Wavefunction& psi, SampleBatch& batch,
                        Exec exec = Exec::parallel);

// per-sample log-gradients, written into batch.log_gradients (n_samples x P)
void batch_log_grad(const BackflowJastrow& psi, SampleBatch& batch,
                    Exec exec = Exec::parallel);
// Jastrow-subblock gradients only (stage 1); fills the first n_jastrow columns
void batch_log_grad_jastrow(const BackflowJastrow& psi, SampleBatch& batch,
                            Exec exec = Exec::parallel);

// Centered log-gradients stored transposed (P x M) for contiguous row dots,
// plus the column means.
struct CenteredGradients {
  Matrix centered_t;  // n_params x n_samples
  std::vector<double> means;
  std::size_t n_samples = 0;
};

CenteredGradients center_log_gradients(const Matrix& log_gradients,
                                       std::span<const std::size_t> active_columns,
                                       Exec exec = Exec::parallel);

// S_kk' = E[O_k O_k'] - E[O_k] E[O_k'] over the active columns
Matrix qgt_from_centered(const CenteredGradients& centered, Exec exec = Exec::parallel);

// F_k = E[O_k E_loc] - E[O_k] E[E_loc]
std::vector<double> forces_from_centered(const CenteredGradients& centered,
                                         std::span<const double> local_energies,
                                         Exec exec = Exec::parallel);

// swap-estimator ratios for the Renyi-2 entropy; one value per sample pair
std::vector<double> renyi_swap_ratios(const Wavefunction& psi, const SampleBatch& a,
                                      const SampleBatch& b,
                                      std::span<const std::uint8_t> in_partition,
                                      int n_particles, Exec exec = Exec::parallel);

}  // namespace bhvmc

#endif
