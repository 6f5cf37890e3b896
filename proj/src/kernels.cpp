#include "bhvmc/kernels.hpp"

#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bhvmc/errors.hpp"

namespace bhvmc {

void batch_local_energy(const ModelParams& model, const LatticeGeometry& geometry,
                        const Wavefunction& psi, SampleBatch& batch, Exec exec) {
  batch.local_energy.resize(batch.n_samples);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(batch.n_samples); ++s) {
    batch.local_energy[s] = local_energy(model, geometry, psi, batch.configuration(s),
                                         batch.log_psi[s]);
  }
}

void batch_log_grad(const BackflowJastrow& psi, SampleBatch& batch, Exec exec) {
  const std::size_t p = psi.parameters().size();
  batch.log_gradients = Matrix(batch.n_samples, p);
  const bool par = exec == Exec::parallel;
#pragma omp parallel if (par)
  {
    BackflowWorkspace ws;
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(batch.n_samples); ++s)
      psi.log_grad(batch.configuration(s), batch.log_gradients.row(s), ws);
  }
}

void batch_log_grad_jastrow(const BackflowJastrow& psi, SampleBatch& batch, Exec exec) {
  const std::size_t p = psi.parameters().size();
  const std::size_t nw = psi.parameters().n_jastrow();
  batch.log_gradients = Matrix(batch.n_samples, p);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(batch.n_samples); ++s)
    psi.log_grad_jastrow_only(batch.configuration(s),
                              batch.log_gradients.row(s).first(nw));
}

CenteredGradients center_log_gradients(const Matrix& log_gradients,
                                       std::span<const std::size_t> active_columns,
                                       Exec exec) {
  const std::size_t n = log_gradients.rows();
  const std::size_t p = active_columns.size();
  if (n == 0) throw SamplingError("center_log_gradients: empty batch");

  CenteredGradients out;
  out.n_samples = n;
  out.means.assign(p, 0.0);
  out.centered_t = Matrix(p, n);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(p); ++k) {
    const std::size_t col = active_columns[k];
    double mean = 0.0;
    for (std::size_t s = 0; s < n; ++s) mean += log_gradients(s, col);
    mean /= n;
    out.means[k] = mean;
    double* row = out.centered_t.row(k).data();
    for (std::size_t s = 0; s < n; ++s) row[s] = log_gradients(s, col) - mean;
  }
  return out;
}

Matrix qgt_from_centered(const CenteredGradients& centered, Exec exec) {
  const std::size_t p = centered.centered_t.rows();
  const std::size_t n = centered.n_samples;
  Matrix s(p, p);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 4) if (par)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(p); ++k) {
    const double* rk = centered.centered_t.row(k).data();
    for (std::size_t l = k; l < p; ++l) {
      const double* rl = centered.centered_t.row(l).data();
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += rk[i] * rl[i];
      acc /= n;
      s(k, l) = acc;
      s(l, k) = acc;
    }
  }
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t l = 0; l < p; ++l)
      if (!std::isfinite(s(k, l))) throw SamplingError("qgt: non-finite entry");
  return s;
}

std::vector<double> forces_from_centered(const CenteredGradients& centered,
                                         std::span<const double> local_energies,
                                         Exec exec) {
  const std::size_t p = centered.centered_t.rows();
  const std::size_t n = centered.n_samples;
  if (local_energies.size() != n)
    throw SamplingError("forces: local energy count mismatch");
  const double e_mean =
      std::accumulate(local_energies.begin(), local_energies.end(), 0.0) / n;
  std::vector<double> f(p, 0.0);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(p); ++k) {
    const double* rk = centered.centered_t.row(k).data();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += rk[i] * (local_energies[i] - e_mean);
    f[k] = acc / n;
    if (!std::isfinite(f[k])) throw SamplingError("forces: non-finite entry");
  }
  return f;
}

std::vector<double> renyi_swap_ratios(const Wavefunction& psi, const SampleBatch& a,
                                      const SampleBatch& b,
                                      std::span<const std::uint8_t> in_partition,
                                      int n_particles, Exec exec) {
  if (a.n_samples != b.n_samples || a.n_sites != b.n_sites)
    throw SamplingError("renyi_swap_ratios: replica batches differ in shape");
  const int m = a.n_sites;
  std::vector<double> ratios(a.n_samples, 0.0);
  const bool par = exec == Exec::parallel;
#pragma omp parallel if (par)
  {
    std::vector<int> swap1(m), swap2(m);
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(a.n_samples); ++s) {
      const auto na = a.configuration(s);
      const auto nb = b.configuration(s);
      int total1 = 0;
      for (int i = 0; i < m; ++i) {
        swap1[i] = in_partition[i] ? nb[i] : na[i];
        swap2[i] = in_partition[i] ? na[i] : nb[i];
        total1 += swap1[i];
      }
      // the swapped configurations leave the fixed-N sector together
      if (total1 != n_particles) {
        ratios[s] = 0.0;
        continue;
      }
      const double log_ratio =
          psi.log_psi(swap1) + psi.log_psi(swap2) - a.log_psi[s] - b.log_psi[s];
      ratios[s] = std::isfinite(log_ratio) ? std::exp(log_ratio) : 0.0;
    }
  }
  return ratios;
}

}  // namespace bhvmc
