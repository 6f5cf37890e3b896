// Benchmark comparing the OpenMP kernels against their serial reference on a
// synthetic but representative workload.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bhvmc/estimators.hpp"
#include "bhvmc/kernels.hpp"
#include "bhvmc/optimizer.hpp"
#include "bhvmc/sampler.hpp"

using namespace bhvmc;

namespace {

double seconds(const std::function<void()>& fn, int repeats) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() /
         repeats;
}

void report(const char* name, double serial, double parallel, double max_diff) {
  std::printf("%-22s serial %8.4f s   openmp %8.4f s   speedup %5.2fx   max|diff| %.3g\n",
              name, serial, parallel, serial / parallel, max_diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

  const auto geometry = LatticeGeometry::square(8);
  const int n_particles = geometry.n_sites();
  AnsatzParameters params(geometry, {4, 8, 1});
  Rng rng(11, 0);
  params.initialize_backflow(rng);
  for (auto& w : params.jastrow()) w = -0.1 * rng.uniform();
  for (auto& a : params.mixing()) a = 0.05 * (rng.uniform() - 0.5);
  const BackflowJastrow psi(geometry, params);
  const ModelParams model{1.0, 16.8};

  SamplerConfig sampler;
  sampler.n_chains = 4;
  sampler.samples_total = 512;
  sampler.burn_in_sweeps = 20;
  sampler.seed = 3;
  const auto init = default_initial_configuration(geometry, n_particles, sampler.seed);

  auto batch_serial = run_sampling(sampler, psi, geometry, init, 0, false);
  auto batch_parallel = batch_serial;

  {
    const double ts = seconds([&] { run_sampling(sampler, psi, geometry, init, 0, false); }, 1);
    const double tp = seconds([&] { run_sampling(sampler, psi, geometry, init, 0, true); }, 1);
    const auto a = run_sampling(sampler, psi, geometry, init, 0, false);
    const auto b = run_sampling(sampler, psi, geometry, init, 0, true);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.log_psi.size(); ++i)
      diff = std::max(diff, std::fabs(a.log_psi[i] - b.log_psi[i]));
    report("sampling", ts, tp, diff);
  }

  {
    const double ts = seconds(
        [&] { batch_local_energy(model, geometry, psi, batch_serial, Exec::serial); }, 3);
    const double tp = seconds(
        [&] { batch_local_energy(model, geometry, psi, batch_parallel, Exec::parallel); }, 3);
    double diff = 0.0;
    for (std::size_t i = 0; i < batch_serial.n_samples; ++i)
      diff = std::max(diff,
                      std::fabs(batch_serial.local_energy[i] - batch_parallel.local_energy[i]));
    report("local energy", ts, tp, diff);
  }

  {
    const double ts = seconds([&] { batch_log_grad(psi, batch_serial, Exec::serial); }, 3);
    const double tp = seconds([&] { batch_log_grad(psi, batch_parallel, Exec::parallel); }, 3);
    double diff = 0.0;
    for (std::size_t i = 0; i < batch_serial.n_samples; ++i)
      for (std::size_t k = 0; k < params.size(); ++k)
        diff = std::max(diff, std::fabs(batch_serial.log_gradients(i, k) -
                                        batch_parallel.log_gradients(i, k)));
    report("log gradients", ts, tp, diff);
  }

  {
    const auto qs = [&] { return estimate_qgt(batch_serial, Exec::serial); };
    const auto qp = [&] { return estimate_qgt(batch_parallel, Exec::parallel); };
    const double ts = seconds([&] { qs(); }, 3);
    const double tp = seconds([&] { qp(); }, 3);
    const auto a = qs();
    const auto b = qp();
    double diff = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        diff = std::max(diff, std::fabs(a(i, j) - b(i, j)));
    report("quantum geom. tensor", ts, tp, diff);
  }

  {
    const auto mask = first_half_partition(geometry);
    const auto rs = [&] {
      return renyi_swap_ratios(psi, batch_serial, batch_parallel, mask, n_particles,
                               Exec::serial);
    };
    const auto rp = [&] {
      return renyi_swap_ratios(psi, batch_serial, batch_parallel, mask, n_particles,
                               Exec::parallel);
    };
    const double ts = seconds([&] { rs(); }, 3);
    const double tp = seconds([&] { rp(); }, 3);
    const auto a = rs();
    const auto b = rp();
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      diff = std::max(diff, std::fabs(a[i] - b[i]));
    report("swap ratios", ts, tp, diff);
  }

  return 0;
}
