#include <doctest.h>

#include <cmath>

#include "bhvmc/estimators.hpp"
#include "bhvmc/kernels.hpp"
#include "bhvmc/optimizer.hpp"
#include "bhvmc/oracle.hpp"
#include "bhvmc/sampler.hpp"
#include "test_support.hpp"

using namespace bhvmc;
using namespace bhvmc::test;

namespace {

SampleBatch sampled_batch(const LatticeGeometry& g, const BackflowJastrow& psi,
                          std::size_t n_samples, std::uint64_t seed,
                          int n_chains = 4) {
  SamplerConfig cfg;
  cfg.n_chains = n_chains;
  cfg.samples_total = n_samples;
  cfg.burn_in_sweeps = 20;
  cfg.seed = seed;
  const auto init = default_initial_configuration(g, g.n_sites(), seed);
  return run_sampling(cfg, psi, g, init);
}

}  // namespace

TEST_CASE("serial and parallel kernels are bit-identical") {
  const auto g = LatticeGeometry::square(3);
  AnsatzParameters p(g, {2, 4, 1});
  Rng rng(31, 0);
  randomize_parameters(p, rng);
  const BackflowJastrow psi(g, p);
  const ModelParams model{1.0, 8.0};

  auto batch_a = sampled_batch(g, psi, 256, 5);
  auto batch_b = batch_a;

  batch_local_energy(model, g, psi, batch_a, Exec::serial);
  batch_local_energy(model, g, psi, batch_b, Exec::parallel);
  CHECK(batch_a.local_energy == batch_b.local_energy);

  batch_log_grad(psi, batch_a, Exec::serial);
  batch_log_grad(psi, batch_b, Exec::parallel);
  for (std::size_t s = 0; s < batch_a.n_samples; ++s)
    for (std::size_t k = 0; k < p.size(); ++k)
      CHECK(batch_a.log_gradients(s, k) == batch_b.log_gradients(s, k));

  const auto qgt_s = estimate_qgt(batch_a, Exec::serial);
  const auto qgt_p = estimate_qgt(batch_b, Exec::parallel);
  for (std::size_t i = 0; i < qgt_s.rows(); ++i)
    for (std::size_t j = 0; j < qgt_s.cols(); ++j)
      CHECK(qgt_s(i, j) == qgt_p(i, j));

  const auto f_s = estimate_forces(batch_a, Exec::serial);
  const auto f_p = estimate_forces(batch_b, Exec::parallel);
  CHECK(f_s == f_p);

  const auto mask = first_half_partition(g);
  const auto r_s = renyi_swap_ratios(psi, batch_a, batch_b, mask, 9, Exec::serial);
  const auto r_p = renyi_swap_ratios(psi, batch_a, batch_b, mask, 9, Exec::parallel);
  CHECK(r_s == r_p);
}

TEST_CASE("qgt and forces on tiny hand batches") {
  SUBCASE("single repeated sample gives zero covariance") {
    SampleBatch batch;
    batch.n_samples = 3;
    batch.log_gradients = Matrix(3, 1, 0.7);  // identical rows
    batch.local_energy = {2.0, 2.0, 2.0};
    const auto s = estimate_qgt(batch);
    CHECK(s(0, 0) == doctest::Approx(0.0));
    const auto f = estimate_forces(batch);
    CHECK(f[0] == doctest::Approx(0.0));
  }

  SUBCASE("variance of {0, 2} is one") {
    SampleBatch batch;
    batch.n_samples = 2;
    batch.log_gradients = Matrix(2, 1);
    batch.log_gradients(0, 0) = 0.0;
    batch.log_gradients(1, 0) = 2.0;
    batch.local_energy = {0.0, 2.0};
    const auto s = estimate_qgt(batch);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    // F = E[O E] - E[O] E[E] = 2 - 1 = 1
    const auto f = estimate_forces(batch);
    CHECK(f[0] == doctest::Approx(1.0));
  }

  SUBCASE("constant local energy gives zero forces") {
    SampleBatch batch;
    batch.n_samples = 4;
    batch.log_gradients = Matrix(4, 2);
    Rng rng(1, 0);
    for (int s = 0; s < 4; ++s)
      for (int k = 0; k < 2; ++k) batch.log_gradients(s, k) = rng.uniform();
    batch.local_energy = {3.0, 3.0, 3.0, 3.0};
    const auto f = estimate_forces(batch);
    CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("sampled qgt and forces match full-basis expectations") {
  // bare Jastrow on the 4-site chain: exact S and F by basis enumeration
  const auto g = LatticeGeometry::chain(4);
  AnsatzParameters p(g, {});
  Rng rng(17, 0);
  for (auto& w : p.jastrow()) w = 0.4 * (rng.uniform() - 0.5);
  const BackflowJastrow psi(g, p);
  const ModelParams model{1.0, 4.0};
  FockBasis basis(4, 4);

  // exact expectations under the Born distribution
  const auto probs = born_probabilities(psi, basis);
  const std::size_t np = p.size();
  std::vector<double> mean_o(np, 0.0), mean_oe(np, 0.0);
  Matrix mean_oo(np, np, 0.0);
  double mean_e = 0.0;
  basis.for_each([&](std::uint64_t k, std::span<const int> n) {
    std::vector<double> o(np);
    psi.log_grad(n, o);
    const double e = local_energy(model, g, psi, n);
    mean_e += probs[k] * e;
    for (std::size_t a = 0; a < np; ++a) {
      mean_o[a] += probs[k] * o[a];
      mean_oe[a] += probs[k] * o[a] * e;
      for (std::size_t b = 0; b < np; ++b) mean_oo(a, b) += probs[k] * o[a] * o[b];
    }
  });

  auto batch = sampled_batch(g, psi, 100000, 23, 20);
  batch_local_energy(model, g, psi, batch);
  batch_log_grad(psi, batch);
  const auto qgt = estimate_qgt(batch);
  const auto forces = estimate_forces(batch);

  // per-entry error bars from the centered product series (chain-aware)
  const std::size_t n = batch.n_samples;
  std::vector<double> e_mean_sub(n);
  double e_bar = 0.0;
  for (std::size_t s = 0; s < n; ++s) e_bar += batch.local_energy[s];
  e_bar /= n;
  for (std::size_t s = 0; s < n; ++s) e_mean_sub[s] = batch.local_energy[s] - e_bar;

  std::vector<double> product(n);
  for (std::size_t a = 0; a < np; ++a) {
    double o_bar_a = 0.0;
    for (std::size_t s = 0; s < n; ++s) o_bar_a += batch.log_gradients(s, a);
    o_bar_a /= n;
    for (std::size_t s = 0; s < n; ++s)
      product[s] = (batch.log_gradients(s, a) - o_bar_a) * e_mean_sub[s];
    const auto est_f = estimate_series(product, batch.n_chains);
    const double exact_f = mean_oe[a] - mean_o[a] * mean_e;
    CHECK(std::fabs(forces[a] - exact_f) < 4.0 * est_f.std_error + 1e-4);

    for (std::size_t b = 0; b < np; ++b) {
      double o_bar_b = 0.0;
      for (std::size_t s = 0; s < n; ++s) o_bar_b += batch.log_gradients(s, b);
      o_bar_b /= n;
      for (std::size_t s = 0; s < n; ++s)
        product[s] = (batch.log_gradients(s, a) - o_bar_a) *
                     (batch.log_gradients(s, b) - o_bar_b);
      const auto est_s = estimate_series(product, batch.n_chains);
      const double exact_s = mean_oo(a, b) - mean_o[a] * mean_o[b];
      CHECK(std::fabs(qgt(a, b) - exact_s) < 4.0 * est_s.std_error + 1e-5);
    }
  }

  SUBCASE("sampled qgt is symmetric with non-negative spectrum") {
    for (std::size_t a = 0; a < np; ++a)
      for (std::size_t b = 0; b < np; ++b) CHECK(qgt(a, b) == qgt(b, a));
    const auto ed = symmetric_eigen(qgt);
    // numerical zero for a covariance accumulated over 1e5 samples
    CHECK(ed.values[0] > -1e-9);
  }
}
