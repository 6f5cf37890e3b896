// Acceptance suite: one pass/fail line per criterion.
//
//  1  gradient correctness against central finite differences
//  2  estimator exactness on the 4-site chain with exact table amplitudes
//  3  exact detailed balance over all one-hop pairs
//  4  two-stage VMC reaches the ED ground energy on the 5-site chain
//  5  analytic two-layer CNN constructions equal the direct formulas
//  6  bare-Jastrow reproduction of the published 8x8 figures at U/J = 16.8
//  7  deep-backflow stretch at U/J = 8.5 (not gating; BHVMC_STRETCH=1|full)
//  8  scaling-law fits recover planted parameters
//  9  bit-identical traces for identical seeds
// 10  smoke: one SR step at L = 16, D = 2 completes
//
// Usage: acceptance [--only N [--only M ...]] [--report FILE]
// The per-criterion lines always go to stdout and, with --report, to FILE.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "bhvmc/ansatz.hpp"
#include "bhvmc/constructions.hpp"
#include "bhvmc/estimators.hpp"
#include "bhvmc/kernels.hpp"
#include "bhvmc/optimizer.hpp"
#include "bhvmc/oracle.hpp"
#include "bhvmc/sampler.hpp"
#include "bhvmc/stats.hpp"

using namespace bhvmc;

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  bool gating = true;
  std::string detail;
};

double walltime() {
  static const auto t0 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void randomize(AnsatzParameters& params, Rng& rng, double scale = 0.3) {
  params.initialize_backflow(rng);
  for (auto& w : params.jastrow()) w = scale * (rng.uniform() - 0.5);
  for (int l = 0; l < params.shape().depth; ++l)
    for (auto& b : params.bias(l)) b = 0.2 * (rng.uniform() - 0.5);
  for (int k = 0; k < params.shape().norm_layers(); ++k) {
    for (auto& g : params.norm_gain(k)) g = 1.0 + 0.2 * (rng.uniform() - 0.5);
    for (auto& o : params.norm_offset(k)) o = 0.2 * (rng.uniform() - 0.5);
  }
  for (auto& a : params.mixing()) a = scale * (rng.uniform() - 0.5);
}

std::vector<int> random_sector_configuration(int n_sites, int n_particles, Rng& rng) {
  std::vector<int> occ(n_sites, 0);
  for (int p = 0; p < n_particles; ++p) ++occ[rng.uniform_int(n_sites)];
  return occ;
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_gradients() {
  const auto g = LatticeGeometry::square(3);
  Rng rng(2024, 0);
  double worst = 0.0;
  int checked = 0;
  for (int depth : {2, 4}) {
    for (int pair = 0; pair < 50; ++pair) {
      AnsatzParameters params(g, {depth, 4, 1});
      randomize(params, rng);
      const BackflowJastrow psi(g, params);
      const auto occ = random_sector_configuration(9, 9, rng);

      std::vector<double> analytic(params.size());
      psi.log_grad(occ, analytic);

      std::vector<double> fd(params.size());
      const double step = 1e-5;
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = params.flat()[k];
        params.flat()[k] = saved + step;
        const double up = BackflowJastrow(g, params).log_psi(occ);
        params.flat()[k] = saved - step;
        const double down = BackflowJastrow(g, params).log_psi(occ);
        params.flat()[k] = saved;
        fd[k] = (up - down) / (2.0 * step);
      }
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < params.size(); ++k) {
        num += (analytic[k] - fd[k]) * (analytic[k] - fd[k]);
        den += fd[k] * fd[k];
      }
      worst = std::max(worst, std::sqrt(num / den));
      ++checked;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d random (params, configuration) pairs, D in {2,4}; worst relative "
                "error %.2e (tolerance 1e-6)",
                checked, worst);
  return {worst < 1e-6, false, true, buf};
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_estimator_exactness() {
  const auto g = LatticeGeometry::chain(4);
  const ModelParams model{1.0, 8.0};
  FockBasis basis(4, 4);
  const auto h = build_hamiltonian_matrix(basis, g.bonds(), model.hopping,
                                          model.repulsion);
  const auto ed = ground_state(h, basis);
  const TableWavefunction table(ed.basis, ed.ground_vector);

  // (a) zero variance of the local energy across the support
  double norm = 0.0, mean = 0.0, second = 0.0;
  basis.for_each([&](std::uint64_t k, std::span<const int> n) {
    const double amp = ed.ground_vector[k];
    if (amp <= 0.0) return;
    const double w = amp * amp;
    const double e = local_energy(model, g, table, n);
    norm += w;
    mean += w * e;
    second += w * e * e;
  });
  mean /= norm;
  const double var_support = second / norm - mean * mean;
  const bool pass_a = std::fabs(var_support) < 1e-18;

  // (b) Born frequencies over one million sweeps
  SamplerConfig born_cfg;
  born_cfg.n_chains = 4;
  born_cfg.samples_total = 250000;  // x4 sweeps per sample = 1e6 sweeps
  born_cfg.sweeps_per_sample = 4;
  born_cfg.burn_in_sweeps = 200;
  born_cfg.seed = 4242;
  const auto batch = run_sampling(born_cfg, table, g, FockConfiguration::uniform(4, 1));
  std::vector<std::uint64_t> counts(basis.size(), 0);
  for (std::size_t s = 0; s < batch.n_samples; ++s)
    counts[basis.index_of(batch.configuration(s))]++;
  std::vector<double> probs(basis.size());
  for (std::uint64_t k = 0; k < basis.size(); ++k)
    probs[k] = ed.ground_vector[k] * ed.ground_vector[k];
  const auto chi2 = chi2_test(counts, probs);
  const bool pass_b = chi2.p_value > 0.01;

  // (c) swap estimator versus the exact Renyi-2 entropy
  const std::vector<int> half{0, 1};
  const double exact_s2 = exact_renyi2(ed, half);
  SamplerConfig swap_cfg;
  swap_cfg.n_chains = 4;
  swap_cfg.samples_total = 100000;
  swap_cfg.burn_in_sweeps = 100;
  swap_cfg.seed = 777;
  const auto mask = first_half_partition(g);
  const auto s2 = renyi2_swap(table, g, mask, 4, swap_cfg);
  const bool pass_c = std::fabs(s2.value - exact_s2) < 3.0 * s2.std_error;

  // (d) sampled OBDM versus the exact one
  const auto exact_obs = exact_observables(ed, g, model);
  SamplerConfig obdm_cfg;
  obdm_cfg.n_chains = 4;
  obdm_cfg.samples_total = 40000;
  obdm_cfg.burn_in_sweeps = 100;
  obdm_cfg.seed = 99;
  const auto obdm_batch =
      run_sampling(obdm_cfg, table, g, FockConfiguration::uniform(4, 1));
  const auto obdm = estimate_obdm(model, g, table, obdm_batch);
  bool pass_d = true;
  double worst_pull = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double err = std::max(obdm.errors(i, j), 1e-9);
      const double pull = std::fabs(obdm.values(i, j) - exact_obs.obdm(i, j)) / err;
      worst_pull = std::max(worst_pull, pull);
      if (pull > 3.0) pass_d = false;
    }
  }

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "var(E_loc)=%.1e (a:%s); chi2 p=%.3f (b:%s); S2 %.4f+-%.4f vs %.4f "
                "(c:%s); obdm worst pull %.2f sigma (d:%s)",
                var_support, pass_a ? "ok" : "FAIL", chi2.p_value,
                pass_b ? "ok" : "FAIL", s2.value, s2.std_error, exact_s2,
                pass_c ? "ok" : "FAIL", worst_pull, pass_d ? "ok" : "FAIL");
  return {pass_a && pass_b && pass_c && pass_d, false, true, buf};
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_detailed_balance() {
  const auto g = LatticeGeometry::chain(4);
  FockBasis basis(4, 2);
  Rng rng(31337, 0);
  std::vector<double> amp(basis.size());
  for (auto& a : amp) a = 0.1 + rng.uniform();
  const TableWavefunction table(basis, amp);

  // exact Born probabilities
  std::vector<double> p(basis.size());
  double norm = 0.0;
  for (std::uint64_t k = 0; k < basis.size(); ++k) {
    p[k] = amp[k] * amp[k];
    norm += p[k];
  }
  for (auto& v : p) v /= norm;

  double worst = 0.0;
  int pairs = 0;
  basis.for_each([&](std::uint64_t k, std::span<const int> n) {
    for (int src = 0; src < 4; ++src) {
      if (n[src] == 0) continue;
      for (int dst : {(src + 1) % 4, (src + 3) % 4}) {
        std::vector<int> next(n.begin(), n.end());
        --next[src];
        ++next[dst];
        const std::uint64_t k2 = basis.index_of(next);
        const double lr = table.log_psi(next) - table.log_psi(n);
        const double g_fwd = proposal_probability(g, n, src, dst);
        const double g_rev = proposal_probability(g, next, dst, src);
        const double flow =
            p[k] * g_fwd * acceptance_probability(lr, std::log(g_rev / g_fwd));
        const double back =
            p[k2] * g_rev * acceptance_probability(-lr, std::log(g_fwd / g_rev));
        worst = std::max(worst, std::fabs(flow - back));
        ++pairs;
      }
    }
  });
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d directed one-hop pairs, worst |p g p_acc mismatch| = %.2e "
                "(tolerance 1e-12)",
                pairs, worst);
  return {worst < 1e-12, false, true, buf};
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_vmc_vs_ed() {
  const auto g = LatticeGeometry::chain(5);
  FockBasis basis(5, 5);
  bool all_pass = true;
  std::string detail;

  for (double u_over_j : {4.0, 8.0, 20.0}) {
    const ModelParams model{1.0, u_over_j};
    const auto h = build_hamiltonian_matrix(basis, g.bonds(), model.hopping,
                                            model.repulsion);
    const auto ed = ground_state(h, basis);

    AnsatzParameters params(g, {2, 4, 1});
    Rng init_rng(5050, 0);
    params.initialize_backflow(init_rng);

    TrainConfig tc;
    tc.n_particles = 5;
    tc.sampler.n_chains = 8;
    tc.sampler.samples_total = 4096;
    tc.sampler.burn_in_sweeps = 50;
    tc.sampler.seed = 1000 + static_cast<std::uint64_t>(u_over_j);
    tc.sr.learning_rate = 5e-3;
    tc.stages = {{"jastrow", true, 300, 5e-4}, {"backflow", false, 2200, 1e-3}};
    tc.checkpoint_interval = 0;
    train(model, g, params, tc);

    const BackflowJastrow psi(g, params);
    const auto exact = exact_variational_measures(model, g, psi, basis);
    const double rel_err = std::fabs(exact.energy - ed.ground_energy) /
                           std::fabs(ed.ground_energy);
    const double e_mf = mean_field_energy(model.repulsion, model.hopping, 1.0,
                                          g.coordination(), 5);
    const double score = vscore({exact.energy, exact.energy_variance, e_mf, 5});
    const bool pass = rel_err < 1e-3 && score < 1e-3;
    all_pass = all_pass && pass;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "U/J=%.0f: E=%.6f vs E0=%.6f rel=%.1e vscore=%.1e%s",
                  u_over_j, exact.energy, ed.ground_energy, rel_err, score,
                  pass ? "" : " FAIL");
    if (!detail.empty()) detail += " | ";
    detail += buf;
  }
  return {all_pass, false, true, detail};
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_constructions() {
  const auto g3 = LatticeGeometry::square(3);
  double worst_g = 0.0;
  const std::vector<PatchSpec> patches = {
      {{{0, 0}}, {1.0}, 1.0, 2.5, 0.0, 1.0},
      {{{0, 0}}, {-1.0}, 0.7, 3.5, 2.0, 1.0},
      {{{0, 0}}, {1.0}, 1.3, 4.0, 1.0, 1.0},
  };
  for (const auto& patch : patches) {
    const auto cnn = build_gutzwiller_cnn(patch);
    std::vector<int> occ(9, 0);
    while (true) {
      worst_g = std::max(worst_g, std::fabs(gutzwiller_direct(patch, g3, occ) -
                                            evaluate_gutzwiller_cnn(cnn, patch, g3, occ)));
      int k = 0;
      while (k < 9 && occ[k] == 2) occ[k++] = 0;
      if (k == 9) break;
      ++occ[k];
    }
  }
  const bool pass_g = worst_g < 1e-10;

  const auto g5 = LatticeGeometry::square(5);
  const ConfinementSpec spec{2, {-0.9, -0.4}};
  const auto cnn = build_confinement_cnn(spec, g5);
  double worst_c = 0.0;
  int family = 0;
  for (int hole = 0; hole < 25; ++hole) {
    for (int doublon = 0; doublon < 25; ++doublon) {
      if (hole == doublon || g5.distance(hole, doublon) > spec.range) continue;
      std::vector<int> occ(25, 1);
      occ[hole] = 0;
      occ[doublon] = 2;
      worst_c = std::max(worst_c, std::fabs(confinement_direct(spec, g5, occ) -
                                            evaluate_confinement_cnn(cnn, g5, occ)));
      ++family;
    }
  }
  const bool pass_c = worst_c < 1e-10;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "gutzwiller: 3 patches x 3^9 patterns, worst |diff| %.1e; confinement: "
                "%d single-pair configurations, worst |diff| %.1e",
                worst_g, family, worst_c);
  return {pass_g && pass_c, false, true, buf};
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_table2_bare_jastrow() {
  const auto g = LatticeGeometry::square(8);
  const ModelParams model{1.0, 16.8};
  AnsatzParameters params(g, {});

  TrainConfig tc;
  tc.n_particles = 64;
  tc.sampler.n_chains = 8;
  tc.sampler.samples_total = 8192;
  tc.sampler.burn_in_sweeps = 100;
  tc.sampler.seed = 8864;
  tc.sr.learning_rate = 1e-3;
  tc.stages = {{"jastrow", true, 2000, 5e-4}};
  tc.checkpoint_interval = 0;
  train(model, g, params, tc);

  const BackflowJastrow psi(g, params);
  SamplerConfig measure = tc.sampler;
  const auto init = default_initial_configuration(g, 64, measure.seed);
  auto batch = run_sampling(measure, psi, g, init, 1ULL << 41);
  batch_local_energy(model, g, psi, batch);
  const auto est = estimate_series(batch.local_energy, batch.n_chains);
  const double e_per_site = est.mean / 64.0;
  const double e_mf = mean_field_energy(16.8, 1.0, 1.0, 4, 64);
  const double score = vscore({est.mean, est.variance, e_mf, 64});

  const bool pass_e = std::fabs(e_per_site - (-0.452)) < 0.010;
  const bool pass_v = score > 8.4e-2 / 2.0 && score < 8.4e-2 * 2.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "E/JL^2 = %.4f +- %.4f (published -0.452(2), tolerance 0.010)%s; "
                "vscore %.3e (published 8.4e-2, within x2)%s",
                e_per_site, est.std_error / 64.0, pass_e ? "" : " FAIL", score,
                pass_v ? "" : " FAIL");
  return {pass_e && pass_v, false, true, buf};
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_depth_stretch() {
  const char* mode = std::getenv("BHVMC_STRETCH");
  if (!mode || std::string(mode).empty()) {
    return {true, true, false,
            "long-running reproduction; enable with BHVMC_STRETCH=1 (reduced, "
            "alpha=4) or BHVMC_STRETCH=full (alpha=12, published scale)"};
  }
  const bool full = std::string(mode) == "full";
  const int alpha = full ? 12 : 4;
  const std::size_t samples = full ? 8192 : 1024;
  const int stage2 = full ? 2000 : 500;

  const auto g = LatticeGeometry::square(8);
  const ModelParams model{1.0, 8.5};
  const double e_mf = mean_field_energy(8.5, 1.0, 1.0, 4, 64);

  std::map<int, double> scores;
  std::map<int, double> energies;
  for (int depth : {0, 2, 4}) {
    AnsatzParameters params(g, {depth, depth > 0 ? alpha : 0, 1});
    Rng init_rng(7777, depth);
    params.initialize_backflow(init_rng);

    TrainConfig tc;
    tc.n_particles = 64;
    tc.sampler.n_chains = 8;
    tc.sampler.samples_total = samples;
    tc.sampler.burn_in_sweeps = 60;
    tc.sampler.seed = 8500 + depth;
    tc.sr.learning_rate = full ? 1e-3 : 3e-3;
    tc.stages = {{"jastrow", true, full ? 1500 : 500, 5e-4}};
    if (depth > 0) tc.stages.push_back({"backflow", false, stage2, 1e-3});
    tc.checkpoint_interval = 0;
    train(model, g, params, tc);

    const BackflowJastrow psi(g, params);
    SamplerConfig measure = tc.sampler;
    measure.samples_total = 8192;
    const auto init = default_initial_configuration(g, 64, measure.seed);
    auto batch = run_sampling(measure, psi, g, init, 1ULL << 41);
    batch_local_energy(model, g, psi, batch);
    const auto est = estimate_series(batch.local_energy, batch.n_chains);
    scores[depth] = vscore({est.mean, est.variance, e_mf, 64});
    energies[depth] = est.mean / 64.0;
  }
  const bool monotone = scores[2] < scores[0] && scores[4] < scores[2];
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "%s mode: E/JL^2 by depth {0: %.4f, 2: %.4f, 4: %.4f} (published "
                "-1.5447); vscore {0: %.2e, 2: %.2e, 4: %.2e} monotone: %s",
                full ? "full" : "reduced", energies[0], energies[2], energies[4],
                scores[0], scores[2], scores[4], monotone ? "yes" : "NO");
  return {monotone, false, false, buf};
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_fit_recovery() {
  Rng rng(606, 0);
  const double a = 50.0, b = 0.06, c = 0.7;
  std::vector<FitPoint> data;
  for (double x = 0.02; x <= 0.121; x += 0.005) {
    const double f = std::pow(softplus(a, x - b), c);
    data.push_back({x, f * (1.0 + 0.001 * (2.0 * rng.uniform() - 1.0)),
                    0.001 * std::max(f, 1e-4)});
  }
  const auto fit = fit_scaling_function(data);
  const double err_b = std::fabs(fit.parameters[1] - b) / b;
  const double err_c = std::fabs(fit.parameters[2] - c) / c;
  const bool pass_scaling = fit.converged && err_b < 0.01 && err_c < 0.01;

  // wide size range and replicated measurements keep the log term identifiable
  std::vector<FitPoint> entropy;
  for (double l : {4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0}) {
    for (int rep = 0; rep < 5; ++rep) {
      const double y = 0.5 * l + 0.5 * std::log(l) + 1.0;
      entropy.push_back({l, y * (1.0 + 0.001 * (2.0 * rng.uniform() - 1.0)), 0.001 * y});
    }
  }
  const auto efit = fit_entropy_scaling(entropy, true, false);
  const double err_ea = std::fabs(efit.parameters[0] - 0.5) / 0.5;
  const double err_eb = std::fabs(efit.parameters[1] - 0.5) / 0.5;
  const double err_ec = std::fabs(efit.parameters[2] - 1.0) / 1.0;
  const bool pass_entropy = err_ea < 0.01 && err_eb < 0.01 && err_ec < 0.01;

  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "softplus fit rel. errors b %.2e c %.2e (tol 1%%)%s; entropy law "
                "errors a %.2e b %.2e c %.2e%s",
                err_b, err_c, pass_scaling ? "" : " FAIL", err_ea, err_eb, err_ec,
                pass_entropy ? "" : " FAIL");
  return {pass_scaling && pass_entropy, false, true, buf};
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_determinism() {
  const auto g = LatticeGeometry::chain(4);
  const ModelParams model{1.0, 8.0};

  auto run_once = [&]() {
    AnsatzParameters params(g, {2, 3, 1});
    Rng rng(909, 0);
    params.initialize_backflow(rng);
    TrainConfig tc;
    tc.n_particles = 4;
    tc.sampler.n_chains = 4;
    tc.sampler.samples_total = 512;
    tc.sampler.burn_in_sweeps = 20;
    tc.sampler.seed = 55;
    tc.stages = default_stage_schedule(params.shape(), 40, 40);
    tc.checkpoint_interval = 0;
    const auto trace = train(model, g, params, tc);
    return std::make_pair(
        std::vector<double>(params.flat().begin(), params.flat().end()), trace);
  };
  const auto [p1, t1] = run_once();
  const auto [p2, t2] = run_once();

  bool pass = p1.size() == p2.size() && t1.size() == t2.size();
  if (pass)
    pass = std::memcmp(p1.data(), p2.data(), p1.size() * sizeof(double)) == 0;
  auto same = [](double x, double y) {
    return std::memcmp(&x, &y, sizeof(double)) == 0;
  };
  for (std::size_t k = 0; pass && k < t1.size(); ++k)
    pass = same(t1[k].energy, t2[k].energy) && same(t1[k].energy_err, t2[k].energy_err) &&
           same(t1[k].energy_var, t2[k].energy_var) && same(t1[k].vscore, t2[k].vscore) &&
           same(t1[k].acceptance, t2[k].acceptance);
  return {pass, false, true,
          pass ? "two 80-step runs: parameters and traces bit-identical"
               : "trace or parameter mismatch between identical runs"};
}

// ---------------------------------------------------------------- criterion 10
Outcome criterion_large_lattice_smoke() {
  const auto g = LatticeGeometry::square(16);
  const ModelParams model{1.0, 16.8};
  AnsatzParameters params(g, {2, 12, 1});
  Rng rng(1616, 0);
  params.initialize_backflow(rng);

  TrainConfig tc;
  tc.n_particles = 256;
  tc.sampler.n_chains = 4;
  tc.sampler.samples_total = 256;
  tc.sampler.burn_in_sweeps = 20;
  tc.sampler.seed = 16;
  tc.stages = {{"backflow", false, 1, 1e-3}};
  tc.checkpoint_interval = 0;
  const auto trace = train(model, g, params, tc);
  const bool pass = trace.size() == 1 && std::isfinite(trace[0].energy);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "one full SR step at L=16, D=2 (%zu parameters): E/JL^2 = %.3f",
                params.size(), trace[0].energy / 256.0);
  return {pass, false, true, buf};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::FILE* report = nullptr;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only.insert(std::atoi(argv[++i]));
    else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc)
      report = std::fopen(argv[++i], "w");
  }

  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const std::vector<Entry> entries = {
      {1, "gradient correctness", criterion_gradients},
      {2, "estimator exactness (table ansatz)", criterion_estimator_exactness},
      {3, "detailed balance", criterion_detailed_balance},
      {4, "VMC vs ED on the 5-site chain", criterion_vmc_vs_ed},
      {5, "two-layer CNN constructions", criterion_constructions},
      {6, "8x8 bare Jastrow at U/J = 16.8", criterion_table2_bare_jastrow},
      {7, "depth stretch at U/J = 8.5", criterion_depth_stretch},
      {8, "fit recovery on synthetic data", criterion_fit_recovery},
      {9, "seed determinism", criterion_determinism},
      {10, "L = 16 smoke step", criterion_large_lattice_smoke},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    if (!only.empty() && !only.count(entry.id)) continue;
    const double t0 = walltime();
    Outcome out;
    try {
      out = entry.fn();
    } catch (const std::exception& e) {
      out = {false, false, true, std::string("exception: ") + e.what()};
    }
    const char* tag = out.skipped ? "SKIP" : (out.pass ? "PASS" : "FAIL");
    char line[640];
    std::snprintf(line, sizeof(line), "[%s] %2d %-38s (%.1fs) %s\n", tag, entry.id,
                  entry.name, walltime() - t0, out.detail.c_str());
    std::fputs(line, stdout);
    std::fflush(stdout);
    if (report) {
      std::fputs(line, report);
      std::fflush(report);
    }
    if (!out.pass && !out.skipped && out.gating) ++failures;
  }
  if (failures > 0) std::printf("%d gating criterion(s) failed\n", failures);
  if (report) std::fclose(report);
  return failures == 0 ? 0 : 1;
}
