#include "bhvmc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bhvmc/errors.hpp"

namespace bhvmc {

void SamplerConfig::validate() const {
  if (n_chains < 1 || burn_in_sweeps < 0 || sweeps_per_sample < 1 || samples_total < 1)
    throw ConfigError("SamplerConfig: all counts must be positive");
  if (samples_total % static_cast<std::size_t>(n_chains) != 0)
    throw ConfigError("SamplerConfig: samples_total must divide evenly over chains");
}

OccupationIndex::OccupationIndex(std::span<const int> occupations)
    : size_(static_cast<int>(occupations.size())) {
  tree_.assign(size_ + 1, 0);
  for (int i = 0; i < size_; ++i) {
    total_ += occupations[i];
    for (int k = i + 1; k <= size_; k += k & -k) tree_[k] += occupations[i];
  }
}

int OccupationIndex::prefix(int i) const {
  int s = 0;
  for (int k = i; k > 0; k -= k & -k) s += tree_[k];
  return s;
}

int OccupationIndex::sample_site(Rng& rng) const {
  // target in [0, total): find the first site whose cumulative sum exceeds it
  const int target = static_cast<int>(rng.uniform_int(total_));
  int pos = 0;
  int remaining = target;
  int mask = 1;
  while ((mask << 1) <= size_) mask <<= 1;
  for (; mask > 0; mask >>= 1) {
    const int next = pos + mask;
    if (next <= size_ && tree_[next] <= remaining) {
      pos = next;
      remaining -= tree_[next];
    }
  }
  return pos;  // 0-based site with prefix(pos) <= target < prefix(pos+1)
}

void OccupationIndex::apply_hop(int src, int dst) {
  for (int k = src + 1; k <= size_; k += k & -k) tree_[k] -= 1;
  for (int k = dst + 1; k <= size_; k += k & -k) tree_[k] += 1;
}

double proposal_probability(const LatticeGeometry& geometry,
                            std::span<const int> occupations, int src, int dst) {
  const int total = std::accumulate(occupations.begin(), occupations.end(), 0);
  const int z = geometry.coordination();
  int multiplicity = 0;
  const auto& table = geometry.neighbor_table();
  for (int slot = 0; slot < z; ++slot)
    if (table[src * z + slot] == dst) ++multiplicity;
  return (static_cast<double>(occupations[src]) / total) *
         (static_cast<double>(multiplicity) / z);
}

double acceptance_probability(double log_psi_ratio, double log_g_ratio) {
  if (std::isnan(log_psi_ratio))
    throw SamplingError("acceptance_probability: NaN log-amplitude ratio");
  return std::min(1.0, std::exp(2.0 * log_psi_ratio + log_g_ratio));
}

ChainState::ChainState(const LatticeGeometry& geometry, const Wavefunction& psi,
                       FockConfiguration initial, Rng rng)
    : geometry_(&geometry),
      psi_(&psi),
      current_(std::move(initial)),
      index_(current_.occupations()),
      rng_(rng) {
  if (current_.total() < 1) throw SamplingError("ChainState: no particles");
  current_log_psi_ = psi_->log_psi(current_.occupations());
  if (!std::isfinite(current_log_psi_))
    throw SamplingError("ChainState: initial configuration outside support");
}

HopProposal ChainState::propose_hop() {
  HopProposal p;
  p.src = index_.sample_site(rng_);
  const int z = geometry_->coordination();
  const int slot = static_cast<int>(rng_.uniform_int(z));
  p.dst = geometry_->neighbor_table()[p.src * z + slot];
  p.log_g_ratio = std::log((current_[p.dst] + 1.0) / current_[p.src]);
  return p;
}

bool ChainState::metropolis_step() {
  const HopProposal p = propose_hop();
  ++proposed_;
  const double lr =
      psi_->log_psi_ratio(current_.occupations(), current_log_psi_, p.src, p.dst);
  if (std::isnan(lr) || lr == std::numeric_limits<double>::infinity())
    throw SamplingError("metropolis_step: non-finite log-amplitude ratio");
  const double p_acc = acceptance_probability(lr, p.log_g_ratio);
  if (rng_.uniform() < p_acc) {
    current_.apply_hop(p.src, p.dst);
    index_.apply_hop(p.src, p.dst);
    current_log_psi_ += lr;
    ++accepted_;
    ++accepted_window_;
    if (++since_resync_ >= 4096) {
      current_log_psi_ = psi_->log_psi(current_.occupations());
      since_resync_ = 0;
    }
    return true;
  }
  return false;
}

void ChainState::sweep() {
  const int moves = current_.total();
  for (int k = 0; k < moves; ++k) metropolis_step();
}

FockConfiguration default_initial_configuration(const LatticeGeometry& geometry,
                                                int n_particles, std::uint64_t seed) {
  const int m = geometry.n_sites();
  if (n_particles % m == 0)
    return FockConfiguration::uniform(m, n_particles / m);
  std::vector<int> occ(m, n_particles / m);
  int rest = n_particles - m * (n_particles / m);
  Rng rng(seed, 0xF0CC);
  while (rest > 0) {
    ++occ[rng.uniform_int(m)];
    --rest;
  }
  return FockConfiguration(std::move(occ));
}

SampleBatch run_sampling(const SamplerConfig& config, const Wavefunction& psi,
                         const LatticeGeometry& geometry,
                         const FockConfiguration& initial,
                         std::uint64_t seed_stream_base, bool parallel) {
  config.validate();
  if (initial.n_sites() != geometry.n_sites())
    throw ConfigError("run_sampling: initial configuration does not fit the lattice");

  const int m = geometry.n_sites();
  const std::size_t per_chain = config.samples_total / config.n_chains;

  SampleBatch batch;
  batch.n_sites = m;
  batch.n_chains = config.n_chains;
  batch.n_samples = config.samples_total;
  batch.configurations.resize(config.samples_total * m);
  batch.log_psi.resize(config.samples_total);
  batch.chain_acceptance.assign(config.n_chains, 0.0);

  std::vector<std::uint8_t> stuck(config.n_chains, 0);

#pragma omp parallel for schedule(static, 1) if (parallel)
  for (int c = 0; c < config.n_chains; ++c) {
    ChainState chain(geometry, psi, initial,
                     Rng(config.seed, seed_stream_base + c));
    for (int s = 0; s < config.burn_in_sweeps; ++s) chain.sweep();
    chain.reset_window();
    std::uint64_t window_sweeps = 0;
    for (std::size_t s = 0; s < per_chain; ++s) {
      for (int k = 0; k < config.sweeps_per_sample; ++k) {
        chain.sweep();
        ++window_sweeps;
      }
      if (window_sweeps >= 100) {
        if (chain.accepted_in_window() == 0) stuck[c] = 1;
        chain.reset_window();
        window_sweeps = 0;
      }
      const std::size_t row = c * per_chain + s;
      std::copy(chain.current().occupations().begin(),
                chain.current().occupations().end(),
                batch.configurations.begin() + row * m);
      batch.log_psi[row] = chain.current_log_psi();
    }
    batch.chain_acceptance[c] =
        chain.proposed() > 0
            ? static_cast<double>(chain.accepted()) / chain.proposed()
            : 0.0;
  }

  batch.acceptance_rate =
      std::accumulate(batch.chain_acceptance.begin(), batch.chain_acceptance.end(), 0.0) /
      config.n_chains;
  batch.stuck_chain = std::any_of(stuck.begin(), stuck.end(), [](auto v) { return v != 0; });
  return batch;
}

}  // namespace bhvmc
