#ifndef BHVMC_SAMPLER_HPP
#define BHVMC_SAMPLER_HPP

#include <cstdint>
#include <optional>

#include "bhvmc/fock.hpp"
#include "bhvmc/lattice.hpp"
#include "bhvmc/rng.hpp"
#include "bhvmc/sample_batch.hpp"
#include "bhvmc/wavefunction.hpp"

namespace bhvmc {

struct SamplerConfig {
  int n_chains = 8;
  int burn_in_sweeps = 100;
  int sweeps_per_sample = 1;
  std::size_t samples_total = 8192;
  std::uint64_t seed = 1;

  void validate() const;
};

struct HopProposal {
  int src = -1;
  int dst = -1;
  double log_g_ratio = 0.0;  // ln g(n | n') / g(n' | n) = ln(n'_dst / n_src)
};

// Fenwick tree over per-site occupations; samples a site with probability
// n_i / N in O(log M) and tracks hops incrementally.
class OccupationIndex {
 public:
  explicit OccupationIndex(std::span<const int> occupations);
  int sample_site(Rng& rng) const;
  void apply_hop(int src, int dst);
  int total() const { return total_; }

 private:
  int prefix(int i) const;
  std::vector<int> tree_;
  int size_ = 0;
  int total_ = 0;
};

// forward transition density g(n' | n) of the hop src -> dst
double proposal_probability(const LatticeGeometry& geometry,
                            std::span<const int> occupations, int src, int dst);

// min(1, exp(2 dlogpsi + log_g_ratio))
double acceptance_probability(double log_psi_ratio, double log_g_ratio);

// One Markov chain over the fixed-N sector with the occupation-weighted hop
// proposal and Metropolis-Hastings correction.
class ChainState {
 public:
  ChainState(const LatticeGeometry& geometry, const Wavefunction& psi,
             FockConfiguration initial, Rng rng);

  HopProposal propose_hop();
  bool metropolis_step();  // proposes and accepts or rejects one hop
  void sweep();            // N proposed moves

  const FockConfiguration& current() const { return current_; }
  double current_log_psi() const { return current_log_psi_; }
  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t proposed() const { return proposed_; }
  std::uint64_t accepted_in_window() const { return accepted_window_; }
  void reset_window() { accepted_window_ = 0; }

 private:
  const LatticeGeometry* geometry_;
  const Wavefunction* psi_;
  FockConfiguration current_;
  OccupationIndex index_;
  double current_log_psi_ = 0.0;
  Rng rng_;
  std::uint64_t accepted_ = 0;
  std::uint64_t proposed_ = 0;
  std::uint64_t accepted_window_ = 0;
  std::uint64_t since_resync_ = 0;
};

// default starting configuration: uniform at integer filling, otherwise a
// deterministic random fixed-N configuration
FockConfiguration default_initial_configuration(const LatticeGeometry& geometry,
                                                int n_particles, std::uint64_t seed);

// Runs config.n_chains independent chains (streams seed_stream_base + chain)
// and concatenates their samples in chain order; bit-reproducible for any
// worker count.
SampleBatch run_sampling(const SamplerConfig& config, const Wavefunction& psi,
                         const LatticeGeometry& geometry,
                         const FockConfiguration& initial,
                         std::uint64_t seed_stream_base = 0, bool parallel = true);

}  // namespace bhvmc

#endif
