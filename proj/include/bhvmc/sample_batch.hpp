#ifndef BHVMC_SAMPLE_BATCH_HPP
#define BHVMC_SAMPLE_BATCH_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bhvmc/linalg.hpp"

namespace bhvmc {

// Markov-chain samples plus the per-sample quantities the estimators need.
// Configurations are stored row-major, one occupation vector per sample,
// grouped by chain in chain order.
struct SampleBatch {
  int n_sites = 0;
  int n_chains = 1;
  std::size_t n_samples = 0;

  std::vector<int> configurations;   // n_samples x n_sites
  std::vector<double> log_psi;       // n_samples
  std::vector<double> local_energy;  // n_samples, filled by the energy kernel
  Matrix log_gradients;              // n_samples x n_params, filled on demand

  double acceptance_rate = 0.0;
  std::vector<double> chain_acceptance;
  bool stuck_chain = false;

  std::span<const int> configuration(std::size_t s) const {
    return {configurations.data() + s * n_sites, static_cast<std::size_t>(n_sites)};
  }
};

}  // namespace bhvmc

#endif
