#ifndef BHVMC_WAVEFUNCTION_HPP
#define BHVMC_WAVEFUNCTION_HPP

#include <span>

namespace bhvmc {

// Real log-amplitude interface shared by the variational ansatz and the
// exact-table adapters used in tests. -inf marks zero amplitude.
class Wavefunction {
 public:
  virtual ~Wavefunction() = default;

  virtual double log_psi(std::span<const int> occupations) const = 0;

  // ln psi(n - e_src + e_dst) - ln psi(n). The base implementation rebuilds
  // the configuration; ansaetze with a cheap update rule override it.
  virtual double log_psi_ratio(std::span<const int> occupations,
                               double log_psi_current, int src, int dst) const;
};

}  // namespace bhvmc

#endif
