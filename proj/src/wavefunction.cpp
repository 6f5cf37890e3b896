#include "bhvmc/wavefunction.hpp"

#include <vector>

namespace bhvmc {

double Wavefunction::log_psi_ratio(std::span<const int> occupations,
                                   double log_psi_current, int src, int dst) const {
  thread_local std::vector<int> scratch;
  scratch.assign(occupations.begin(), occupations.end());
  --scratch[src];
  ++scratch[dst];
  return log_psi(scratch) - log_psi_current;
}

}  // namespace bhvmc
