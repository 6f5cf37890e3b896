#ifndef BHVMC_HAMILTONIAN_HPP
#define BHVMC_HAMILTONIAN_HPP

#include <span>
#include <vector>

#include "bhvmc/fock.hpp"
#include "bhvmc/lattice.hpp"
#include "bhvmc/linalg.hpp"
#include "bhvmc/sample_batch.hpp"
#include "bhvmc/stats.hpp"
#include "bhvmc/wavefunction.hpp"

namespace bhvmc {

// Bose-Hubbard couplings; energies are reported in units of J.
struct ModelParams {
  double hopping = 1.0;    // J > 0
  double repulsion = 0.0;  // U >= 0

  void validate() const;
};

// E_loc(n) = U/2 sum_i n_i(n_i - 1)
//          - J sum over both directions of every bond of
//            sqrt(n_src (n_dst + 1)) psi(n - e_src + e_dst) / psi(n)
double local_energy(const ModelParams& model, const LatticeGeometry& geometry,
                    const Wavefunction& psi, std::span<const int> occupations,
                    double log_psi_value);
double local_energy(const ModelParams& model, const LatticeGeometry& geometry,
                    const Wavefunction& psi, std::span<const int> occupations);

// per-site U/2 sum n(n-1) alone
double interaction_energy(const ModelParams& model, std::span<const int> occupations);

// total mean-field reference energy n_sites * nbar (U nbar / 2 - z J)
double mean_field_energy(double repulsion, double hopping, double mean_density,
                         int coordination, int n_sites);

// One-body density matrix <a_i^dag a_j> estimated from samples, averaged over
// displacement classes (translation invariance of the ansatz).
struct ObdmEstimate {
  std::vector<ObservableEstimate> by_class;  // one per displacement class
  Matrix values;                             // n_sites x n_sites
  Matrix errors;

  double condensate_fraction() const;
  double condensate_fraction_error() const;
};

ObdmEstimate estimate_obdm(const ModelParams& model, const LatticeGeometry& geometry,
                           const Wavefunction& psi, const SampleBatch& batch,
                           bool parallel = true);

// rho_0 = sum_ij obdm(i, j) / n_sites^2
double condensate_fraction(const Matrix& obdm, int n_sites);

// Serves exact amplitudes from a vector over the fixed-N basis; isolates
// estimator correctness from ansatz correctness in tests. Amplitudes <= 0 and
// configurations outside the sector have log-amplitude -inf.
class TableWavefunction final : public Wavefunction {
 public:
  TableWavefunction(FockBasis basis, std::vector<double> amplitudes);

  double log_psi(std::span<const int> occupations) const override;
  const FockBasis& basis() const { return basis_; }

 private:
  FockBasis basis_;
  std::vector<double> log_amplitude_;
};

}  // namespace bhvmc

#endif
