#ifndef BHVMC_ORACLE_HPP
#define BHVMC_ORACLE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bhvmc/fock.hpp"
#include "bhvmc/hamiltonian.hpp"
#include "bhvmc/lattice.hpp"
#include "bhvmc/linalg.hpp"
#include "bhvmc/wavefunction.hpp"

namespace bhvmc {

// Exact fixed-N Bose-Hubbard Hamiltonian over the given bond list (both hop
// directions are added per bond). Guards: basis dimension and nonzero budget.
SparseSym build_hamiltonian_matrix(const FockBasis& basis,
                                   std::span<const std::array<int, 2>> bonds,
                                   double hopping, double repulsion,
                                   std::uint64_t nnz_guard = 5'000'000);
SparseSym build_hamiltonian_matrix(const LatticeGeometry& geometry, int n_particles,
                                   double hopping, double repulsion,
                                   std::uint64_t nnz_guard = 5'000'000);

struct EdResult {
  FockBasis basis;
  double ground_energy = 0.0;
  std::vector<double> ground_vector;  // normalized, sign-fixed non-negative
  std::uint64_t dimension = 0;
  double residual = 0.0;
};

struct GroundStateOptions {
  std::size_t dense_cutoff = 2000;
  double tolerance = 1e-10;
  std::uint64_t lanczos_seed = 7;
  bool force_lanczos = false;  // cross-checks against the dense path in tests
};

EdResult ground_state(const SparseSym& matrix, const FockBasis& basis,
                      const GroundStateOptions& options = {});

// S_2 = -ln Tr rho_A^2 from the reduced density matrix over the occupation
// patterns of the sites in `partition`.
double exact_renyi2(const EdResult& ed, std::span<const int> partition,
                    std::uint64_t subsystem_guard = 4000);

struct ExactObservables {
  Matrix obdm;
  double condensate_fraction = 0.0;
  double energy_variance = 0.0;
};

ExactObservables exact_observables(const EdResult& ed, const LatticeGeometry& geometry,
                                   const ModelParams& model);

// Deterministic full-basis expectation values of any wavefunction on an
// enumerable sector; used wherever Monte Carlo noise must be excluded.
struct ExactVariational {
  double energy = 0.0;
  double energy_variance = 0.0;
};

ExactVariational exact_variational_measures(const ModelParams& model,
                                            const LatticeGeometry& geometry,
                                            const Wavefunction& psi,
                                            const FockBasis& basis);

}  // namespace bhvmc

#endif
