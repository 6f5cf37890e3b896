#ifndef BHVMC_ESTIMATORS_HPP
#define BHVMC_ESTIMATORS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bhvmc/kernels.hpp"
#include "bhvmc/lattice.hpp"
#include "bhvmc/linalg.hpp"
#include "bhvmc/sampler.hpp"
#include "bhvmc/wavefunction.hpp"

namespace bhvmc {

// V-score = n_sites * Var[E] / (E - E_MF)^2, dimensionless.
struct VscoreInput {
  double energy_total = 0.0;
  double variance_total = 0.0;
  double e_mf_total = 0.0;
  int n_sites = 0;
};

double vscore(const VscoreInput& input);

struct Renyi2Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double mean_ratio = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_zero_ratio = 0;
};

// Swap estimator over two independent replicas: pairs are matched by index,
// error bars by jackknife over blocks of 64 pairs.
Renyi2Estimate renyi2_swap(const Wavefunction& psi, const LatticeGeometry& geometry,
                           std::span<const std::uint8_t> partition_mask,
                           int n_particles, const SamplerConfig& sampler,
                           std::uint64_t stream_base = 0, Exec exec = Exec::parallel);

// mask with the first n_sites/2 sites (the first L/2 rows of a square lattice)
std::vector<std::uint8_t> first_half_partition(const LatticeGeometry& geometry);

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double err = 1.0;
};

struct FitResult {
  std::vector<double> parameters;
  Matrix covariance;
  double chi_square = 0.0;
  int dof = 0;
  bool converged = false;
  int iterations = 0;
};

// y = [softplus_a(x - b)]^c fitted by damped Gauss-Newton with analytic
// Jacobian and 8 starting points; parameters ordered (a, b, c).
FitResult fit_scaling_function(std::span<const FitPoint> data);

// y = a x + b [superfluid] ln x + c, weighted linear least squares on x = L;
// freeze_b pins b at 1/2. Parameters ordered (a, b, c).
FitResult fit_entropy_scaling(std::span<const FitPoint> data, bool superfluid,
                              bool freeze_b = false);

struct CollapsePoint {
  double size = 0.0;  // L
  double x = 0.0;     // J/U
  double y = 0.0;
  double err = 1.0;
};

// (L, x, y) -> (L^{1/nu} (x - x_c), L^{beta/nu} y); pure transformation
std::vector<CollapsePoint> data_collapse_transform(std::span<const CollapsePoint> points,
                                                   double critical_x, double one_over_nu,
                                                   double beta_over_nu);

// Master-curve residual: every point is compared against the linear
// interpolation of the neighboring points from the other curves.
double collapse_quality(std::span<const CollapsePoint> transformed);

double softplus(double alpha, double x);

}  // namespace bhvmc

#endif
