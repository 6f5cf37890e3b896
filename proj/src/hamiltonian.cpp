#include "bhvmc/hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bhvmc/errors.hpp"

namespace bhvmc {

void ModelParams::validate() const {
  if (hopping <= 0.0) throw ConfigError("ModelParams: hopping must be positive");
  if (repulsion < 0.0) throw ConfigError("ModelParams: repulsion must be non-negative");
}

double interaction_energy(const ModelParams& model, std::span<const int> occupations) {
  double s = 0.0;
  for (int n : occupations) s += static_cast<double>(n) * (n - 1);
  return 0.5 * model.repulsion * s;
}

double local_energy(const ModelParams& model, const LatticeGeometry& geometry,
                    const Wavefunction& psi, std::span<const int> occupations,
                    double log_psi_value) {
  double energy = interaction_energy(model, occupations);
  for (const auto& bond : geometry.bonds()) {
    for (int dir = 0; dir < 2; ++dir) {
      const int src = bond[dir];
      const int dst = bond[1 - dir];
      if (occupations[src] == 0) continue;  // zero amplitude
      const double amp = hop_amplitude(occupations, src, dst);
      const double lr = psi.log_psi_ratio(occupations, log_psi_value, src, dst);
      if (std::isnan(lr) || lr == std::numeric_limits<double>::infinity())
        throw SamplingError("local_energy: non-finite log-amplitude ratio");
      energy -= model.hopping * amp * std::exp(lr);
    }
  }
  return energy;
}

double local_energy(const ModelParams& model, const LatticeGeometry& geometry,
                    const Wavefunction& psi, std::span<const int> occupations) {
  return local_energy(model, geometry, psi, occupations, psi.log_psi(occupations));
}

double mean_field_energy(double repulsion, double hopping, double mean_density,
                         int coordination, int n_sites) {
  return n_sites * mean_density *
         (0.5 * repulsion * mean_density - coordination * hopping);
}

double condensate_fraction(const Matrix& obdm, int n_sites) {
  double s = 0.0;
  for (std::size_t i = 0; i < obdm.rows(); ++i)
    for (std::size_t j = 0; j < obdm.cols(); ++j) s += obdm(i, j);
  return s / (static_cast<double>(n_sites) * n_sites);
}

double ObdmEstimate::condensate_fraction() const {
  double s = 0.0;
  for (const auto& c : by_class) s += c.mean;
  return s / static_cast<double>(by_class.size());
}

double ObdmEstimate::condensate_fraction_error() const {
  double s2 = 0.0;
  for (const auto& c : by_class) s2 += c.std_error * c.std_error;
  return std::sqrt(s2) / static_cast<double>(by_class.size());
}

ObdmEstimate estimate_obdm(const ModelParams& model, const LatticeGeometry& geometry,
                           const Wavefunction& psi, const SampleBatch& batch,
                           bool parallel) {
  (void)model;
  const int m = geometry.n_sites();
  const std::size_t n = batch.n_samples;
  if (n == 0) throw SamplingError("estimate_obdm: empty batch");

  // per-sample, per-displacement-class averages over the reference site
  Matrix series(n, m, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
    const auto occ = batch.configuration(s);
    const double lp = batch.log_psi[s];
    double* row = series.row(s).data();
    for (int delta = 0; delta < m; ++delta) {
      const auto dxy = geometry.coordinates(delta);
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        const int j = geometry.translate(i, dxy);
        if (i == j) {
          acc += occ[i];
          continue;
        }
        if (occ[j] == 0) continue;  // annihilation at j gives zero
        // <a_i^dag a_j>: amplitude sqrt(n_j (n_i + 1)) and hop j -> i
        const double amp = hop_amplitude(occ, j, i);
        acc += amp * std::exp(psi.log_psi_ratio(occ, lp, j, i));
      }
      row[delta] = acc / m;
    }
  }

  ObdmEstimate out;
  out.by_class.resize(m);
  std::vector<double> column(n);
  for (int delta = 0; delta < m; ++delta) {
    for (std::size_t s = 0; s < n; ++s) column[s] = series(s, delta);
    out.by_class[delta] = estimate_series(column, batch.n_chains);
  }

  out.values = Matrix(m, m);
  out.errors = Matrix(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int delta = geometry.displacement_class(i, j);
      out.values(i, j) = out.by_class[delta].mean;
      out.errors(i, j) = out.by_class[delta].std_error;
    }
  }
  return out;
}

TableWavefunction::TableWavefunction(FockBasis basis, std::vector<double> amplitudes)
    : basis_(std::move(basis)) {
  if (amplitudes.size() != basis_.size())
    throw DimensionError("TableWavefunction: amplitude vector does not match basis");
  log_amplitude_.resize(amplitudes.size());
  for (std::size_t k = 0; k < amplitudes.size(); ++k)
    log_amplitude_[k] = amplitudes[k] > 0.0
                            ? std::log(amplitudes[k])
                            : -std::numeric_limits<double>::infinity();
}

double TableWavefunction::log_psi(std::span<const int> occupations) const {
  const int total = std::accumulate(occupations.begin(), occupations.end(), 0);
  if (static_cast<int>(occupations.size()) != basis_.n_sites() ||
      total != basis_.n_particles())
    return -std::numeric_limits<double>::infinity();
  return log_amplitude_[basis_.index_of(occupations)];
}

}  // namespace bhvmc
