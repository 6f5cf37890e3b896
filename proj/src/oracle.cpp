#include "bhvmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "bhvmc/errors.hpp"

namespace bhvmc {

SparseSym build_hamiltonian_matrix(const FockBasis& basis,
                                   std::span<const std::array<int, 2>> bonds,
                                   double hopping, double repulsion,
                                   std::uint64_t nnz_guard) {
  const std::uint64_t dim = basis.size();
  if (dim * (2 * bonds.size() + 1) > nnz_guard)
    throw DimensionError("build_hamiltonian_matrix: nonzero budget exceeded");

  SparseSym h;
  h.dim = dim;
  h.row_ptr.assign(dim + 1, 0);
  h.col.reserve(dim * (2 * bonds.size() + 1));
  h.val.reserve(dim * (2 * bonds.size() + 1));

  std::vector<int> hopped(basis.n_sites());
  basis.for_each([&](std::uint64_t row, std::span<const int> n) {
    // collect the row as (col, val) pairs, diagonal first
    std::map<std::uint64_t, double> entries;
    double diag = 0.0;
    for (int i = 0; i < basis.n_sites(); ++i)
      diag += 0.5 * repulsion * n[i] * (n[i] - 1.0);
    entries[row] = diag;
    for (const auto& bond : bonds) {
      for (int dir = 0; dir < 2; ++dir) {
        const int src = bond[dir];
        const int dst = bond[1 - dir];
        if (n[src] == 0) continue;
        std::copy(n.begin(), n.end(), hopped.begin());
        --hopped[src];
        ++hopped[dst];
        const double amp = std::sqrt(n[src] * (n[dst] + 1.0));
        entries[basis.index_of(hopped)] -= hopping * amp;
      }
    }
    for (const auto& [c, v] : entries) {
      if (v == 0.0 && c != row) continue;
      h.col.push_back(static_cast<std::uint32_t>(c));
      h.val.push_back(v);
    }
    h.row_ptr[row + 1] = h.col.size();
  });
  return h;
}

SparseSym build_hamiltonian_matrix(const LatticeGeometry& geometry, int n_particles,
                                   double hopping, double repulsion,
                                   std::uint64_t nnz_guard) {
  FockBasis basis(geometry.n_sites(), n_particles);
  return build_hamiltonian_matrix(basis, geometry.bonds(), hopping, repulsion, nnz_guard);
}

EdResult ground_state(const SparseSym& matrix, const FockBasis& basis,
                      const GroundStateOptions& options) {
  if (matrix.dim != basis.size())
    throw DimensionError("ground_state: matrix and basis dimensions differ");
  EdResult out{basis, 0.0, {}, 0, 0.0};
  out.dimension = matrix.dim;
  const std::size_t dim = matrix.dim;

  if (dim <= options.dense_cutoff && !options.force_lanczos) {
    Matrix dense(dim, dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k)
        dense(i, matrix.col[k]) = matrix.val[k];
    const auto ed = symmetric_eigen(dense);
    out.ground_energy = ed.values[0];
    out.ground_vector.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) out.ground_vector[i] = ed.vectors(i, 0);
  } else {
    const auto lz = lanczos_ground_state(
        dim,
        [&](std::span<const double> x, std::span<double> y) { matrix.multiply(x, y); },
        options.tolerance, 250, 8, options.lanczos_seed);
    if (!lz.converged)
      throw SolverError("ground_state: Lanczos did not converge");
    out.ground_energy = lz.eigenvalue;
    out.ground_vector = lz.eigenvector;
  }

  // fix the global sign so the largest-magnitude component is positive
  std::size_t imax = 0;
  for (std::size_t i = 1; i < dim; ++i)
    if (std::fabs(out.ground_vector[i]) > std::fabs(out.ground_vector[imax])) imax = i;
  if (out.ground_vector[imax] < 0.0)
    for (auto& v : out.ground_vector) v = -v;

  std::vector<double> hv(dim);
  matrix.multiply(out.ground_vector, hv);
  double res = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double r = hv[i] - out.ground_energy * out.ground_vector[i];
    res += r * r;
  }
  out.residual = std::sqrt(res);
  if (out.residual > 1e-10 * std::max(1.0, std::fabs(out.ground_energy)))
    throw SolverError("ground_state: residual above tolerance");
  return out;
}

double exact_renyi2(const EdResult& ed, std::span<const int> partition,
                    std::uint64_t subsystem_guard) {
  const int m = ed.basis.n_sites();
  std::vector<std::uint8_t> in_a(m, 0);
  for (int s : partition) {
    if (s < 0 || s >= m) throw DimensionError("exact_renyi2: partition site out of range");
    in_a[s] = 1;
  }

  // group basis states by their restriction to A and to the complement
  std::map<std::vector<int>, std::size_t> a_ids, b_ids;
  struct Entry {
    std::size_t a, b;
    double amp;
  };
  std::vector<Entry> entries;
  entries.reserve(ed.dimension);

  std::vector<int> ka, kb;
  ed.basis.for_each([&](std::uint64_t row, std::span<const int> n) {
    ka.clear();
    kb.clear();
    for (int i = 0; i < m; ++i) (in_a[i] ? ka : kb).push_back(n[i]);
    const auto [ita, insa] = a_ids.try_emplace(ka, a_ids.size());
    const auto [itb, insb] = b_ids.try_emplace(kb, b_ids.size());
    entries.push_back({ita->second, itb->second, ed.ground_vector[row]});
  });

  if (a_ids.size() > subsystem_guard)
    throw DimensionError("exact_renyi2: subsystem basis exceeds guard");

  Matrix rho(a_ids.size(), a_ids.size(), 0.0);
  // rho_A[a, a'] = sum_b psi(a, b) psi(a', b); group entries by b
  std::vector<std::vector<std::pair<std::size_t, double>>> by_b(b_ids.size());
  for (const auto& e : entries) by_b[e.b].push_back({e.a, e.amp});
  for (const auto& group : by_b)
    for (const auto& [a1, v1] : group)
      for (const auto& [a2, v2] : group) rho(a1, a2) += v1 * v2;

  double trace_sq = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j) trace_sq += rho(i, j) * rho(i, j);
  return -std::log(trace_sq);
}

ExactObservables exact_observables(const EdResult& ed, const LatticeGeometry& geometry,
                                   const ModelParams& model) {
  const int m = ed.basis.n_sites();
  ExactObservables out;
  out.obdm = Matrix(m, m, 0.0);

  std::vector<int> hopped(m);
  ed.basis.for_each([&](std::uint64_t row, std::span<const int> n) {
    const double psi_n = ed.ground_vector[row];
    if (psi_n == 0.0) return;
    for (int i = 0; i < m; ++i) out.obdm(i, i) += psi_n * psi_n * n[i];
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j || n[j] == 0) continue;
        // <a_i^dag a_j>: hop j -> i
        std::copy(n.begin(), n.end(), hopped.begin());
        --hopped[j];
        ++hopped[i];
        const double amp = std::sqrt(n[j] * (n[i] + 1.0));
        out.obdm(i, j) += psi_n * amp * ed.ground_vector[ed.basis.index_of(hopped)];
      }
    }
  });
  out.condensate_fraction = condensate_fraction(out.obdm, m);

  const auto h = build_hamiltonian_matrix(ed.basis, geometry.bonds(), model.hopping,
                                          model.repulsion);
  std::vector<double> hv(ed.dimension);
  h.multiply(ed.ground_vector, hv);
  const double e = std::inner_product(ed.ground_vector.begin(), ed.ground_vector.end(),
                                      hv.begin(), 0.0);
  const double e2 = std::inner_product(hv.begin(), hv.end(), hv.begin(), 0.0);
  out.energy_variance = e2 - e * e;
  return out;
}

ExactVariational exact_variational_measures(const ModelParams& model,
                                            const LatticeGeometry& geometry,
                                            const Wavefunction& psi,
                                            const FockBasis& basis) {
  // two passes for a stable normalization of exp(2 log psi)
  double max_lp = -std::numeric_limits<double>::infinity();
  basis.for_each([&](std::uint64_t, std::span<const int> n) {
    max_lp = std::max(max_lp, psi.log_psi(n));
  });
  if (!std::isfinite(max_lp))
    throw SamplingError("exact_variational_measures: wavefunction vanishes on the sector");

  double norm = 0.0, e_sum = 0.0, e2_sum = 0.0;
  basis.for_each([&](std::uint64_t, std::span<const int> n) {
    const double lp = psi.log_psi(n);
    if (!std::isfinite(lp)) return;
    const double w = std::exp(2.0 * (lp - max_lp));
    if (w == 0.0) return;
    const double e = local_energy(model, geometry, psi, n, lp);
    norm += w;
    e_sum += w * e;
    e2_sum += w * e * e;
  });

  ExactVariational out;
  out.energy = e_sum / norm;
  out.energy_variance = e2_sum / norm - out.energy * out.energy;
  return out;
}

}  // namespace bhvmc
