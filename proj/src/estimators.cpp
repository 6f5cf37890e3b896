#include "bhvmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "bhvmc/errors.hpp"
#include "bhvmc/stats.hpp"

namespace bhvmc {

double vscore(const VscoreInput& input) {
  double variance = input.variance_total;
  // exact eigenstates produce O(eps) negative variances by cancellation
  const double rounding = 1e-10 * (1.0 + input.energy_total * input.energy_total);
  if (variance < 0.0 && variance > -rounding) variance = 0.0;
  if (variance < 0.0) throw SamplingError("vscore: negative variance");
  const double gap = input.energy_total - input.e_mf_total;
  if (gap >= 0.0)
    throw SamplingError("vscore: energy is not below the mean-field reference");
  return input.n_sites * variance / (gap * gap);
}

std::vector<std::uint8_t> first_half_partition(const LatticeGeometry& geometry) {
  std::vector<std::uint8_t> mask(geometry.n_sites(), 0);
  for (int i = 0; i < geometry.n_sites() / 2; ++i) mask[i] = 1;
  return mask;
}

Renyi2Estimate renyi2_swap(const Wavefunction& psi, const LatticeGeometry& geometry,
                           std::span<const std::uint8_t> partition_mask,
                           int n_particles, const SamplerConfig& sampler,
                           std::uint64_t stream_base, Exec exec) {
  const auto initial =
      default_initial_configuration(geometry, n_particles, sampler.seed);
  const bool par = exec == Exec::parallel;
  const auto replica_a =
      run_sampling(sampler, psi, geometry, initial, stream_base, par);
  const auto replica_b = run_sampling(sampler, psi, geometry, initial,
                                      stream_base + (1ULL << 40), par);

  const auto ratios =
      renyi_swap_ratios(psi, replica_a, replica_b, partition_mask, n_particles, exec);

  Renyi2Estimate out;
  out.n_pairs = ratios.size();
  out.n_zero_ratio = std::count(ratios.begin(), ratios.end(), 0.0);
  out.mean_ratio = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
  if (out.mean_ratio <= 0.0)
    throw SamplingError("renyi2_swap: all swap ratios vanished (saturation)");

  const auto jk = jackknife_mean_function(ratios, 64,
                                          [](double mean) { return -std::log(mean); });
  out.value = jk.value;
  out.std_error = jk.std_error;
  return out;
}

double softplus(double alpha, double x) {
  const double u = alpha * x;
  return (std::max(u, 0.0) + std::log1p(std::exp(-std::fabs(u)))) / alpha;
}

namespace {

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// model value and gradient of f = softplus_a(x - b)^c
void softplus_power_eval(double x, const double* p, double& f, double grad[3]) {
  const double a = p[0], b = p[1], c = p[2];
  const double t = x - b;
  const double s = std::max(softplus(a, t), 1e-300);
  const double sig = sigmoid(a * t);
  const double sc1 = c * std::pow(s, c - 1.0);
  f = std::pow(s, c);
  grad[0] = sc1 * (t * sig - s) / a;
  grad[1] = -sc1 * sig;
  grad[2] = f * std::log(s);
}

Matrix inverse_spd(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix inv(n, n, 0.0);
  std::vector<double> e(n, 0.0), x(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(e.begin(), e.end(), 0.0);
    e[k] = 1.0;
    cholesky_solve(a, e, x);
    for (std::size_t i = 0; i < n; ++i) inv(i, k) = x[i];
  }
  return inv;
}

struct LmOutcome {
  std::vector<double> p;
  double chi2 = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

LmOutcome levenberg_marquardt(std::span<const FitPoint> data, std::vector<double> p) {
  const std::size_t n = data.size();
  const std::size_t np = p.size();
  auto chi2_of = [&](const std::vector<double>& q) {
    double c2 = 0.0;
    for (const auto& d : data) {
      double f, g[3];
      softplus_power_eval(d.x, q.data(), f, g);
      const double r = (f - d.y) / d.err;
      c2 += r * r;
    }
    return c2;
  };

  LmOutcome out;
  out.p = p;
  double chi2 = chi2_of(p);
  double lambda = 1e-3;

  for (int it = 0; it < 400; ++it) {
    Matrix jtj(np, np, 0.0);
    std::vector<double> jtr(np, 0.0);
    for (const auto& d : data) {
      double f, g[3];
      softplus_power_eval(d.x, p.data(), f, g);
      const double r = (f - d.y) / d.err;
      for (std::size_t i = 0; i < np; ++i) {
        const double ji = g[i] / d.err;
        jtr[i] += ji * r;
        for (std::size_t j = 0; j < np; ++j) jtj(i, j) += ji * g[j] / d.err;
      }
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      Matrix damped = jtj;
      for (std::size_t i = 0; i < np; ++i)
        damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      std::vector<double> delta(np);
      std::vector<double> rhs(np);
      for (std::size_t i = 0; i < np; ++i) rhs[i] = -jtr[i];
      try {
        cholesky_solve(damped, rhs, delta);
      } catch (const SolverError&) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> trial(np);
      for (std::size_t i = 0; i < np; ++i) trial[i] = p[i] + delta[i];
      const double trial_chi2 = chi2_of(trial);
      if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
        const double drop = chi2 - trial_chi2;
        p = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        out.iterations = it + 1;
        if (drop < 1e-12 * std::max(1.0, chi2)) {
          out.p = p;
          out.chi2 = chi2;
          out.converged = true;
          return out;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) break;
  }
  out.p = p;
  out.chi2 = chi2;
  out.converged = out.iterations > 0;
  (void)n;
  return out;
}

}  // namespace

FitResult fit_scaling_function(std::span<const FitPoint> data) {
  if (data.size() < 4)
    throw DimensionError("fit_scaling_function: need at least 4 points");
  for (const auto& d : data)
    if (d.err <= 0.0) throw ConfigError("fit_scaling_function: errors must be positive");

  std::vector<double> xs(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) xs[i] = data[i].x;
  std::sort(xs.begin(), xs.end());
  const double x_med = xs[xs.size() / 2];
  // abscissa where y first exceeds half its maximum
  double y_max = 0.0;
  for (const auto& d : data) y_max = std::max(y_max, d.y);
  double x_half = x_med;
  std::vector<FitPoint> by_x(data.begin(), data.end());
  std::sort(by_x.begin(), by_x.end(), [](auto& a, auto& b) { return a.x < b.x; });
  for (const auto& d : by_x) {
    if (d.y >= 0.5 * y_max) {
      x_half = d.x;
      break;
    }
  }

  LmOutcome best;
  for (double a0 : {5.0, 50.0})
    for (double b0 : {x_med, x_half})
      for (double c0 : {0.5, 1.0}) {
        auto trial = levenberg_marquardt(data, {a0, b0, c0});
        if (trial.chi2 < best.chi2) best = trial;
      }
  if (!best.converged && !std::isfinite(best.chi2))
    throw SolverError("fit_scaling_function: fit did not converge");

  FitResult out;
  out.parameters = best.p;
  out.chi_square = best.chi2;
  out.dof = static_cast<int>(data.size()) - 3;
  out.converged = best.converged;
  out.iterations = best.iterations;

  Matrix jtj(3, 3, 0.0);
  for (const auto& d : data) {
    double f, g[3];
    softplus_power_eval(d.x, best.p.data(), f, g);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) jtj(i, j) += g[i] * g[j] / (d.err * d.err);
  }
  try {
    out.covariance = inverse_spd(jtj);
  } catch (const SolverError&) {
    out.covariance = Matrix(3, 3, 0.0);
  }
  return out;
}

FitResult fit_entropy_scaling(std::span<const FitPoint> data, bool superfluid,
                              bool freeze_b) {
  std::set<double> sizes;
  for (const auto& d : data) {
    if (d.err <= 0.0) throw ConfigError("fit_entropy_scaling: errors must be positive");
    sizes.insert(d.x);
  }
  const bool fit_b = superfluid && !freeze_b;
  const std::size_t n_free = fit_b ? 3 : 2;
  if (sizes.size() < n_free)
    throw DimensionError("fit_entropy_scaling: rank deficient, need more sizes");

  // columns: [L, ln L (optional), 1]
  Matrix ata(n_free, n_free, 0.0);
  std::vector<double> atb(n_free, 0.0);
  auto design = [&](const FitPoint& d, std::vector<double>& row) {
    row.clear();
    row.push_back(d.x);
    if (fit_b) row.push_back(std::log(d.x));
    row.push_back(1.0);
  };
  std::vector<double> row;
  for (const auto& d : data) {
    design(d, row);
    double y = d.y;
    if (superfluid && freeze_b) y -= 0.5 * std::log(d.x);
    const double w = 1.0 / (d.err * d.err);
    for (std::size_t i = 0; i < n_free; ++i) {
      atb[i] += w * row[i] * y;
      for (std::size_t j = 0; j < n_free; ++j) ata(i, j) += w * row[i] * row[j];
    }
  }
  std::vector<double> sol(n_free);
  cholesky_solve(ata, atb, sol);

  FitResult out;
  if (fit_b)
    out.parameters = {sol[0], sol[1], sol[2]};
  else if (superfluid)
    out.parameters = {sol[0], 0.5, sol[1]};
  else
    out.parameters = {sol[0], 0.0, sol[1]};
  out.converged = true;
  out.dof = static_cast<int>(data.size()) - static_cast<int>(n_free);

  for (const auto& d : data) {
    design(d, row);
    double fit = 0.0;
    for (std::size_t i = 0; i < n_free; ++i) fit += row[i] * sol[i];
    if (superfluid && freeze_b) fit += 0.5 * std::log(d.x);
    const double r = (fit - d.y) / d.err;
    out.chi_square += r * r;
  }
  try {
    out.covariance = inverse_spd(ata);
  } catch (const SolverError&) {
    out.covariance = Matrix(n_free, n_free, 0.0);
  }
  return out;
}

std::vector<CollapsePoint> data_collapse_transform(std::span<const CollapsePoint> points,
                                                   double critical_x, double one_over_nu,
                                                   double beta_over_nu) {
  std::vector<CollapsePoint> out(points.begin(), points.end());
  for (auto& p : out) {
    const double lx = std::pow(p.size, one_over_nu);
    const double ly = std::pow(p.size, beta_over_nu);
    p.x = lx * (p.x - critical_x);
    p.y = ly * p.y;
    p.err = ly * p.err;
  }
  return out;
}

double collapse_quality(std::span<const CollapsePoint> transformed) {
  double quality = 0.0;
  std::size_t count = 0;
  for (const auto& p : transformed) {
    // bracketing neighbors from the other curves
    const CollapsePoint* lo = nullptr;
    const CollapsePoint* hi = nullptr;
    for (const auto& q : transformed) {
      if (q.size == p.size) continue;
      if (q.x <= p.x && (!lo || q.x > lo->x)) lo = &q;
      if (q.x >= p.x && (!hi || q.x < hi->x)) hi = &q;
    }
    if (!lo || !hi) continue;
    double y_hat, err_hat;
    if (hi->x > lo->x) {
      const double w = (p.x - lo->x) / (hi->x - lo->x);
      y_hat = lo->y + w * (hi->y - lo->y);
      err_hat = std::max(lo->err, hi->err);
    } else {
      y_hat = 0.5 * (lo->y + hi->y);
      err_hat = std::max(lo->err, hi->err);
    }
    const double denom = p.err * p.err + err_hat * err_hat;
    quality += (p.y - y_hat) * (p.y - y_hat) / std::max(denom, 1e-300);
    ++count;
  }
  return count > 0 ? quality / count : std::numeric_limits<double>::infinity();
}

}  // namespace bhvmc
