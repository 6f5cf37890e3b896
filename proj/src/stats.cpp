#include "bhvmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bhvmc {

double integrated_autocorrelation(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 8) return 0.5;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= n;
  if (c0 <= 0.0) return 0.5;

  double tau = 0.5;
  const std::size_t max_lag = n / 2;
  for (std::size_t t = 1; t < max_lag; ++t) {
    double ct = 0.0;
    for (std::size_t i = 0; i + t < n; ++i)
      ct += (series[i] - mean) * (series[i + t] - mean);
    ct /= (n - t);
    tau += ct / c0;
    if (static_cast<double>(t) >= 6.0 * tau) break;  // Sokal window
    if (ct / c0 < 0.0 && t > 4) break;
  }
  return std::max(tau, 0.5);
}

ObservableEstimate estimate_series(std::span<const double> series, int n_chains) {
  ObservableEstimate out;
  const std::size_t n = series.size();
  out.n_samples = n;
  if (n == 0) return out;
  if (n_chains < 1 || n % static_cast<std::size_t>(n_chains) != 0)
    throw std::invalid_argument("estimate_series: series not divisible into chains");

  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= n;
  out.mean = mean;
  out.variance = var;

  const std::size_t per_chain = n / n_chains;
  double tau_sum = 0.0;
  for (int c = 0; c < n_chains; ++c)
    tau_sum += integrated_autocorrelation(series.subspan(c * per_chain, per_chain));
  out.tau_int = tau_sum / n_chains;

  if (n_chains >= 2) {
    std::vector<double> chain_means(n_chains);
    for (int c = 0; c < n_chains; ++c) {
      const auto block = series.subspan(c * per_chain, per_chain);
      chain_means[c] = std::accumulate(block.begin(), block.end(), 0.0) / per_chain;
    }
    double cm = std::accumulate(chain_means.begin(), chain_means.end(), 0.0) / n_chains;
    double cv = 0.0;
    for (double m : chain_means) cv += (m - cm) * (m - cm);
    cv /= (n_chains - 1);
    out.std_error = std::sqrt(cv / n_chains);
  } else {
    const double n_eff = n / (2.0 * out.tau_int);
    out.std_error = std::sqrt(var / std::max(n_eff, 1.0));
  }
  return out;
}

JackknifeResult jackknife_mean_function(std::span<const double> values,
                                        std::size_t block,
                                        const std::function<double(double)>& f) {
  JackknifeResult out;
  const std::size_t n = values.size();
  if (n == 0 || block == 0) return out;
  const std::size_t n_blocks = n / block;
  if (n_blocks < 2) {
    out.value = f(std::accumulate(values.begin(), values.end(), 0.0) / n);
    out.n_blocks = n_blocks;
    return out;
  }
  const std::size_t used = n_blocks * block;
  const double total = std::accumulate(values.begin(), values.begin() + used, 0.0);
  out.value = f(total / used);
  out.n_blocks = n_blocks;

  std::vector<double> theta(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    double block_sum = 0.0;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) block_sum += values[i];
    theta[b] = f((total - block_sum) / (used - block));
  }
  const double tbar = std::accumulate(theta.begin(), theta.end(), 0.0) / n_blocks;
  double s = 0.0;
  for (double t : theta) s += (t - tbar) * (t - tbar);
  out.std_error = std::sqrt(s * (n_blocks - 1) / n_blocks);
  return out;
}

namespace {

// Regularized incomplete gamma by series expansion, for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper gamma by Lentz continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

Chi2Result chi2_test(std::span<const std::uint64_t> counts,
                     std::span<const double> probabilities,
                     double min_expected) {
  if (counts.size() != probabilities.size() || counts.empty())
    throw std::invalid_argument("chi2_test: size mismatch");
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);

  // Pool cells with small expected counts, smallest first.
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probabilities[a] < probabilities[b];
  });

  std::vector<double> exp_cells;
  std::vector<double> obs_cells;
  double pool_exp = 0.0, pool_obs = 0.0;
  for (std::size_t k : order) {
    pool_exp += n * probabilities[k];
    pool_obs += static_cast<double>(counts[k]);
    if (pool_exp >= min_expected) {
      exp_cells.push_back(pool_exp);
      obs_cells.push_back(pool_obs);
      pool_exp = pool_obs = 0.0;
    }
  }
  if (pool_exp > 0.0 && !exp_cells.empty()) {
    exp_cells.back() += pool_exp;
    obs_cells.back() += pool_obs;
  }

  Chi2Result out;
  out.dof = static_cast<int>(exp_cells.size()) - 1;
  if (out.dof < 1) {
    out.p_value = 1.0;
    return out;
  }
  for (std::size_t k = 0; k < exp_cells.size(); ++k) {
    const double d = obs_cells[k] - exp_cells[k];
    out.statistic += d * d / exp_cells[k];
  }
  out.p_value = gamma_q(0.5 * out.dof, 0.5 * out.statistic);
  return out;
}

}  // namespace bhvmc
