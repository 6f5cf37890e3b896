#ifndef BHVMC_STATS_HPP
#define BHVMC_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bhvmc {

// Summary of a Monte Carlo scalar estimator.
struct ObservableEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // population variance of the raw series
  double tau_int = 0.5;   // integrated autocorrelation time; 0.5 = uncorrelated
  std::size_t n_samples = 0;
};

// Analyzes a series laid out as n_chains contiguous blocks of equal length.
// With several chains the error comes from the spread of chain means; with a
// single chain it is the autocorrelation-corrected naive error.
ObservableEstimate estimate_series(std::span<const double> series, int n_chains = 1);

// Integrated autocorrelation time of one contiguous series, with automatic
// windowing (smallest W such that W >= c * tau(W), c = 6).
double integrated_autocorrelation(std::span<const double> series);

// Jackknife error for a nonlinear function of a sample mean: theta = f(mean).
// Blocks of `block` consecutive values are left out in turn.
struct JackknifeResult {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_blocks = 0;
};
JackknifeResult jackknife_mean_function(std::span<const double> values,
                                        std::size_t block,
                                        const std::function<double(double)>& f);

// Pearson chi^2 goodness-of-fit test with pooling of low-expectation cells.
struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};
Chi2Result chi2_test(std::span<const std::uint64_t> counts,
                     std::span<const double> probabilities,
                     double min_expected = 5.0);

// Regularized upper incomplete gamma Q(a, x); chi^2 p-value = Q(dof/2, x/2).
double gamma_q(double a, double x);

}  // namespace bhvmc

#endif
