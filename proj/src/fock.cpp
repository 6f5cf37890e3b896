#include "bhvmc/fock.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "bhvmc/errors.hpp"

namespace bhvmc {

FockConfiguration::FockConfiguration(std::vector<int> occupations)
    : occ_(std::move(occupations)) {
  for (int n : occ_) {
    if (n < 0) throw DimensionError("FockConfiguration: negative occupation");
    total_ += n;
  }
}

FockConfiguration FockConfiguration::uniform(int n_sites, int per_site) {
  return FockConfiguration(std::vector<int>(n_sites, per_site));
}

void FockConfiguration::apply_hop(int src, int dst) {
  if (occ_[src] < 1) throw DimensionError("FockConfiguration::apply_hop: empty source");
  --occ_[src];
  ++occ_[dst];
}

double hop_amplitude(std::span<const int> occupations, int src, int dst) {
  if (src == dst) return static_cast<double>(occupations[src]);
  return std::sqrt(static_cast<double>(occupations[src]) *
                   (occupations[dst] + 1.0));
}

HopResult hop_move(const FockConfiguration& n, int src, int dst) {
  const int sites = n.n_sites();
  if (src < 0 || src >= sites || dst < 0 || dst >= sites)
    throw DimensionError("hop_move: site out of range");
  if (n[src] < 1) throw DimensionError("hop_move: hop from an empty site");
  HopResult out;
  out.amplitude = hop_amplitude(n.occupations(), src, dst);
  out.configuration = n;
  out.configuration.apply_hop(src, dst);
  return out;
}

namespace {

constexpr std::uint64_t kCap = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return (a > kCap - b) ? kCap : a + b;
}

}  // namespace

FockBasis::FockBasis(int n_sites, int n_particles, std::uint64_t dimension_guard)
    : n_sites_(n_sites), n_particles_(n_particles) {
  if (n_sites < 1 || n_particles < 0)
    throw DimensionError("FockBasis: invalid sizes");
  table_n_ = n_sites + n_particles;
  binom_table_.assign(static_cast<std::size_t>(table_n_) * table_n_, 0);
  for (int n = 0; n < table_n_; ++n) {
    binom_table_[n * table_n_ + 0] = 1;
    for (int k = 1; k <= n; ++k)
      binom_table_[n * table_n_ + k] =
          saturating_add(binom(n - 1, k - 1), binom(n - 1, k));
  }
  dimension_ = binom(n_particles + n_sites - 1, n_particles);
  if (dimension_ > dimension_guard)
    throw DimensionError("FockBasis: dimension exceeds guard");
}

std::uint64_t FockBasis::binom(int n, int k) const {
  if (k < 0 || k > n) return 0;
  return binom_table_[static_cast<std::size_t>(n) * table_n_ + k];
}

bool FockBasis::next_configuration(std::vector<int>& c) {
  const int m = static_cast<int>(c.size());
  int j = -1;
  for (int i = m - 2; i >= 0; --i) {
    if (c[i] > 0) {
      j = i;
      break;
    }
  }
  if (j < 0) return false;
  int rest = 0;
  for (int i = j + 1; i < m; ++i) {
    rest += c[i];
    c[i] = 0;
  }
  --c[j];
  c[j + 1] = rest + 1;
  return true;
}

std::vector<int> FockBasis::configuration_at(std::uint64_t index) const {
  if (index >= dimension_)
    throw DimensionError("FockBasis::configuration_at: index out of range");
  std::vector<int> c(n_sites_, 0);
  int remaining = n_particles_;
  std::uint64_t r = index;
  for (int j = 0; j < n_sites_ - 1; ++j) {
    const int m = n_sites_ - j;  // sites still to fill
    for (int t = remaining; t >= 0; --t) {
      const std::uint64_t block = binom(remaining - t + m - 2, m - 2);
      if (r < block) {
        c[j] = t;
        remaining -= t;
        break;
      }
      r -= block;
    }
  }
  c[n_sites_ - 1] = remaining;
  return c;
}

std::uint64_t FockBasis::index_of(std::span<const int> occupations) const {
  if (static_cast<int>(occupations.size()) != n_sites_)
    throw DimensionError("FockBasis::index_of: wrong length");
  std::uint64_t rank = 0;
  int remaining = n_particles_;
  for (int j = 0; j < n_sites_ - 1; ++j) {
    const int nj = occupations[j];
    if (nj < 0 || nj > remaining)
      throw DimensionError("FockBasis::index_of: configuration outside basis");
    const int m = n_sites_ - j;
    // configurations with a larger occupation at this position come first
    for (int t = remaining; t > nj; --t)
      rank += binom(remaining - t + m - 2, m - 2);
    remaining -= nj;
  }
  if (occupations[n_sites_ - 1] != remaining)
    throw DimensionError("FockBasis::index_of: configuration outside basis");
  return rank;
}

std::vector<FockConfiguration> FockBasis::materialize() const {
  std::vector<FockConfiguration> out;
  out.reserve(dimension_);
  for_each([&](std::uint64_t, std::span<const int> c) {
    out.emplace_back(std::vector<int>(c.begin(), c.end()));
  });
  return out;
}

}  // namespace bhvmc
