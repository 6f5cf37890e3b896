#ifndef BHVMC_FOCK_HPP
#define BHVMC_FOCK_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace bhvmc {

// Occupation-number configuration at fixed total particle number. Occupations
// are unbounded machine integers; no local truncation is applied anywhere.
class FockConfiguration {
 public:
  FockConfiguration() = default;
  explicit FockConfiguration(std::vector<int> occupations);
  static FockConfiguration uniform(int n_sites, int per_site);

  int n_sites() const { return static_cast<int>(occ_.size()); }
  int total() const { return total_; }
  int operator[](int site) const { return occ_[site]; }
  std::span<const int> occupations() const { return occ_; }

  void apply_hop(int src, int dst);  // keeps the cached total in sync

  bool operator==(const FockConfiguration&) const = default;

 private:
  std::vector<int> occ_;
  int total_ = 0;
};

// Result of acting with a^dag_dst a_src on |n>.
struct HopResult {
  FockConfiguration configuration;
  double amplitude = 0.0;  // sqrt(n_src * (n_dst + 1))
};

HopResult hop_move(const FockConfiguration& n, int src, int dst);

// amplitude of the hop without building the new configuration
double hop_amplitude(std::span<const int> occupations, int src, int dst);

// Fixed-N basis in descending lexicographic order, (N,0,...,0) first.
// Combinatorial ranking gives O(n_sites * N) index lookups without storing
// the basis.
class FockBasis {
 public:
  static constexpr std::uint64_t kDefaultGuard = 5'000'000;

  FockBasis(int n_sites, int n_particles, std::uint64_t dimension_guard = kDefaultGuard);

  int n_sites() const { return n_sites_; }
  int n_particles() const { return n_particles_; }
  std::uint64_t size() const { return dimension_; }

  std::vector<int> configuration_at(std::uint64_t index) const;
  std::uint64_t index_of(std::span<const int> occupations) const;

  // visits configurations in basis order without materializing them all
  template <typename Visitor>
  void for_each(Visitor&& visit) const {
    std::vector<int> c(n_sites_, 0);
    c[0] = n_particles_;
    std::uint64_t idx = 0;
    while (true) {
      visit(idx, std::span<const int>(c));
      ++idx;
      if (!next_configuration(c)) break;
    }
  }

  std::vector<FockConfiguration> materialize() const;

  // advances to the successor in descending lexicographic order
  static bool next_configuration(std::vector<int>& c);

 private:
  std::uint64_t binom(int n, int k) const;

  int n_sites_ = 0;
  int n_particles_ = 0;
  std::uint64_t dimension_ = 0;
  std::vector<std::uint64_t> binom_table_;  // (n_sites+N) x (n_sites+N), capped
  int table_n_ = 0;
};

}  // namespace bhvmc

#endif
