#ifndef BHVMC_LATTICE_HPP
#define BHVMC_LATTICE_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace bhvmc {

// Periodic hypercubic lattice (square L x L, or a periodic chain used by the
// small exact benchmarks). Sites are indexed row-major over coordinates
// (x, y): site = y * L + x for the square lattice, site = x for chains.
//
// Neighbor slots keep their multiplicity: for extent 2 the +/- images of a
// direction coincide, so each of the two distinct neighbors appears twice and
// the bond list counts every bond twice relative to an open-boundary reading.
// This matches the periodic nearest-neighbor sum of the Hamiltonian literally.
class LatticeGeometry {
 public:
  static LatticeGeometry square(int length);  // 2D, length >= 2
  static LatticeGeometry chain(int length);   // 1D, length >= 2

  int dimensions() const { return dims_; }
  int extent(int axis) const { return extent_[axis]; }
  int linear_size() const { return extent_[0]; }
  int n_sites() const { return n_sites_; }
  int coordination() const { return 2 * dims_; }

  // z = 2*d neighbor slots per site, with multiplicity
  std::vector<int> neighbors(int site) const;
  const std::vector<int>& neighbor_table() const { return neighbor_table_; }

  // undirected bond list (i, j) with i the origin site of a +axis step;
  // each periodic bond appears once per +axis step that generates it
  const std::vector<std::array<int, 2>>& bonds() const { return bonds_; }

  // minimum over periodic images of |dx| + |dy|; validates both indices
  int distance(int i, int j) const;
  const std::vector<std::uint16_t>& distance_table() const { return distance_table_; }

  int max_distance() const { return distance_classes_.back(); }
  const std::vector<int>& distance_classes() const { return distance_classes_; }
  int n_distance_classes() const { return static_cast<int>(distance_classes_.size()); }
  // class index of the distance between i and j
  int distance_class(int i, int j) const {
    return class_of_distance_[distance_table_[i * n_sites_ + j]];
  }
  int class_of_distance(int d) const { return class_of_distance_[d]; }

  std::array<int, 2> coordinates(int site) const;
  int site_at(std::array<int, 2> xy) const;

  // periodic translation of a site by an integer displacement vector
  int translate(int site, std::array<int, 2> displacement) const;

  // displacement class of the ordered pair (i, j): the site index of the
  // vector from i to j reduced mod the extents; used to translation-average
  // estimators over equivalent pairs
  int displacement_class(int i, int j) const;

 private:
  LatticeGeometry(int dims, std::array<int, 2> extent);

  int dims_ = 2;
  std::array<int, 2> extent_{0, 0};
  int n_sites_ = 0;
  std::vector<int> neighbor_table_;             // n_sites x 2*dims
  std::vector<std::array<int, 2>> bonds_;       // dims * n_sites entries
  std::vector<std::uint16_t> distance_table_;   // n_sites x n_sites
  std::vector<int> distance_classes_;           // sorted distinct distances
  std::vector<int> class_of_distance_;          // distance -> class index
};

}  // namespace bhvmc

#endif
