#include "bhvmc/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "bhvmc/errors.hpp"

namespace bhvmc {

namespace {

int wrap(int a, int extent) {
  a %= extent;
  return a < 0 ? a + extent : a;
}

int axis_min_image(int a, int extent) {
  const int r = wrap(a, extent);
  return std::min(r, extent - r);
}

}  // namespace

LatticeGeometry LatticeGeometry::square(int length) {
  if (length < 2) throw DimensionError("LatticeGeometry::square: length must be >= 2");
  return LatticeGeometry(2, {length, length});
}

LatticeGeometry LatticeGeometry::chain(int length) {
  if (length < 2) throw DimensionError("LatticeGeometry::chain: length must be >= 2");
  return LatticeGeometry(1, {length, 1});
}

LatticeGeometry::LatticeGeometry(int dims, std::array<int, 2> extent)
    : dims_(dims), extent_(extent), n_sites_(extent[0] * extent[1]) {
  neighbor_table_.resize(static_cast<std::size_t>(n_sites_) * coordination());
  for (int s = 0; s < n_sites_; ++s) {
    int slot = 0;
    for (int axis = 0; axis < dims_; ++axis) {
      std::array<int, 2> step{0, 0};
      step[axis] = 1;
      neighbor_table_[s * coordination() + slot++] = translate(s, step);
      step[axis] = -1;
      neighbor_table_[s * coordination() + slot++] = translate(s, step);
    }
  }

  bonds_.reserve(static_cast<std::size_t>(dims_) * n_sites_);
  for (int s = 0; s < n_sites_; ++s) {
    for (int axis = 0; axis < dims_; ++axis) {
      std::array<int, 2> step{0, 0};
      step[axis] = 1;
      bonds_.push_back({s, translate(s, step)});
    }
  }

  distance_table_.resize(static_cast<std::size_t>(n_sites_) * n_sites_);
  int max_d = 0;
  for (int i = 0; i < n_sites_; ++i) {
    const auto ci = coordinates(i);
    for (int j = 0; j < n_sites_; ++j) {
      const auto cj = coordinates(j);
      int d = 0;
      for (int axis = 0; axis < dims_; ++axis)
        d += axis_min_image(cj[axis] - ci[axis], extent_[axis]);
      distance_table_[i * n_sites_ + j] = static_cast<std::uint16_t>(d);
      max_d = std::max(max_d, d);
    }
  }

  std::vector<bool> seen(max_d + 1, false);
  for (auto d : distance_table_) seen[d] = true;
  class_of_distance_.assign(max_d + 1, -1);
  for (int d = 0; d <= max_d; ++d) {
    if (seen[d]) {
      class_of_distance_[d] = static_cast<int>(distance_classes_.size());
      distance_classes_.push_back(d);
    }
  }
}

std::vector<int> LatticeGeometry::neighbors(int site) const {
  if (site < 0 || site >= n_sites_)
    throw DimensionError("LatticeGeometry::neighbors: site out of range");
  const int z = coordination();
  return {neighbor_table_.begin() + site * z, neighbor_table_.begin() + (site + 1) * z};
}

int LatticeGeometry::distance(int i, int j) const {
  if (i < 0 || i >= n_sites_ || j < 0 || j >= n_sites_)
    throw DimensionError("LatticeGeometry::distance: site out of range");
  return distance_table_[i * static_cast<std::size_t>(n_sites_) + j];
}

std::array<int, 2> LatticeGeometry::coordinates(int site) const {
  return {site % extent_[0], site / extent_[0]};
}

int LatticeGeometry::site_at(std::array<int, 2> xy) const {
  return wrap(xy[1], extent_[1]) * extent_[0] + wrap(xy[0], extent_[0]);
}

int LatticeGeometry::translate(int site, std::array<int, 2> displacement) const {
  if (site < 0 || site >= n_sites_)
    throw DimensionError("LatticeGeometry::translate: site out of range");
  const auto c = coordinates(site);
  return site_at({c[0] + displacement[0], c[1] + displacement[1]});
}

int LatticeGeometry::displacement_class(int i, int j) const {
  const auto ci = coordinates(i);
  const auto cj = coordinates(j);
  return site_at({cj[0] - ci[0], cj[1] - ci[1]});
}

}  // namespace bhvmc
