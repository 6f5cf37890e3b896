#include "bhvmc/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bhvmc/errors.hpp"

namespace bhvmc {

namespace {
constexpr double kMatchTol = 1e-9;

double relu(double x) { return x > 0.0 ? x : 0.0; }
}  // namespace

void PatchSpec::validate() const {
  if (offsets.empty() || offsets.size() != targets.size())
    throw ConfigError("PatchSpec: offsets/targets mismatch");
  std::set<std::array<int, 2>> distinct(offsets.begin(), offsets.end());
  if (distinct.size() != offsets.size())
    throw ConfigError("PatchSpec: duplicate offsets");
  double max_target = -1e300;
  for (double x : targets) max_target = std::max(max_target, x + input_shift);
  if (shift <= max_target)
    throw ConfigError("PatchSpec: shift must strictly exceed every target value");
}

double ConfinementSpec::v0() const {
  double s = 0.0;
  for (double v : potential) s += std::fabs(v);
  return s;
}

void ConfinementSpec::validate() const {
  if (range < 1 || static_cast<int>(potential.size()) != range)
    throw ConfigError("ConfinementSpec: potential must cover distances 1..R");
  for (double v : potential)
    if (v > 0.0) throw ConfigError("ConfinementSpec: potential must be non-positive");
}

double TwoLayerCnn::evaluate(const LatticeGeometry& geometry,
                             std::span<const double> input) const {
  const int m = geometry.n_sites();
  const int n_off = static_cast<int>(offsets.size());
  double total = 0.0;
  std::vector<double> h(channels);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < channels; ++c) h[c] = bias1[c];
    for (int v = 0; v < n_off; ++v) {
      const double u = input[geometry.translate(i, offsets[v])];
      for (int c = 0; c < channels; ++c) h[c] += kernel1[v * channels + c] * u;
    }
    double z = bias2;
    for (int c = 0; c < channels; ++c) z += kernel2[c] * relu(h[c]);
    total += relu(z);
  }
  return total;
}

std::vector<double> shifted_occupations(std::span<const int> occupations,
                                        double mean_density, double input_shift) {
  std::vector<double> u(occupations.size());
  for (std::size_t i = 0; i < occupations.size(); ++i)
    u[i] = occupations[i] - mean_density + input_shift;
  return u;
}

double gutzwiller_direct(const PatchSpec& patch, const LatticeGeometry& geometry,
                         std::span<const int> occupations) {
  patch.validate();
  const auto u = shifted_occupations(occupations, patch.mean_density);
  const int m = geometry.n_sites();
  double count = 0.0;
  for (int i = 0; i < m; ++i) {
    bool match = true;
    for (std::size_t v = 0; v < patch.offsets.size(); ++v) {
      if (std::fabs(u[geometry.translate(i, patch.offsets[v])] - patch.targets[v]) >
          kMatchTol) {
        match = false;
        break;
      }
    }
    if (match) count += 1.0;
  }
  return patch.strength * count;
}

TwoLayerCnn build_gutzwiller_cnn(const PatchSpec& patch) {
  patch.validate();
  for (double x : patch.targets)
    if (std::fabs(x + patch.input_shift) < kMatchTol)
      throw ConfigError("build_gutzwiller_cnn: zero target value; set an input shift");

  const int n_off = static_cast<int>(patch.offsets.size());
  TwoLayerCnn cnn;
  cnn.offsets = patch.offsets;
  cnn.channels = 2;
  cnn.kernel1.resize(2 * n_off);
  for (int v = 0; v < n_off; ++v) {
    const double x_eff = patch.targets[v] + patch.input_shift;
    cnn.kernel1[v * 2 + 0] = -1.0 / x_eff;  // mu = 1
    cnn.kernel1[v * 2 + 1] = 1.0 / x_eff;   // mu = 2
  }
  cnn.bias1 = {1.0, -1.0};  // (-1)^(mu+1)
  const double k2 = -2.0 * patch.strength * patch.shift;
  cnn.kernel2 = {k2, k2};
  cnn.bias2 = patch.strength;
  return cnn;
}

double evaluate_gutzwiller_cnn(const TwoLayerCnn& cnn, const PatchSpec& patch,
                               const LatticeGeometry& geometry,
                               std::span<const int> occupations) {
  const auto u = shifted_occupations(occupations, patch.mean_density, patch.input_shift);
  return cnn.evaluate(geometry, u);
}

double confinement_direct(const ConfinementSpec& spec, const LatticeGeometry& geometry,
                          std::span<const int> occupations) {
  spec.validate();
  for (int n : occupations)
    if (n > 2) throw DimensionError("confinement_direct: occupation above 2");
  const int m = geometry.n_sites();
  double value = 0.0;
  for (int i = 0; i < m; ++i) {
    if (occupations[i] != 0) continue;
    for (int j = 0; j < m; ++j) {
      if (occupations[j] != 2) continue;
      const int d = geometry.distance(i, j);
      if (d >= 1 && d <= spec.range) value -= spec.potential[d - 1];
    }
  }
  return value;
}

TwoLayerCnn build_confinement_cnn(const ConfinementSpec& spec,
                                  const LatticeGeometry& geometry) {
  spec.validate();
  const int r = spec.range;
  TwoLayerCnn cnn;
  cnn.channels = 2 + r;

  // offsets: the origin plus every lattice vector within L1 range R
  cnn.offsets.push_back({0, 0});
  std::vector<int> offset_distance{0};
  const int wy = geometry.dimensions() == 1 ? 0 : r;
  for (int vy = -wy; vy <= wy; ++vy) {
    for (int vx = -r; vx <= r; ++vx) {
      const int d = std::abs(vx) + std::abs(vy);
      if (d < 1 || d > r) continue;
      cnn.offsets.push_back({vx, vy});
      offset_distance.push_back(d);
    }
  }

  const int n_off = static_cast<int>(cnn.offsets.size());
  cnn.kernel1.assign(static_cast<std::size_t>(n_off) * cnn.channels, 0.0);
  cnn.kernel1[0 * cnn.channels + 0] = -1.0;  // hole detector, origin tap
  cnn.kernel1[0 * cnn.channels + 1] = 1.0;   // doublon counter, origin tap
  for (int v = 1; v < n_off; ++v)
    cnn.kernel1[v * cnn.channels + 1 + offset_distance[v]] = 1.0;  // distance rings

  cnn.bias1.assign(cnn.channels, 0.0);
  cnn.bias1[0] = -1.0;
  cnn.bias1[1] = 1.0;

  cnn.kernel2.assign(cnn.channels, 0.0);
  const double v0 = spec.v0();
  cnn.kernel2[0] = -v0;
  cnn.kernel2[1] = -v0;
  for (int d = 1; d <= r; ++d) cnn.kernel2[1 + d] = -spec.potential[d - 1];
  cnn.bias2 = 0.0;
  return cnn;
}

double evaluate_confinement_cnn(const TwoLayerCnn& cnn, const LatticeGeometry& geometry,
                                std::span<const int> occupations) {
  // unit density defines holes and doublons here
  const auto u = shifted_occupations(occupations, 1.0);
  return cnn.evaluate(geometry, u);
}

}  // namespace bhvmc
