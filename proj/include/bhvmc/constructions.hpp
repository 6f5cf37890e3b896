#ifndef BHVMC_CONSTRUCTIONS_HPP
#define BHVMC_CONSTRUCTIONS_HPP

#include <array>
#include <span>
#include <vector>

#include "bhvmc/lattice.hpp"

namespace bhvmc {

// A Gutzwiller patch: relative positions, one target value per position (on
// the shifted-occupation scale where holes are -1 and doublons +1), the
// projector strength, and the separation constant of the second layer.
struct PatchSpec {
  std::vector<std::array<int, 2>> offsets;
  std::vector<double> targets;  // x_v, one per offset; must be nonzero
  double strength = 0.0;        // g_MB
  double shift = 0.0;           // Delta x, strictly above every target value
  double input_shift = 0.0;     // xi added to shifted occupations before matching
  double mean_density = 1.0;    // reference density subtracted from occupations

  void validate() const;
};

// Attractive holon-doublon potential V_d <= 0 for 1 <= d <= R.
struct ConfinementSpec {
  int range = 1;                  // R
  std::vector<double> potential;  // V_1 .. V_R, all <= 0

  double v0() const;  // sum_d |V_d|
  void validate() const;
};

// Generic two-layer ReLU CNN: one convolution with |offsets| taps mapping a
// scalar field to `channels` feature maps, then a 1x1 contraction, with the
// scalar output summed over sites.
struct TwoLayerCnn {
  std::vector<std::array<int, 2>> offsets;
  int channels = 0;
  std::vector<double> kernel1;  // offsets x channels
  std::vector<double> bias1;    // channels
  std::vector<double> kernel2;  // channels
  double bias2 = 0.0;

  double evaluate(const LatticeGeometry& geometry, std::span<const double> input) const;
};

// shifted occupations fed to both constructions: n_i - mean_density
// (+ input_shift); holes sit at -1 and doublons at +1 for unit density
std::vector<double> shifted_occupations(std::span<const int> occupations,
                                        double mean_density,
                                        double input_shift = 0.0);

// g_MB * sum_i prod_v 1[shifted n at T_v(i) equals the target]
double gutzwiller_direct(const PatchSpec& patch, const LatticeGeometry& geometry,
                         std::span<const int> occupations);

// Exact CNN encoding of the patch projector: two channels with kernels
// (-1)^mu / x_v, biases (-1)^(mu+1), second layer -2 g Dx and bias g.
TwoLayerCnn build_gutzwiller_cnn(const PatchSpec& patch);

double evaluate_gutzwiller_cnn(const TwoLayerCnn& cnn, const PatchSpec& patch,
                               const LatticeGeometry& geometry,
                               std::span<const int> occupations);

// - sum_{ij} V_{d_ij} 1[n_i = 0] 1[n_j = 2], restricted to 0 < d_ij <= R;
// occupations above 2 are rejected.
double confinement_direct(const ConfinementSpec& spec, const LatticeGeometry& geometry,
                          std::span<const int> occupations);

// Two-layer CNN with a hole/doublon channel pair plus one ring channel per
// distance; equals confinement_direct on configurations where every holon
// (doublon) sees at most one doublon (holon) within range and pairs are
// farther than R apart.
TwoLayerCnn build_confinement_cnn(const ConfinementSpec& spec,
                                  const LatticeGeometry& geometry);

double evaluate_confinement_cnn(const TwoLayerCnn& cnn, const LatticeGeometry& geometry,
                                std::span<const int> occupations);

}  // namespace bhvmc

#endif
