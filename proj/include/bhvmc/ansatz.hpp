#ifndef BHVMC_ANSATZ_HPP
#define BHVMC_ANSATZ_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bhvmc/fock.hpp"
#include "bhvmc/lattice.hpp"
#include "bhvmc/rng.hpp"
#include "bhvmc/wavefunction.hpp"

namespace bhvmc {

// Architecture of the convolutional residual backflow network. depth = 0
// means no network (bare distance Jastrow). depth must be even: the feature
// stack alternates plain convolution layers with residual layer-normalized
// ones and ends on a plain layer.
struct BackflowShape {
  int depth = 0;          // D
  int channels = 0;       // alpha, uniform across layers
  int kernel_radius = 1;  // d_K; filters cover |v|_inf <= d_K

  bool has_network() const { return depth > 0; }
  int norm_layers() const { return depth > 0 ? depth / 2 - 1 : 0; }
};

// All variational parameters as one flat vector with structured views.
// Flat layout, in order:
//   [ jastrow (one weight per L1 min-image distance class)
//   | kernel(1), bias(1), ..., kernel(D), bias(D)
//   | norm gain(1), norm offset(1), ..., for the D/2-1 normalized layers
//   | mixing (alpha) ]
// Kernels are stored offset-major as [offset][out channel][in channel], with
// offsets enumerated row-major over (vx, vy) in [-d_K, d_K]^dim.
class AnsatzParameters {
 public:
  AnsatzParameters(const LatticeGeometry& geometry, BackflowShape shape);

  const BackflowShape& shape() const { return shape_; }
  int n_jastrow() const { return n_jastrow_; }
  int filter_sites() const { return filter_sites_; }
  std::size_t size() const { return flat_.size(); }

  std::span<double> flat() { return flat_; }
  std::span<const double> flat() const { return flat_; }

  std::span<double> jastrow() { return view(0, n_jastrow_); }
  std::span<const double> jastrow() const { return view(0, n_jastrow_); }
  // layer in [0, D)
  std::span<double> kernel(int layer) { return view(kernel_off_[layer], kernel_len_[layer]); }
  std::span<const double> kernel(int layer) const { return view(kernel_off_[layer], kernel_len_[layer]); }
  std::span<double> bias(int layer) { return view(bias_off_[layer], shape_.channels); }
  std::span<const double> bias(int layer) const { return view(bias_off_[layer], shape_.channels); }
  // k in [0, norm_layers)
  std::span<double> norm_gain(int k) { return view(norm_off_ + 2 * k * shape_.channels, shape_.channels); }
  std::span<const double> norm_gain(int k) const { return view(norm_off_ + 2 * k * shape_.channels, shape_.channels); }
  std::span<double> norm_offset(int k) { return view(norm_off_ + (2 * k + 1) * shape_.channels, shape_.channels); }
  std::span<const double> norm_offset(int k) const { return view(norm_off_ + (2 * k + 1) * shape_.channels, shape_.channels); }
  std::span<double> mixing() { return view(mixing_off_, shape_.has_network() ? shape_.channels : 0); }
  std::span<const double> mixing() const { return view(mixing_off_, shape_.has_network() ? shape_.channels : 0); }

  bool mixing_is_zero() const;

  // indices of the Jastrow block within the flat vector (stage-1 mask)
  std::vector<std::size_t> jastrow_indices() const;

  // Kernels ~ N(0, 1/sqrt(fan_in)), biases 0, norm gain 1 / offset 0,
  // mixing 0; Jastrow weights are left untouched.
  void initialize_backflow(Rng& rng);

  int layer_in_channels(int layer) const { return layer == 0 ? 1 : shape_.channels; }

 private:
  std::span<double> view(std::size_t off, std::size_t len) { return {flat_.data() + off, len}; }
  std::span<const double> view(std::size_t off, std::size_t len) const { return {flat_.data() + off, len}; }

  BackflowShape shape_;
  int n_jastrow_ = 0;
  int filter_sites_ = 0;
  std::vector<std::size_t> kernel_off_, bias_off_, kernel_len_;
  std::size_t norm_off_ = 0, mixing_off_ = 0;
  std::vector<double> flat_;
};

// exact erf-based GELU and its derivative
double gelu(double x);
double gelu_derivative(double x);

// occupations -> n_i / mean_density - 1
std::vector<double> rescale_input(std::span<const int> occupations, double mean_density);

// log of the permanent-free ideal-condensate amplitude up to a constant:
// (ln N! - sum_i ln n_i!) / 2
double log_psi_mf_prior(std::span<const int> occupations);

// Scratch buffers for the network forward/backward pass; reusable across
// calls from the same thread.
struct BackflowWorkspace {
  std::vector<double> input;                 // rescaled occupations
  std::vector<std::vector<double>> pre;      // pre-activations z, per layer
  std::vector<std::vector<double>> feat;     // features h, per layer
  std::vector<std::vector<double>> norm_hat; // normalized residuals, per norm layer
  std::vector<std::vector<double>> norm_sig; // per-site sigma, per norm layer
  std::vector<double> dressed;               // backflow output
  std::vector<double> jastrow_field;         // 2 sum_j W_{d_ij} dressed_j
  std::vector<std::vector<double>> delta;    // backprop, per layer
  std::vector<double> dz;
};

// The neural backflow-Jastrow wavefunction:
//   ln psi(n) = sum_{i,j} dressed_i W_{d_ij} dressed_j  (+ optional prior)
// where dressed = rescaled occupations plus a channel mixture of the
// network's translation-equivariant features.
class BackflowJastrow final : public Wavefunction {
 public:
  BackflowJastrow(const LatticeGeometry& geometry, const AnsatzParameters& params,
                  bool with_mf_prior = false);

  double log_psi(std::span<const int> occupations) const override;
  double log_psi_ratio(std::span<const int> occupations, double log_psi_current,
                       int src, int dst) const override;

  // dressed occupations entering the Jastrow (requires a network)
  std::vector<double> backflow_features(std::span<const int> occupations) const;

  // exact gradient of log_psi with respect to the flat parameter vector
  void log_grad(std::span<const int> occupations, std::span<double> out) const;
  // Jastrow block only; valid while the mixing weights are all zero
  void log_grad_jastrow_only(std::span<const int> occupations, std::span<double> out) const;

  double log_psi(std::span<const int> occupations, BackflowWorkspace& ws) const;
  void log_grad(std::span<const int> occupations, std::span<double> out,
                BackflowWorkspace& ws) const;

  const LatticeGeometry& geometry() const { return *geometry_; }
  const AnsatzParameters& parameters() const { return *params_; }

 private:
  void forward(std::span<const int> occupations, BackflowWorkspace& ws) const;
  double jastrow_from_dressed(BackflowWorkspace& ws) const;
  void convolve(int layer, const std::vector<double>& in, std::vector<double>& pre) const;

  const LatticeGeometry* geometry_;
  const AnsatzParameters* params_;
  bool with_mf_prior_;
  std::vector<int> gather_;  // filter_sites x n_sites translated-site table
  int n_offsets_ = 0;
};

// Checkpoint I/O: versioned binary header (geometry kind, L, D, alpha, d_K,
// parameter count) followed by the flat vector as little-endian doubles.
void save_checkpoint(const std::string& path, const LatticeGeometry& geometry,
                     const AnsatzParameters& params);
AnsatzParameters load_checkpoint(const std::string& path, const LatticeGeometry& geometry);
// header probe, for loaders that must construct the geometry first
struct CheckpointHeader {
  int geometry_kind = 1;  // 0 = chain, 1 = square
  int length = 0;
  BackflowShape shape;
  std::uint64_t n_params = 0;
};
CheckpointHeader read_checkpoint_header(const std::string& path);

// structured JSON export for inspection
std::string parameters_to_json(const AnsatzParameters& params);

}  // namespace bhvmc

#endif
