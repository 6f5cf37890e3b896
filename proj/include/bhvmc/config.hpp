#ifndef BHVMC_CONFIG_HPP
#define BHVMC_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "bhvmc/ansatz.hpp"
#include "bhvmc/hamiltonian.hpp"
#include "bhvmc/optimizer.hpp"
#include "bhvmc/sampler.hpp"

namespace bhvmc {

// Flat sectioned key-value configuration ("[section]" + "key = value" lines,
// '#' comments). All defaults follow the reference optimization settings.
struct ExperimentConfig {
  // [model]
  std::string geometry = "square";  // square | chain
  int length = 8;                   // L
  int n_particles = -1;             // -1 = unit filling
  double hopping = 1.0;             // J
  double repulsion = 16.8;          // U
  // [ansatz]
  int depth = 6;
  int channels = 12;
  int kernel_radius = 1;
  bool mf_prior = false;
  // [sampler]
  int chains = 8;
  std::size_t samples = 8192;
  int burn_in_sweeps = 100;
  int sweeps_per_sample = 1;
  std::uint64_t seed = 42;
  // [optimizer]
  double learning_rate = 1e-3;
  double diag_shift_jastrow = 5e-4;
  double diag_shift_backflow = 1e-3;
  int stage1_steps = 2000;
  int stage2_steps = 5000;
  std::string solver = "dense";  // dense | cg
  double cg_tol = 1e-10;
  int divergence_window = 50;
  double divergence_factor = 1.0;
  // [output]
  std::string out_dir = "runs/run";
  int checkpoint_interval = 100;

  void validate() const;

  LatticeGeometry make_geometry() const;
  int particles() const;  // resolved particle count
  ModelParams make_model() const;
  BackflowShape make_shape() const;
  SamplerConfig make_sampler() const;
  SrConfig make_sr() const;
  TrainConfig make_train() const;

  std::string serialize() const;

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig defaults() { return {}; }
};

// FNV-1a hash of a string, hex-encoded; identifies configs in run manifests
std::string fnv1a_hex(const std::string& text);

}  // namespace bhvmc

#endif
