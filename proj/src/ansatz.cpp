#include "bhvmc/ansatz.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "bhvmc/errors.hpp"

namespace bhvmc {

namespace {
constexpr double kNormEpsilon = 1e-6;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2));
}

double gelu_derivative(double x) {
  const double phi = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return phi + x * density;
}

std::vector<double> rescale_input(std::span<const int> occupations, double mean_density) {
  if (mean_density <= 0.0)
    throw DimensionError("rescale_input: mean density must be positive");
  std::vector<double> out(occupations.size());
  for (std::size_t i = 0; i < occupations.size(); ++i)
    out[i] = occupations[i] / mean_density - 1.0;
  return out;
}

double log_psi_mf_prior(std::span<const int> occupations) {
  int total = 0;
  double sum_log_fact = 0.0;
  for (int n : occupations) {
    total += n;
    sum_log_fact += std::lgamma(n + 1.0);
  }
  return 0.5 * (std::lgamma(total + 1.0) - sum_log_fact);
}

AnsatzParameters::AnsatzParameters(const LatticeGeometry& geometry, BackflowShape shape)
    : shape_(shape), n_jastrow_(geometry.n_distance_classes()) {
  if (shape.depth < 0 || shape.depth % 2 != 0)
    throw ConfigError("AnsatzParameters: depth must be even and non-negative");
  if (shape.has_network() && shape.channels < 1)
    throw ConfigError("AnsatzParameters: channels must be positive");
  if (shape.kernel_radius < 0)
    throw ConfigError("AnsatzParameters: kernel radius must be non-negative");

  const int width = 2 * shape.kernel_radius + 1;
  filter_sites_ = 1;
  for (int axis = 0; axis < geometry.dimensions(); ++axis) filter_sites_ *= width;

  std::size_t off = n_jastrow_;
  for (int l = 0; l < shape.depth; ++l) {
    const int in = layer_in_channels(l);
    kernel_off_.push_back(off);
    kernel_len_.push_back(static_cast<std::size_t>(filter_sites_) * shape.channels * in);
    off += kernel_len_.back();
    bias_off_.push_back(off);
    off += shape.channels;
  }
  norm_off_ = off;
  off += static_cast<std::size_t>(shape.norm_layers()) * 2 * shape.channels;
  mixing_off_ = off;
  off += shape.has_network() ? shape.channels : 0;
  flat_.assign(off, 0.0);
}

bool AnsatzParameters::mixing_is_zero() const {
  for (double a : mixing())
    if (a != 0.0) return false;
  return true;
}

std::vector<std::size_t> AnsatzParameters::jastrow_indices() const {
  std::vector<std::size_t> idx(n_jastrow_);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

void AnsatzParameters::initialize_backflow(Rng& rng) {
  for (int l = 0; l < shape_.depth; ++l) {
    const double stddev = 1.0 / std::sqrt(static_cast<double>(filter_sites_) *
                                          layer_in_channels(l));
    for (double& k : kernel(l)) k = rng.normal(0.0, stddev);
    for (double& b : bias(l)) b = 0.0;
  }
  for (int k = 0; k < shape_.norm_layers(); ++k) {
    for (double& g : norm_gain(k)) g = 1.0;
    for (double& o : norm_offset(k)) o = 0.0;
  }
  for (double& a : mixing()) a = 0.0;
}

BackflowJastrow::BackflowJastrow(const LatticeGeometry& geometry,
                                 const AnsatzParameters& params, bool with_mf_prior)
    : geometry_(&geometry), params_(&params), with_mf_prior_(with_mf_prior) {
  if (params.n_jastrow() != geometry.n_distance_classes())
    throw ConfigError("BackflowJastrow: parameters built for a different lattice");

  const int r = params.shape().kernel_radius;
  const int m = geometry.n_sites();
  std::vector<std::array<int, 2>> offsets;
  if (geometry.dimensions() == 1) {
    for (int vx = -r; vx <= r; ++vx) offsets.push_back({vx, 0});
  } else {
    for (int vy = -r; vy <= r; ++vy)
      for (int vx = -r; vx <= r; ++vx) offsets.push_back({vx, vy});
  }
  n_offsets_ = static_cast<int>(offsets.size());
  if (params.shape().has_network() && n_offsets_ != params.filter_sites())
    throw ConfigError("BackflowJastrow: filter geometry mismatch");
  gather_.resize(static_cast<std::size_t>(n_offsets_) * m);
  for (int v = 0; v < n_offsets_; ++v)
    for (int i = 0; i < m; ++i) gather_[v * m + i] = geometry.translate(i, offsets[v]);
}

void BackflowJastrow::convolve(int layer, const std::vector<double>& in,
                               std::vector<double>& pre) const {
  const int m = geometry_->n_sites();
  const int alpha = params_->shape().channels;
  const int n_in = params_->layer_in_channels(layer);
  const auto kernel = params_->kernel(layer);
  const auto bias = params_->bias(layer);

  pre.assign(static_cast<std::size_t>(m) * alpha, 0.0);
  for (int i = 0; i < m; ++i) {
    double* zi = pre.data() + static_cast<std::size_t>(i) * alpha;
    for (int mu = 0; mu < alpha; ++mu) zi[mu] = bias[mu];
    for (int v = 0; v < n_offsets_; ++v) {
      const int j = gather_[v * m + i];
      const double* hv = in.data() + static_cast<std::size_t>(j) * n_in;
      const double* kv = kernel.data() + static_cast<std::size_t>(v) * alpha * n_in;
      for (int mu = 0; mu < alpha; ++mu) {
        double s = 0.0;
        const double* kmu = kv + static_cast<std::size_t>(mu) * n_in;
        for (int nu = 0; nu < n_in; ++nu) s += kmu[nu] * hv[nu];
        zi[mu] += s;
      }
    }
  }
}

void BackflowJastrow::forward(std::span<const int> occupations,
                              BackflowWorkspace& ws) const {
  const int m = geometry_->n_sites();
  const auto& shape = params_->shape();
  const int total = std::accumulate(occupations.begin(), occupations.end(), 0);
  const double nbar = static_cast<double>(total) / m;
  ws.input = rescale_input(occupations, nbar);

  if (!shape.has_network()) {
    ws.dressed = ws.input;
    return;
  }

  const int alpha = shape.channels;
  const std::size_t feat_len = static_cast<std::size_t>(m) * alpha;
  ws.pre.resize(shape.depth);
  ws.feat.resize(shape.depth);
  ws.norm_hat.resize(shape.norm_layers());
  ws.norm_sig.resize(shape.norm_layers());

  for (int l = 0; l < shape.depth; ++l) {
    const std::vector<double>& in = (l == 0) ? ws.input : ws.feat[l - 1];
    convolve(l, in, ws.pre[l]);
    ws.feat[l].resize(feat_len);
    if (l == 0 || l % 2 == 1) {
      for (std::size_t p = 0; p < feat_len; ++p) ws.feat[l][p] = gelu(ws.pre[l][p]);
    } else {
      // residual from two layers back, then per-site layer normalization
      const int k = l / 2 - 1;
      const auto gain = params_->norm_gain(k);
      const auto offset = params_->norm_offset(k);
      ws.norm_hat[k].resize(feat_len);
      ws.norm_sig[k].resize(m);
      for (int i = 0; i < m; ++i) {
        double* hat = ws.norm_hat[k].data() + static_cast<std::size_t>(i) * alpha;
        const double* prev = ws.feat[l - 2].data() + static_cast<std::size_t>(i) * alpha;
        const double* zi = ws.pre[l].data() + static_cast<std::size_t>(i) * alpha;
        double mean = 0.0;
        for (int mu = 0; mu < alpha; ++mu) {
          hat[mu] = prev[mu] + gelu(zi[mu]);
          mean += hat[mu];
        }
        mean /= alpha;
        double var = 0.0;
        for (int mu = 0; mu < alpha; ++mu) {
          hat[mu] -= mean;
          var += hat[mu] * hat[mu];
        }
        var /= alpha;
        const double sig = std::sqrt(var + kNormEpsilon);
        ws.norm_sig[k][i] = sig;
        double* out = ws.feat[l].data() + static_cast<std::size_t>(i) * alpha;
        for (int mu = 0; mu < alpha; ++mu) {
          hat[mu] /= sig;
          out[mu] = gain[mu] * hat[mu] + offset[mu];
        }
      }
    }
  }

  const auto mixing = params_->mixing();
  ws.dressed = ws.input;
  const auto& top = ws.feat[shape.depth - 1];
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    const double* hi = top.data() + static_cast<std::size_t>(i) * alpha;
    for (int mu = 0; mu < alpha; ++mu) s += mixing[mu] * hi[mu];
    ws.dressed[i] += s;
  }
}

double BackflowJastrow::jastrow_from_dressed(BackflowWorkspace& ws) const {
  const int m = geometry_->n_sites();
  const auto w = params_->jastrow();
  const auto& dist = geometry_->distance_table();
  ws.jastrow_field.assign(m, 0.0);
  double log_psi = 0.0;
  for (int i = 0; i < m; ++i) {
    const std::uint16_t* di = dist.data() + static_cast<std::size_t>(i) * m;
    double field = 0.0;
    for (int j = 0; j < m; ++j)
      field += w[geometry_->class_of_distance(di[j])] * ws.dressed[j];
    ws.jastrow_field[i] = 2.0 * field;
    log_psi += ws.dressed[i] * field;
  }
  return log_psi;
}

double BackflowJastrow::log_psi(std::span<const int> occupations) const {
  thread_local BackflowWorkspace ws;
  return log_psi(occupations, ws);
}

double BackflowJastrow::log_psi(std::span<const int> occupations,
                                BackflowWorkspace& ws) const {
  const bool bare = !params_->shape().has_network() || params_->mixing_is_zero();
  if (bare) {
    const int m = geometry_->n_sites();
    const int total = std::accumulate(occupations.begin(), occupations.end(), 0);
    ws.input = rescale_input(occupations, static_cast<double>(total) / m);
    ws.dressed = ws.input;
  } else {
    forward(occupations, ws);
  }
  double value = jastrow_from_dressed(ws);
  if (with_mf_prior_) value += log_psi_mf_prior(occupations);
  return value;
}

double BackflowJastrow::log_psi_ratio(std::span<const int> occupations,
                                      double log_psi_current, int src, int dst) const {
  const bool bare = !params_->shape().has_network() || params_->mixing_is_zero();
  if (!bare)
    return Wavefunction::log_psi_ratio(occupations, log_psi_current, src, dst);
  if (src == dst) return 0.0;

  const int m = geometry_->n_sites();
  const int total = std::accumulate(occupations.begin(), occupations.end(), 0);
  const double nbar = static_cast<double>(total) / m;
  const auto w = params_->jastrow();
  const auto& dist = geometry_->distance_table();

  // field at the two affected sites, with x_j = n_j / nbar - 1
  double field_src = 0.0, field_dst = 0.0;
  const std::uint16_t* ds = dist.data() + static_cast<std::size_t>(src) * m;
  const std::uint16_t* dd = dist.data() + static_cast<std::size_t>(dst) * m;
  for (int j = 0; j < m; ++j) {
    const double xj = occupations[j] / nbar - 1.0;
    field_src += w[geometry_->class_of_distance(ds[j])] * xj;
    field_dst += w[geometry_->class_of_distance(dd[j])] * xj;
  }
  const double w0 = w[geometry_->class_of_distance(0)];
  const double wsd = w[geometry_->distance_class(src, dst)];
  double delta = (2.0 / nbar) * (field_dst - field_src) +
                 (2.0 / (nbar * nbar)) * (w0 - wsd);
  if (with_mf_prior_)
    delta += 0.5 * (std::log(static_cast<double>(occupations[src])) -
                    std::log(occupations[dst] + 1.0));
  return delta;
}

std::vector<double> BackflowJastrow::backflow_features(
    std::span<const int> occupations) const {
  if (!params_->shape().has_network())
    throw ConfigError("backflow_features: ansatz has no network");
  BackflowWorkspace ws;
  forward(occupations, ws);
  return ws.dressed;
}

void BackflowJastrow::log_grad_jastrow_only(std::span<const int> occupations,
                                            std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(params_->n_jastrow()))
    throw DimensionError("log_grad_jastrow_only: bad output length");
  if (params_->shape().has_network() && !params_->mixing_is_zero())
    throw ConfigError("log_grad_jastrow_only: mixing weights are active");
  const int m = geometry_->n_sites();
  const int total = std::accumulate(occupations.begin(), occupations.end(), 0);
  const auto x = rescale_input(occupations, static_cast<double>(total) / m);
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out[geometry_->distance_class(i, j)] += x[i] * x[j];
}

void BackflowJastrow::log_grad(std::span<const int> occupations,
                               std::span<double> out) const {
  thread_local BackflowWorkspace ws;
  log_grad(occupations, out, ws);
}

void BackflowJastrow::log_grad(std::span<const int> occupations, std::span<double> out,
                               BackflowWorkspace& ws) const {
  if (out.size() != params_->size())
    throw DimensionError("log_grad: bad output length");
  std::fill(out.begin(), out.end(), 0.0);

  forward(occupations, ws);
  jastrow_from_dressed(ws);

  const int m = geometry_->n_sites();
  const auto& shape = params_->shape();

  // Jastrow block: dW_c = sum over ordered pairs in class c
  {
    auto dw = out.first(params_->n_jastrow());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        dw[geometry_->distance_class(i, j)] += ws.dressed[i] * ws.dressed[j];
  }
  if (!shape.has_network()) return;

  const int alpha = shape.channels;
  const std::size_t feat_len = static_cast<std::size_t>(m) * alpha;
  const auto mixing = params_->mixing();

  // grad of mixing and seed of the feature backprop
  std::size_t grad_base = params_->size() - alpha;
  const auto& top = ws.feat[shape.depth - 1];
  ws.delta.resize(shape.depth);
  for (auto& d : ws.delta) d.assign(feat_len, 0.0);
  for (int i = 0; i < m; ++i) {
    const double gi = ws.jastrow_field[i];
    const double* hi = top.data() + static_cast<std::size_t>(i) * alpha;
    double* di = ws.delta[shape.depth - 1].data() + static_cast<std::size_t>(i) * alpha;
    for (int mu = 0; mu < alpha; ++mu) {
      out[grad_base + mu] += gi * hi[mu];
      di[mu] = gi * mixing[mu];
    }
  }

  const std::size_t norm_grad_base =
      params_->size() - alpha - static_cast<std::size_t>(shape.norm_layers()) * 2 * alpha;

  for (int l = shape.depth - 1; l >= 0; --l) {
    ws.dz.assign(feat_len, 0.0);
    if (l >= 2 && l % 2 == 0) {
      const int k = l / 2 - 1;
      const auto gain = params_->norm_gain(k);
      double* dgain = out.data() + norm_grad_base + 2 * k * alpha;
      double* doffset = dgain + alpha;
      for (int i = 0; i < m; ++i) {
        const double* dl = ws.delta[l].data() + static_cast<std::size_t>(i) * alpha;
        const double* hat = ws.norm_hat[k].data() + static_cast<std::size_t>(i) * alpha;
        const double sig = ws.norm_sig[k][i];
        double mean_dhat = 0.0, mean_dhat_hat = 0.0;
        for (int mu = 0; mu < alpha; ++mu) {
          dgain[mu] += dl[mu] * hat[mu];
          doffset[mu] += dl[mu];
          const double dhat = dl[mu] * gain[mu];
          mean_dhat += dhat;
          mean_dhat_hat += dhat * hat[mu];
        }
        mean_dhat /= alpha;
        mean_dhat_hat /= alpha;
        double* res = ws.delta[l - 2].data() + static_cast<std::size_t>(i) * alpha;
        double* dzi = ws.dz.data() + static_cast<std::size_t>(i) * alpha;
        const double* zi = ws.pre[l].data() + static_cast<std::size_t>(i) * alpha;
        for (int mu = 0; mu < alpha; ++mu) {
          const double dhat = dl[mu] * gain[mu];
          const double dr = (dhat - mean_dhat - hat[mu] * mean_dhat_hat) / sig;
          res[mu] += dr;  // residual branch
          dzi[mu] = dr * gelu_derivative(zi[mu]);
        }
      }
    } else {
      for (std::size_t p = 0; p < feat_len; ++p)
        ws.dz[p] = ws.delta[l][p] * gelu_derivative(ws.pre[l][p]);
    }

    // convolution backward: kernel, bias, and upstream delta
    const int n_in = params_->layer_in_channels(l);
    const std::vector<double>& in = (l == 0) ? ws.input : ws.feat[l - 1];
    const auto kernel = params_->kernel(l);
    double* dk = out.data() + (kernel.data() - params_->flat().data());
    double* db = out.data() + (params_->bias(l).data() - params_->flat().data());
    for (int i = 0; i < m; ++i) {
      const double* dzi = ws.dz.data() + static_cast<std::size_t>(i) * alpha;
      for (int mu = 0; mu < alpha; ++mu) db[mu] += dzi[mu];
      for (int v = 0; v < n_offsets_; ++v) {
        const int j = gather_[v * m + i];
        const double* hv = in.data() + static_cast<std::size_t>(j) * n_in;
        double* dkv = dk + static_cast<std::size_t>(v) * alpha * n_in;
        for (int mu = 0; mu < alpha; ++mu) {
          const double d = dzi[mu];
          double* dkmu = dkv + static_cast<std::size_t>(mu) * n_in;
          for (int nu = 0; nu < n_in; ++nu) dkmu[nu] += d * hv[nu];
        }
        if (l > 0) {
          double* up = ws.delta[l - 1].data() + static_cast<std::size_t>(j) * alpha;
          const double* kv = kernel.data() + static_cast<std::size_t>(v) * alpha * n_in;
          for (int mu = 0; mu < alpha; ++mu) {
            const double d = dzi[mu];
            const double* kmu = kv + static_cast<std::size_t>(mu) * n_in;
            for (int nu = 0; nu < n_in; ++nu) up[nu] += d * kmu[nu];
          }
        }
      }
    }
  }
}

namespace {

constexpr char kMagic[8] = {'B', 'H', 'V', 'M', 'C', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_checkpoint(const std::string& path, const LatticeGeometry& geometry,
                     const AnsatzParameters& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_checkpoint: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::int32_t>(geometry.dimensions() == 1 ? 0 : 1));
  write_pod(os, static_cast<std::int32_t>(geometry.linear_size()));
  write_pod(os, static_cast<std::int32_t>(params.shape().depth));
  write_pod(os, static_cast<std::int32_t>(params.shape().channels));
  write_pod(os, static_cast<std::int32_t>(params.shape().kernel_radius));
  write_pod(os, static_cast<std::uint64_t>(params.size()));
  os.write(reinterpret_cast<const char*>(params.flat().data()),
           static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!os) throw IoError("save_checkpoint: write failed for " + path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_checkpoint_header: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("read_checkpoint_header: not a checkpoint file");
  std::uint32_t version = 0;
  read_pod(is, version);
  if (version != kVersion) throw IoError("read_checkpoint_header: unsupported version");
  CheckpointHeader h;
  std::int32_t kind, length, depth, channels, radius;
  read_pod(is, kind);
  read_pod(is, length);
  read_pod(is, depth);
  read_pod(is, channels);
  read_pod(is, radius);
  read_pod(is, h.n_params);
  if (!is) throw IoError("read_checkpoint_header: truncated header");
  h.geometry_kind = kind;
  h.length = length;
  h.shape = BackflowShape{depth, channels, radius};
  return h;
}

AnsatzParameters load_checkpoint(const std::string& path, const LatticeGeometry& geometry) {
  const auto h = read_checkpoint_header(path);
  const int expected_kind = geometry.dimensions() == 1 ? 0 : 1;
  if (h.geometry_kind != expected_kind || h.length != geometry.linear_size())
    throw IoError("load_checkpoint: geometry mismatch");
  AnsatzParameters params(geometry, h.shape);
  if (params.size() != h.n_params)
    throw IoError("load_checkpoint: parameter count mismatch");
  std::ifstream is(path, std::ios::binary);
  is.seekg(8 + sizeof(std::uint32_t) + 5 * sizeof(std::int32_t) + sizeof(std::uint64_t));
  is.read(reinterpret_cast<char*>(params.flat().data()),
          static_cast<std::streamsize>(h.n_params * sizeof(double)));
  if (!is) throw IoError("load_checkpoint: truncated payload");
  return params;
}

std::string parameters_to_json(const AnsatzParameters& params) {
  nlohmann::json j;
  j["depth"] = params.shape().depth;
  j["channels"] = params.shape().channels;
  j["kernel_radius"] = params.shape().kernel_radius;
  j["n_params"] = params.size();
  j["jastrow"] = std::vector<double>(params.jastrow().begin(), params.jastrow().end());
  auto layers = nlohmann::json::array();
  for (int l = 0; l < params.shape().depth; ++l) {
    nlohmann::json layer;
    layer["kernel"] = std::vector<double>(params.kernel(l).begin(), params.kernel(l).end());
    layer["bias"] = std::vector<double>(params.bias(l).begin(), params.bias(l).end());
    layers.push_back(layer);
  }
  j["layers"] = layers;
  auto norms = nlohmann::json::array();
  for (int k = 0; k < params.shape().norm_layers(); ++k) {
    nlohmann::json norm;
    norm["gain"] = std::vector<double>(params.norm_gain(k).begin(), params.norm_gain(k).end());
    norm["offset"] =
        std::vector<double>(params.norm_offset(k).begin(), params.norm_offset(k).end());
    norms.push_back(norm);
  }
  j["norms"] = norms;
  j["mixing"] = std::vector<double>(params.mixing().begin(), params.mixing().end());
  return j.dump(2);
}

}  // namespace bhvmc
