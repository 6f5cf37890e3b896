#include "bhvmc/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bhvmc/errors.hpp"

namespace bhvmc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(const std::string& text) {
  KvMap kv;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    kv[section + "." + key] = value;
  }
  return kv;
}

template <typename T>
void read_number(const KvMap& kv, const std::string& key, T& out) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  std::istringstream is(it->second);
  T v{};
  is >> v;
  if (is.fail() || !trim(it->second.substr(is.tellg() == -1 ? it->second.size()
                                                            : static_cast<std::size_t>(is.tellg())))
                        .empty())
    throw ConfigError("config: cannot parse '" + key + "' = '" + it->second + "'");
  out = v;
}

void read_string(const KvMap& kv, const std::string& key, std::string& out) {
  const auto it = kv.find(key);
  if (it != kv.end()) out = it->second;
}

void read_bool(const KvMap& kv, const std::string& key, bool& out) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  if (it->second == "true")
    out = true;
  else if (it->second == "false")
    out = false;
  else
    throw ConfigError("config: '" + key + "' must be true or false");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (geometry != "square" && geometry != "chain")
    throw ConfigError("config: geometry must be square or chain");
  if (length < 2) throw ConfigError("config: length must be >= 2");
  if (hopping <= 0.0) throw ConfigError("config: hopping J must be positive");
  if (repulsion < 0.0) throw ConfigError("config: repulsion U must be >= 0");
  const int m = geometry == "square" ? length * length : length;
  if (n_particles == -1) {
    // unit filling
  } else if (n_particles < 1) {
    throw ConfigError("config: n_particles must be positive or -1");
  }
  if (depth < 0 || depth % 2 != 0) throw ConfigError("config: depth must be even");
  if (depth > 0 && channels < 1) throw ConfigError("config: channels must be >= 1");
  if (kernel_radius < 0) throw ConfigError("config: kernel_radius must be >= 0");
  if (chains < 1 || samples < 1 || burn_in_sweeps < 0 || sweeps_per_sample < 1)
    throw ConfigError("config: sampler counts must be positive");
  if (samples % static_cast<std::size_t>(chains) != 0)
    throw ConfigError("config: samples must be divisible by chains");
  if (learning_rate <= 0.0) throw ConfigError("config: learning_rate must be positive");
  if (diag_shift_jastrow < 0.0 || diag_shift_backflow < 0.0)
    throw ConfigError("config: diagonal shifts must be >= 0");
  if (stage1_steps < 0 || stage2_steps < 0)
    throw ConfigError("config: stage steps must be >= 0");
  if (solver != "dense" && solver != "cg")
    throw ConfigError("config: solver must be dense or cg");
  if (checkpoint_interval < 0)
    throw ConfigError("config: checkpoint_interval must be >= 0");
  (void)m;
}

LatticeGeometry ExperimentConfig::make_geometry() const {
  return geometry == "square" ? LatticeGeometry::square(length)
                              : LatticeGeometry::chain(length);
}

int ExperimentConfig::particles() const {
  const int m = geometry == "square" ? length * length : length;
  return n_particles == -1 ? m : n_particles;
}

ModelParams ExperimentConfig::make_model() const { return {hopping, repulsion}; }

BackflowShape ExperimentConfig::make_shape() const {
  return {depth, channels, kernel_radius};
}

SamplerConfig ExperimentConfig::make_sampler() const {
  return {chains, burn_in_sweeps, sweeps_per_sample, samples, seed};
}

SrConfig ExperimentConfig::make_sr() const {
  SrConfig sr;
  sr.learning_rate = learning_rate;
  sr.diag_shift = diag_shift_jastrow;
  sr.solver = solver == "dense" ? SrConfig::Solver::dense : SrConfig::Solver::cg;
  sr.cg_tol = cg_tol;
  return sr;
}

TrainConfig ExperimentConfig::make_train() const {
  TrainConfig tc;
  tc.n_particles = particles();
  tc.mf_prior = mf_prior;
  tc.sampler = make_sampler();
  tc.sr = make_sr();
  tc.stages = default_stage_schedule(make_shape(), stage1_steps, stage2_steps);
  tc.stages[0].diag_shift = diag_shift_jastrow;
  if (tc.stages.size() > 1) tc.stages[1].diag_shift = diag_shift_backflow;
  tc.checkpoint_interval = checkpoint_interval;
  tc.divergence_window = divergence_window;
  tc.divergence_factor = divergence_factor;
  return tc;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "[model]\n";
  os << "geometry = " << geometry << "\n";
  os << "length = " << length << "\n";
  os << "n_particles = " << n_particles << "  # -1 = unit filling\n";
  os << "hopping = " << hopping << "\n";
  os << "repulsion = " << repulsion << "\n";
  os << "\n[ansatz]\n";
  os << "depth = " << depth << "\n";
  os << "channels = " << channels << "\n";
  os << "kernel_radius = " << kernel_radius << "\n";
  os << "mf_prior = " << (mf_prior ? "true" : "false") << "\n";
  os << "\n[sampler]\n";
  os << "chains = " << chains << "\n";
  os << "samples = " << samples << "\n";
  os << "burn_in_sweeps = " << burn_in_sweeps << "\n";
  os << "sweeps_per_sample = " << sweeps_per_sample << "\n";
  os << "seed = " << seed << "\n";
  os << "\n[optimizer]\n";
  os << "learning_rate = " << learning_rate << "\n";
  os << "diag_shift_jastrow = " << diag_shift_jastrow << "\n";
  os << "diag_shift_backflow = " << diag_shift_backflow << "\n";
  os << "stage1_steps = " << stage1_steps << "\n";
  os << "stage2_steps = " << stage2_steps << "\n";
  os << "solver = " << solver << "\n";
  os << "cg_tol = " << cg_tol << "\n";
  os << "divergence_window = " << divergence_window << "\n";
  os << "divergence_factor = " << divergence_factor << "\n";
  os << "\n[output]\n";
  os << "dir = " << out_dir << "\n";
  os << "checkpoint_interval = " << checkpoint_interval << "\n";
  return os.str();
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  const auto kv = parse_kv(text);
  // reject unknown keys so typos fail loudly
  static const std::set<std::string> known = {
      "model.geometry", "model.length", "model.n_particles", "model.hopping",
      "model.repulsion", "ansatz.depth", "ansatz.channels", "ansatz.kernel_radius",
      "ansatz.mf_prior", "sampler.chains", "sampler.samples", "sampler.burn_in_sweeps",
      "sampler.sweeps_per_sample", "sampler.seed", "optimizer.learning_rate",
      "optimizer.diag_shift_jastrow", "optimizer.diag_shift_backflow",
      "optimizer.stage1_steps", "optimizer.stage2_steps", "optimizer.solver",
      "optimizer.cg_tol", "optimizer.divergence_window", "optimizer.divergence_factor",
      "output.dir", "output.checkpoint_interval"};
  for (const auto& [key, value] : kv) {
    (void)value;
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }

  ExperimentConfig c;
  read_string(kv, "model.geometry", c.geometry);
  read_number(kv, "model.length", c.length);
  read_number(kv, "model.n_particles", c.n_particles);
  read_number(kv, "model.hopping", c.hopping);
  read_number(kv, "model.repulsion", c.repulsion);
  read_number(kv, "ansatz.depth", c.depth);
  read_number(kv, "ansatz.channels", c.channels);
  read_number(kv, "ansatz.kernel_radius", c.kernel_radius);
  read_bool(kv, "ansatz.mf_prior", c.mf_prior);
  read_number(kv, "sampler.chains", c.chains);
  read_number(kv, "sampler.samples", c.samples);
  read_number(kv, "sampler.burn_in_sweeps", c.burn_in_sweeps);
  read_number(kv, "sampler.sweeps_per_sample", c.sweeps_per_sample);
  read_number(kv, "sampler.seed", c.seed);
  read_number(kv, "optimizer.learning_rate", c.learning_rate);
  read_number(kv, "optimizer.diag_shift_jastrow", c.diag_shift_jastrow);
  read_number(kv, "optimizer.diag_shift_backflow", c.diag_shift_backflow);
  read_number(kv, "optimizer.stage1_steps", c.stage1_steps);
  read_number(kv, "optimizer.stage2_steps", c.stage2_steps);
  read_string(kv, "optimizer.solver", c.solver);
  read_number(kv, "optimizer.cg_tol", c.cg_tol);
  read_number(kv, "optimizer.divergence_window", c.divergence_window);
  read_number(kv, "optimizer.divergence_factor", c.divergence_factor);
  read_string(kv, "output.dir", c.out_dir);
  read_number(kv, "output.checkpoint_interval", c.checkpoint_interval);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("config: cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return from_string(os.str());
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bhvmc
