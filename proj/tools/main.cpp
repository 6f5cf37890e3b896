#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhvmc/config.hpp"
#include "bhvmc/errors.hpp"
#include "bhvmc/estimators.hpp"
#include "bhvmc/kernels.hpp"
#include "bhvmc/optimizer.hpp"
#include "bhvmc/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "bhvmc 0.1.0";
constexpr std::uint64_t kMeasureStreamBase = 1ULL << 41;
constexpr std::uint64_t kRenyiStreamBase = 1ULL << 42;
constexpr std::uint64_t kInitStream = 0xA57AULL;

struct Measurement {
  bhvmc::ObservableEstimate energy;
  double vscore = 0.0;
  double acceptance = 0.0;
  bhvmc::SampleBatch batch;
};

Measurement measure_energy(const bhvmc::ExperimentConfig& cfg,
                           const bhvmc::LatticeGeometry& geometry,
                           const bhvmc::BackflowJastrow& psi,
                           std::uint64_t stream_base) {
  const auto model = cfg.make_model();
  const auto init = bhvmc::default_initial_configuration(geometry, cfg.particles(),
                                                         cfg.seed);
  Measurement m;
  m.batch = bhvmc::run_sampling(cfg.make_sampler(), psi, geometry, init, stream_base);
  if (m.batch.stuck_chain)
    std::cerr << "warning: a chain made no accepted move over a sweep window\n";
  bhvmc::batch_local_energy(model, geometry, psi, m.batch);
  m.energy = bhvmc::estimate_series(m.batch.local_energy, m.batch.n_chains);
  const double nbar = static_cast<double>(cfg.particles()) / geometry.n_sites();
  const double e_mf = bhvmc::mean_field_energy(cfg.repulsion, cfg.hopping, nbar,
                                               geometry.coordination(),
                                               geometry.n_sites());
  m.vscore = bhvmc::vscore({m.energy.mean, m.energy.variance, e_mf, geometry.n_sites()});
  m.acceptance = m.batch.acceptance_rate;
  return m;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw bhvmc::IoError("cannot write " + path.string());
  os << text;
}

std::string trace_header() {
  return "step,E_mean,E_err,VarE,vscore,acceptance_rate,wall_time\n";
}

std::string trace_line(const bhvmc::TraceRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", r.step,
                r.energy, r.energy_err, r.energy_var, r.vscore, r.acceptance,
                r.wall_seconds);
  return buf;
}

fs::path checkpoint_path(const fs::path& dir, int step) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "ckpt_%06d.bin", step);
  return dir / "checkpoints" / buf;
}

std::optional<int> latest_checkpoint_step(const fs::path& dir) {
  const fs::path cdir = dir / "checkpoints";
  if (!fs::exists(cdir)) return std::nullopt;
  std::optional<int> best;
  for (const auto& entry : fs::directory_iterator(cdir)) {
    const std::string name = entry.path().filename().string();
    int step = -1;
    if (std::sscanf(name.c_str(), "ckpt_%d.bin", &step) == 1)
      if (!best || step > *best) best = step;
  }
  return best;
}

int cmd_optimize(const std::string& config_path, bool resume) {
  const auto cfg = bhvmc::ExperimentConfig::from_file(config_path);
  const auto geometry = cfg.make_geometry();
  const auto model = cfg.make_model();

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir / "checkpoints");
  const std::string config_text = cfg.serialize();
  write_text_file(dir / "config.cfg", config_text);

  json manifest;
  manifest["version"] = kVersion;
  manifest["config_hash"] = bhvmc::fnv1a_hex(config_text);
  manifest["seed"] = cfg.seed;
  manifest["init_stream"] = kInitStream;
  manifest["geometry"] = cfg.geometry;
  manifest["length"] = cfg.length;
  manifest["n_particles"] = cfg.particles();
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  bhvmc::AnsatzParameters params(geometry, cfg.make_shape());
  int start_step = 0;
  if (resume) {
    const auto step = latest_checkpoint_step(dir);
    if (!step) throw bhvmc::IoError("resume requested but no checkpoint found");
    params = bhvmc::load_checkpoint(checkpoint_path(dir, *step).string(), geometry);
    start_step = *step + 1;
    // drop trace rows past the checkpoint so the resumed file is seamless
    std::ifstream is(dir / "trace.csv");
    std::string line, kept;
    bool first = true;
    while (std::getline(is, line)) {
      if (first) {
        first = false;
        continue;
      }
      const int row_step = std::atoi(line.c_str());
      if (row_step <= *step) kept += line + "\n";
    }
    write_text_file(dir / "trace.csv", trace_header() + kept);
  } else {
    bhvmc::Rng init_rng(cfg.seed, kInitStream);
    params.initialize_backflow(init_rng);
    write_text_file(dir / "trace.csv", trace_header());
  }

  std::ofstream trace(dir / "trace.csv", std::ios::app);
  auto tc = cfg.make_train();
  tc.on_trace = [&](const bhvmc::TraceRow& r) {
    trace << trace_line(r);
    trace.flush();
  };
  tc.on_checkpoint = [&](int step, const bhvmc::AnsatzParameters& p) {
    bhvmc::save_checkpoint(checkpoint_path(dir, step).string(), geometry, p);
  };

  bhvmc::train(model, geometry, params, tc, start_step);

  bhvmc::BackflowJastrow psi(geometry, params, cfg.mf_prior);
  const auto m = measure_energy(cfg, geometry, psi, kMeasureStreamBase);
  json summary;
  summary["E_total"] = m.energy.mean;
  summary["E_err"] = m.energy.std_error;
  summary["E_per_site"] = m.energy.mean / geometry.n_sites();
  summary["VarE"] = m.energy.variance;
  summary["vscore"] = m.vscore;
  summary["acceptance"] = m.acceptance;
  summary["n_params"] = params.size();
  summary["config_hash"] = bhvmc::fnv1a_hex(config_text);
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

int cmd_measure(const std::string& config_path, const std::string& checkpoint,
                bool with_obdm, bool with_renyi, const std::string& obdm_csv,
                const std::string& dump_samples, const std::string& params_json,
                const std::string& out_path) {
  const auto cfg = bhvmc::ExperimentConfig::from_file(config_path);
  const auto geometry = cfg.make_geometry();
  const auto model = cfg.make_model();
  const auto params = bhvmc::load_checkpoint(checkpoint, geometry);
  const bhvmc::BackflowJastrow psi(geometry, params, cfg.mf_prior);
  if (!params_json.empty())
    write_text_file(params_json, bhvmc::parameters_to_json(params) + "\n");

  const auto m = measure_energy(cfg, geometry, psi, kMeasureStreamBase);
  json out;
  out["E_total"] = m.energy.mean;
  out["E_err"] = m.energy.std_error;
  out["E_per_site"] = m.energy.mean / geometry.n_sites();
  out["VarE"] = m.energy.variance;
  out["tau_int"] = m.energy.tau_int;
  out["vscore"] = m.vscore;
  out["acceptance"] = m.acceptance;

  if (with_obdm) {
    const auto obdm = bhvmc::estimate_obdm(model, geometry, psi, m.batch);
    out["rho0"] = obdm.condensate_fraction();
    out["rho0_err"] = obdm.condensate_fraction_error();
    if (!obdm_csv.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "i,j,value,error\n";
      for (int i = 0; i < geometry.n_sites(); ++i)
        for (int j = 0; j < geometry.n_sites(); ++j)
          os << i << "," << j << "," << obdm.values(i, j) << ","
             << obdm.errors(i, j) << "\n";
      write_text_file(obdm_csv, os.str());
    }
  }
  if (with_renyi) {
    const auto mask = bhvmc::first_half_partition(geometry);
    const auto s2 = bhvmc::renyi2_swap(psi, geometry, mask, cfg.particles(),
                                       cfg.make_sampler(), kRenyiStreamBase);
    out["S2"] = s2.value;
    out["S2_err"] = s2.std_error;
    out["S2_pairs"] = s2.n_pairs;
    out["S2_zero_ratios"] = s2.n_zero_ratio;
  }
  if (!dump_samples.empty()) {
    std::ostringstream os;
    os << "# L=" << cfg.length << " N=" << cfg.particles() << " seed=" << cfg.seed
       << "\n";
    for (std::size_t s = 0; s < m.batch.n_samples; ++s) {
      const auto occ = m.batch.configuration(s);
      for (int i = 0; i < m.batch.n_sites; ++i)
        os << occ[i] << (i + 1 == m.batch.n_sites ? '\n' : ' ');
    }
    write_text_file(dump_samples, os.str());
  }

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
  return 0;
}

int cmd_ed(const std::string& config_path, const std::string& out_path) {
  const auto cfg = bhvmc::ExperimentConfig::from_file(config_path);
  const auto geometry = cfg.make_geometry();
  const auto model = cfg.make_model();
  const int n = cfg.particles();

  bhvmc::FockBasis basis(geometry.n_sites(), n);
  const auto h = bhvmc::build_hamiltonian_matrix(basis, geometry.bonds(), cfg.hopping,
                                                 cfg.repulsion);
  const auto ed = bhvmc::ground_state(h, basis);
  const auto obs = bhvmc::exact_observables(ed, geometry, model);

  json out;
  out["geometry"] = cfg.geometry;
  out["length"] = cfg.length;
  out["n_sites"] = geometry.n_sites();
  out["N"] = n;
  out["J"] = cfg.hopping;
  out["U"] = cfg.repulsion;
  out["dimension"] = ed.dimension;
  out["E0"] = ed.ground_energy;
  out["E0_per_site"] = ed.ground_energy / geometry.n_sites();
  out["residual"] = ed.residual;
  out["rho0"] = obs.condensate_fraction;
  out["energy_variance"] = obs.energy_variance;
  if (geometry.n_sites() % 2 == 0) {
    std::vector<int> half(geometry.n_sites() / 2);
    std::iota(half.begin(), half.end(), 0);
    out["S2_half"] = bhvmc::exact_renyi2(ed, half);
  }

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
  return 0;
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::size_t min_cols) {
  std::ifstream is(path);
  if (!is) throw bhvmc::IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.empty()) continue;
    if (row.size() < min_cols)
      throw bhvmc::ConfigError("csv row with too few columns in " + path);
    rows.push_back(row);
  }
  if (rows.empty()) throw bhvmc::ConfigError("no data rows in " + path);
  return rows;
}

json fit_to_json(const bhvmc::FitResult& fit) {
  json j;
  j["parameters"] = fit.parameters;
  j["chi_square"] = fit.chi_square;
  j["dof"] = fit.dof;
  j["converged"] = fit.converged;
  std::vector<std::vector<double>> cov;
  for (std::size_t i = 0; i < fit.covariance.rows(); ++i)
    cov.emplace_back(fit.covariance.row(i).begin(), fit.covariance.row(i).end());
  j["covariance"] = cov;
  return j;
}

int cmd_fit(const std::string& mode, const std::string& input, double beta_over_nu,
            double one_over_nu, double critical_x, bool superfluid, bool freeze_b,
            const std::string& curve_csv, const std::string& out_path) {
  json out;
  if (mode == "scaling") {
    // columns: L, J/U, rho0/N, err
    const auto rows = read_csv(input, 4);
    std::map<double, std::vector<bhvmc::FitPoint>> curves;
    for (const auto& r : rows) {
      const double scale = std::pow(r[0], beta_over_nu);
      curves[r[0]].push_back({r[1], scale * r[2], scale * r[3]});
    }
    out["mode"] = "scaling";
    out["beta_over_nu"] = beta_over_nu;
    auto fits = json::array();
    for (const auto& [size, points] : curves) {
      const auto fit = bhvmc::fit_scaling_function(points);
      if (!fit.converged)
        throw bhvmc::SolverError("scaling fit did not converge for L = " +
                                 std::to_string(size));
      json jf = fit_to_json(fit);
      jf["L"] = size;
      jf["critical_x_estimate"] = fit.parameters[1];  // b ~ J_c/U
      fits.push_back(jf);
    }
    out["fits"] = fits;
  } else if (mode == "entropy") {
    // columns: L, S2, err
    const auto rows = read_csv(input, 3);
    std::vector<bhvmc::FitPoint> points;
    for (const auto& r : rows) points.push_back({r[0], r[1], r[2]});
    const auto fit = bhvmc::fit_entropy_scaling(points, superfluid, freeze_b);
    out["mode"] = "entropy";
    out["superfluid"] = superfluid;
    out["freeze_b"] = freeze_b;
    out.update(fit_to_json(fit));
  } else if (mode == "collapse") {
    // columns: L, J/U, rho0/N, err
    const auto rows = read_csv(input, 4);
    std::vector<bhvmc::CollapsePoint> points;
    for (const auto& r : rows) points.push_back({r[0], r[1], r[2], r[3]});
    const auto transformed =
        bhvmc::data_collapse_transform(points, critical_x, one_over_nu, beta_over_nu);
    out["mode"] = "collapse";
    out["critical_x"] = critical_x;
    out["one_over_nu"] = one_over_nu;
    out["beta_over_nu"] = beta_over_nu;
    out["quality"] = bhvmc::collapse_quality(transformed);
    auto rows_out = json::array();
    for (const auto& p : transformed)
      rows_out.push_back({p.size, p.x, p.y, p.err});
    out["points"] = rows_out;
    if (!curve_csv.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "L,x_scaled,y_scaled,err_scaled\n";
      for (const auto& p : transformed)
        os << p.size << "," << p.x << "," << p.y << "," << p.err << "\n";
      write_text_file(curve_csv, os.str());
    }
  } else {
    throw bhvmc::ConfigError("fit mode must be scaling, entropy or collapse");
  }

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Monte Carlo for the 2D Bose-Hubbard model with a "
               "neural backflow-Jastrow ansatz"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, out_path;
  bool resume = false;

  auto* optimize = app.add_subcommand("optimize", "run the two-stage SR optimization");
  optimize->add_option("-c,--config", config_path, "config file")->required();
  optimize->add_flag("--resume", resume, "resume from the latest checkpoint");

  std::string obdm_csv, dump_samples, params_json;
  bool with_obdm = false, with_renyi = false;
  auto* measure = app.add_subcommand("measure", "estimate observables from a checkpoint");
  measure->add_option("-c,--config", config_path, "config file")->required();
  measure->add_option("-k,--checkpoint", checkpoint, "checkpoint file")->required();
  measure->add_flag("--obdm", with_obdm, "estimate the one-body density matrix");
  measure->add_option("--obdm-csv", obdm_csv, "write the OBDM to this CSV");
  measure->add_flag("--renyi", with_renyi, "estimate the half-system Renyi-2 entropy");
  measure->add_option("--dump-samples", dump_samples, "write raw samples to this file");
  measure->add_option("--params-json", params_json,
                      "export the checkpoint parameters as structured JSON");
  measure->add_option("-o,--out", out_path, "write the JSON result here");

  auto* ed = app.add_subcommand("ed", "exact diagonalization baseline");
  ed->add_option("-c,--config", config_path, "config file")->required();
  ed->add_option("-o,--out", out_path, "write the JSON record here");

  std::string fit_mode = "scaling", fit_input, curve_csv;
  double beta_over_nu = 0.5189;  // 3D XY exponents, configuration inputs
  double one_over_nu = 1.4888;
  double critical_x = 0.05974;
  bool superfluid = false, freeze_b = false;
  auto* fit = app.add_subcommand("fit", "scaling, entropy and collapse analyses");
  fit->add_option("-m,--mode", fit_mode, "scaling | entropy | collapse")->required();
  fit->add_option("-i,--input", fit_input, "input CSV")->required();
  fit->add_option("--beta-over-nu", beta_over_nu, "exponent ratio beta/nu");
  fit->add_option("--one-over-nu", one_over_nu, "exponent 1/nu");
  fit->add_option("--critical-x", critical_x, "J_c/U used by the collapse");
  fit->add_option("--curve-csv", curve_csv, "write transformed collapse points as CSV");
  fit->add_flag("--superfluid", superfluid, "include the log term (entropy mode)");
  fit->add_flag("--freeze-b", freeze_b, "pin the log coefficient at 1/2");
  fit->add_option("-o,--out", out_path, "write the JSON result here");

  auto* defaults = app.add_subcommand("defaults", "print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (optimize->parsed()) return cmd_optimize(config_path, resume);
    if (measure->parsed())
      return cmd_measure(config_path, checkpoint, with_obdm, with_renyi, obdm_csv,
                         dump_samples, params_json, out_path);
    if (ed->parsed()) return cmd_ed(config_path, out_path);
    if (fit->parsed())
      return cmd_fit(fit_mode, fit_input, beta_over_nu, one_over_nu, critical_x,
                     superfluid, freeze_b, curve_csv, out_path);
    if (defaults->parsed()) {
      std::cout << bhvmc::ExperimentConfig::defaults().serialize();
      return 0;
    }
  } catch (const bhvmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bhvmc::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const bhvmc::DimensionError& e) {
    std::cerr << "dimension guard: " << e.what() << "\n";
    return 4;
  } catch (const bhvmc::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 5;
  } catch (const bhvmc::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 6;
  } catch (const bhvmc::SamplingError& e) {
    std::cerr << "sampling error: " << e.what() << "\n";
    return 7;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
