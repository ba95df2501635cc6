#include "qgrom/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cinttypes>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "qgrom/analysis.hpp"
#include "qgrom/config.hpp"
#include "qgrom/errors.hpp"
#include "qgrom/io.hpp"
#include "qgrom/pipeline.hpp"

namespace qgrom::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

RunConfig load_config(const Options& opt) {
  RunConfig cfg = RunConfig::load(opt.config);
  if (opt.seed) cfg.set("seed", std::to_string(*opt.seed));
  return cfg;
}

fs::path output_path(const Options& opt, const RunConfig& cfg, const std::string& key) {
  if (!opt.out.empty()) return opt.out;
  if (!cfg.has(key)) throw ConfigError("no output path: pass --out or set '" + key + "'");
  return cfg.text(key);
}

void cmd_fom(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt);
  const FomConfig fc = cfg.fom();
  const fs::path target = output_path(opt, cfg, "snapshot_file");

  SnapshotSet reference;
  reference.grid = fc.grid;
  SampleObserver observer;
  if (cfg.has("reference_file")) {
    observer = [&](std::size_t, double t, const Field2D& w) {
      reference.times.push_back(t);
      reference.omega.push_back(w);
    };
  }
  const SnapshotSet set = run_fom(fc, observer);
  io::write_snapshots(target, set);
  out << "grid=" << fc.grid.nx() << "x" << fc.grid.ny() << " snapshots=" << set.size()
      << " window=[" << set.times.front() << "," << set.times.back() << "]"
      << " |omega_mean|=" << l2_grid_norm(set.omega_mean)
      << " |psi_mean|=" << l2_grid_norm(set.psi_mean) << "\n";
  if (observer) {
    reference.compute_means();
    io::write_snapshots(cfg.text("reference_file"), reference);
    out << "reference snapshots=" << reference.size() << " window=[" << reference.times.front()
        << "," << reference.times.back() << "]\n";
  }
}

void cmd_pod(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt);
  cfg.require({"snapshot_file", "modes"});
  const SnapshotSet set = io::read_snapshots(cfg.text("snapshot_file"));
  const PodBasis basis = build_pod(set, cfg.integer("modes"));
  io::write_basis(output_path(opt, cfg, "basis_file"), basis);
  double total = 0.0, kept = 0.0;
  for (std::size_t k = 0; k < basis.lambdas.size(); ++k) {
    total += std::max(0.0, basis.lambdas[k]);
    if (k < basis.r) kept += basis.lambdas[k];
  }
  out << "modes=" << basis.r << " usable=" << usable_mode_count(basis.lambdas)
      << " lambda1=" << basis.lambdas.front() << " energy=" << (total > 0 ? kept / total : 0.0)
      << "\n";
}

void cmd_romgp(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt);
  cfg.require({"basis_file", "re", "ro", "t_end"});
  const PodBasis basis = io::read_basis(cfg.text("basis_file"));
  const GalerkinTensors tensors = assemble_tensors(basis, cfg.real("re"), cfg.real("ro"));
  if (cfg.has("tensors_file")) io::write_tensors(cfg.text("tensors_file"), tensors);
  const double gp_dt = cfg.real_or("gp_dt", 1e-3);
  if (!(gp_dt > 0.0)) throw ConfigError("gp_dt must be > 0");
  const RomTrajectory traj = pipeline::run_gp(basis, tensors, gp_dt, cfg.real("t_end"));
  io::write_trajectory(output_path(opt, cfg, "gp_trajectory_file"), traj);
  out << "rom-gp modes=" << basis.r << " states=" << traj.length();
  if (traj.diverged_at) out << " diverged_at=" << *traj.diverged_at;
  out << "\n";
}

void cmd_train(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt);
  cfg.require({"basis_file", "sigma"});
  const PodBasis basis = io::read_basis(cfg.text("basis_file"));
  const lstm::TrainResult res = lstm::train(basis.a_train, cfg.integer("sigma"), cfg.train());
  io::write_model(output_path(opt, cfg, "model_file"), res.model);
  out << "trained sigma=" << res.model.sigma << " modes=" << res.model.r
      << " epochs=" << res.train_loss.size() << " train_windows=" << res.n_train
      << " validation_windows=" << res.n_validation;
  if (!res.train_loss.empty())
    out << " train_mse=" << res.train_loss.back() << " val_mse=" << res.validation_loss.back();
  out << "\n";
}

void cmd_predict(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt);
  cfg.require({"model_file", "basis_file", "t_end"});
  const lstm::LstmModel model = io::read_model(cfg.text("model_file"));
  const PodBasis basis = io::read_basis(cfg.text("basis_file"));
  const double dt = cfg.real_or("predict_dt", pipeline::sample_interval(basis));
  if (!(dt > 0.0)) throw ConfigError("predict_dt must be > 0");
  const RomTrajectory traj = pipeline::run_predict(model, basis, cfg.real("t_end"), dt);
  io::write_trajectory(output_path(opt, cfg, "lstm_trajectory_file"), traj);
  out << "predicted steps=" << traj.length() - 1 << " states=" << traj.length()
      << " seed=" << model.sigma << " window=[" << traj.times.front() << ","
      << traj.times.back() << "]";
  if (traj.diverged_at) out << " diverged_at=" << *traj.diverged_at;
  out << "\n";
}

RomTrajectory leading(const RomTrajectory& t, std::size_t n) {
  RomTrajectory out = t;
  out.times.resize(n);
  out.a = Matrix(t.r(), n);
  for (std::size_t k = 0; k < t.r(); ++k)
    for (std::size_t c = 0; c < n; ++c) out.a(k, c) = t.a(k, c);
  return out;
}

void cmd_analyze(const Options& opt, std::ostream& out) {
  const RunConfig cfg = load_config(opt);
  cfg.require({"basis_file"});
  const PodBasis basis = io::read_basis(cfg.text("basis_file"));
  std::string ref_key = cfg.has("reference_file") ? "reference_file" : "snapshot_file";
  const SnapshotSet reference = io::read_snapshots(cfg.text(ref_key));

  std::vector<RomTrajectory> trajectories;
  for (const char* key : {"gp_trajectory_file", "lstm_trajectory_file"})
    if (cfg.has(key)) trajectories.push_back(io::read_trajectory(cfg.text(key)));
  if (trajectories.empty())
    throw ConfigError("missing required key 'gp_trajectory_file' or 'lstm_trajectory_file'");

  const RomTrajectory truth = true_projection(reference, basis);
  std::vector<ErrorReport> rows;
  rows.push_back(evaluate_trajectory(truth, basis, reference.omega_mean, reference.psi_mean));
  for (const RomTrajectory& t : trajectories)
    rows.push_back(evaluate_trajectory(t, basis, reference.omega_mean, reference.psi_mean));
  const fs::path report = output_path(opt, cfg, "report_file");
  write_error_report(report, rows);
  for (const ErrorReport& r : rows)
    out << r.model << " R=" << r.r << " sigma=" << r.sigma << " vort_l2=" << r.vort_l2
        << " psi_l2=" << r.psi_l2 << "\n";

  if (cfg.has("timeseries_prefix")) {
    const double train_end = cfg.real_or("train_end", basis.times.back());
    for (const RomTrajectory& t : trajectories) {
      const std::size_t n = std::min(t.length(), truth.length());
      const std::string name = cfg.text("timeseries_prefix") +
                               (t.provenance == Provenance::gp ? "_gp.csv" : "_lstm.csv");
      export_timeseries(leading(t, n), leading(truth, n), train_end, name);
    }
  }
  if (cfg.has("hurst_file")) {
    std::ofstream h(cfg.text("hurst_file"));
    if (!h) throw IoError("cannot open " + cfg.text("hurst_file"));
    h << "mode,hurst,fit_r2\n";
    for (std::size_t k = 0; k < basis.r; ++k) {
      const HurstResult res = hurst_exponent(basis.a_train.row(k));
      h << k + 1 << ',' << res.h << ',' << res.fit_r2 << '\n';
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced-order models for wind-driven quasi-geostrophic turbulence", "qgrom"};
  app.require_subcommand(1);

  Options opt;
  std::function<void(const Options&, std::ostream&)> action;
  auto add = [&](const char* name, const char* help, void (*fn)(const Options&, std::ostream&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "key = value configuration file")->required();
    sub->add_option("--out", opt.out, "output path (overrides the config entry)");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { opt.seed = s; },
                                            "override the configured seed");
    sub->callback([&action, fn] { action = fn; });
  };
  add("fom", "run the full-order model and store snapshots", cmd_fom);
  add("pod", "build the POD basis from stored snapshots", cmd_pod);
  add("rom-gp", "assemble and integrate the Galerkin ROM", cmd_romgp);
  add("train", "train the LSTM on the modal coefficients", cmd_train);
  add("predict", "closed-loop LSTM prediction of the modal coefficients", cmd_predict);
  add("analyze", "mean-field errors, time series and Hurst exponents", cmd_analyze);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    action(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace qgrom::cli
