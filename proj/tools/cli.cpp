#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbve/config.hpp"
#include "fbve/errors.hpp"
#include "fbve/geometry.hpp"
#include "fbve/reports.hpp"
#include "fbve/snapshot.hpp"

namespace fbve::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string input;
  std::string output_dir = ".";
  int threads = 0;
  bool strict = false;
  std::optional<std::uint64_t> seed;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A `.json` input is treated as a run manifest and its embedded config is used.
io::Config load_config(const Options& o) {
  io::Config c = o.input.size() > 5 && o.input.substr(o.input.size() - 5) == ".json"
                     ? io::config_from_json(io::manifest_config(slurp(o.input)))
                     : io::parse_config(o.input);
  if (o.seed) c.perturbation.seed = *o.seed;
  if (o.threads > 0) c.experiment.threads = o.threads;
  return c;
}

fs::path prepare_dir(const Options& o) {
  fs::path dir(o.output_dir);
  fs::create_directories(dir);
  return dir;
}

io::RunManifest start_manifest(const std::string& command, const io::Config& c) {
  io::RunManifest m;
  m.command = command;
  m.config_json = c.to_json();
  m.config_hash = io::hex64(c.hash());
  m.started = io::utc_now();
  return m;
}

void finish_manifest(io::RunManifest& m, const fs::path& dir, int status) {
  m.exit_status = status;
  m.finished = io::utc_now();
  io::write_file_atomic((dir / "manifest.json").string(), io::manifest_json(m));
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const io::Config c = load_config(o);
  const fs::path dir = prepare_dir(o);
  io::RunManifest man = start_manifest("simulate", c);
  out << "# resolved config\n" << c.to_toml();

  const FlowState initial = c.initial_state();
  diagnostics::Recorder rec(c.params, c.diagnostics);
  const auto traj = dynamics::simulate(c.run, c.params, initial, nullptr, rec.observer());
  const FlowState& fin = traj.final_state();

  std::string csv = diagnostics::csv_header() + "\n";
  for (const auto& r : rec.rows()) csv += diagnostics::csv_row(r) + "\n";
  io::write_file_atomic((dir / "diagnostics.csv").string(), csv);
  man.diagnostics_csv = "diagnostics.csv";

  io::Snapshot snap{initial, c.params.rho0, c.to_json(), c.hash()};
  io::write_snapshot((dir / "initial.fbvs").string(), snap);
  snap.state = fin;
  io::write_snapshot((dir / "final.fbvs").string(), snap);

  const double drift = ops::max_abs(fin.u - initial.u) + ops::max_abs(fin.v - initial.v);
  const auto balance = diagnostics::energy_balance_residual(traj, c.params);
  out << "dt = " << fmt(traj.dt) << "\nsteps = " << traj.steps << "\nfinal_t = " << fmt(fin.t)
      << "\ndrift = " << fmt(drift) << "\nenergy_residual = " << fmt(balance.max_residual)
      << "\nmax_piola_residual = " << fmt(traj.max_piola_residual)
      << "\nmax_trace_ratio = " << fmt(rec.max_trace_ratio())
      << "\nmax_korn_ratio = " << fmt(rec.max_korn_ratio()) << "\n";

  if (rec.max_trace_ratio() > c.monitors.trace_ratio)
    man.warnings.push_back("trace ratio " + fmt(rec.max_trace_ratio()) + " exceeds limit " +
                           fmt(c.monitors.trace_ratio));
  if (rec.max_korn_ratio() > c.monitors.korn_ratio)
    man.warnings.push_back("Korn ratio " + fmt(rec.max_korn_ratio()) + " exceeds limit " +
                           fmt(c.monitors.korn_ratio));
  for (const auto& w : man.warnings) err << "warning: " << w << "\n";

  json res = {{"dt", traj.dt},
              {"steps", traj.steps},
              {"final_t", fin.t},
              {"drift", drift},
              {"energy_residual", balance.max_residual},
              {"max_piola_residual", traj.max_piola_residual},
              {"max_j_drift", traj.max_j_drift},
              {"max_trace_ratio", rec.max_trace_ratio()},
              {"max_korn_ratio", rec.max_korn_ratio()},
              {"sup_energy_functional", rec.sup_energy_functional()}};
  man.results_json = res.dump();

  int status = kSuccess;
  if (!traj.ok()) {
    man.violation = io::Violation{traj.failure->reason, traj.failure->t};
    err << "run aborted at t = " << fmt(traj.failure->t) << ": " << traj.failure->reason << "\n";
    status = kAborted;
  } else if (o.strict && !man.warnings.empty()) {
    status = kAcceptance;
  }
  finish_manifest(man, dir, status);
  return status;
}

json sweep_json(const experiments::SweepResult& r, const experiments::LayerVerdict& v) {
  json runs = json::array();
  for (const auto& s : r.runs)
    runs.push_back({{"epsilon", s.epsilon},
                    {"ok", s.ok},
                    {"failure", s.failure},
                    {"error_h1", s.error_h1},
                    {"sup_E", s.sup_E},
                    {"layer", s.layer_at_delta}});
  return {{"dt", r.dt},
          {"ok", r.ok},
          {"failed_epsilon", r.failed_epsilon},
          {"monotone", r.monotone},
          {"fit_status", experiments::to_string(r.fit.status)},
          {"alpha", r.fit.slope},
          {"r2", r.fit.r2},
          {"sup_E_ratio", r.sup_E_ratio},
          {"layer_verdict", v.label()},
          {"layer_growth", v.growth},
          {"layer_exponent", v.exponent},
          {"runs", runs}};
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const io::Config c = load_config(o);
  const fs::path dir = prepare_dir(o);
  io::RunManifest man = start_manifest("sweep", c);
  const auto cfg = c.sweep_config();
  const auto& ex = c.experiment;

  const auto res = experiments::viscosity_sweep(cfg);
  io::write_file_atomic((dir / "sweep.csv").string(), experiments::sweep_csv(res));
  const auto verdict = experiments::layer_study(res, ex.r_bound);
  json results = {{"sweep", sweep_json(res, verdict)}};

  int status = kSuccess;
  if (!res.ok) {
    err << "sweep run aborted at epsilon = " << res.failed_epsilon << "\n";
    man.violation = io::Violation{"run aborted at epsilon = " + res.failed_epsilon, 0.0};
    man.results_json = results.dump();
    finish_manifest(man, dir, kAborted);
    return kAborted;
  }

  const bool rate_ok = res.monotone && (res.fit.status == experiments::FitStatus::floor ||
                                        (res.fit.status == experiments::FitStatus::ok &&
                                         res.fit.slope >= ex.alpha_min && res.fit.r2 >= ex.r2_min));
  const bool energy_ok = res.sup_E_ratio <= 2.0;
  bool layer_ok = verdict.no_layer;
  out << "dt = " << fmt(res.dt) << "\nmonotone = " << (res.monotone ? "true" : "false")
      << "\nfit = " << experiments::to_string(res.fit.status) << "\nalpha = " << fmt(res.fit.slope)
      << "\nr2 = " << fmt(res.fit.r2) << "\nsup_E_ratio = " << fmt(res.sup_E_ratio)
      << "\nlayer = " << verdict.label() << "\nlayer_growth = " << fmt(verdict.growth) << "\n";

  if (ex.ablation) {
    const auto abl = experiments::viscosity_sweep(experiments::ablation(cfg));
    io::write_file_atomic((dir / "ablation.csv").string(), experiments::sweep_csv(abl));
    const auto av = experiments::layer_study(abl, ex.r_bound);
    results["ablation"] = sweep_json(abl, av);
    out << "ablation_layer = " << av.label() << "\nablation_growth = " << fmt(av.growth) << "\n";
    layer_ok = layer_ok && abl.ok && av.growth > verdict.growth;
  }
  results["verdict"] = {{"rate", rate_ok}, {"energy", energy_ok}, {"layer", layer_ok}};
  man.results_json = results.dump();
  if (!rate_ok) err << "sweep: convergence-rate verdict failed\n";
  if (!energy_ok) err << "sweep: uniform-energy verdict failed\n";
  if (!layer_ok) err << "sweep: boundary-layer verdict failed\n";
  if (!(rate_ok && energy_ok && layer_ok)) status = kAcceptance;
  finish_manifest(man, dir, status);
  return status;
}

int cmd_mms(const Options& o, std::ostream& out, std::ostream& err) {
  const io::Config c = load_config(o);
  const fs::path dir = prepare_dir(o);
  io::RunManifest man = start_manifest("mms", c);
  const auto st = experiments::mms_order_study(c.mms_config());
  std::string csv = "n1,h,error_h1\n";
  for (std::size_t k = 0; k < st.n1.size(); ++k)
    csv += std::to_string(st.n1[k]) + "," + fmt(st.h[k]) + "," + fmt(st.errors[k]) + "\n";
  io::write_file_atomic((dir / "mms.csv").string(), csv);
  out << csv << "order = " << fmt(st.order) << "\nstatus = " << st.status << "\n";
  man.results_json = json{{"order", st.order}, {"status", st.status}, {"errors", st.errors}}.dump();

  int status = kSuccess;
  if (st.status.rfind("aborted", 0) == 0) {
    man.violation = io::Violation{st.status, 0.0};
    status = kAborted;
  } else if (st.status != "ok" || st.order < c.experiment.order_min ||
             st.order > c.experiment.order_max) {
    err << "mms: order " << fmt(st.order) << " outside [" << fmt(c.experiment.order_min) << ", "
        << fmt(c.experiment.order_max) << "]\n";
    status = kAcceptance;
  }
  finish_manifest(man, dir, status);
  return status;
}

MaterialParams snapshot_params(const io::Snapshot& s) {
  MaterialParams p =
      s.config_json.empty() ? MaterialParams{} : io::config_from_json(s.config_json).params;
  p.rho0 = s.rho0;
  return p;
}

int cmd_diagnose(const Options& o, std::ostream& out, std::ostream&) {
  const io::Snapshot s = io::read_snapshot(o.input);
  const MaterialParams p = snapshot_params(s);
  diagnostics::Recorder rec(p, {1, 1});
  std::deque<FlowState> hist{s.state};
  const dynamics::StepView view{0, 0.0, hist.back(), hist, diagnostics::dissipation_rate(s.state, p),
                                0.0, true};
  rec.observer()(view);
  out << diagnostics::csv_header() << "\n" << diagnostics::csv_row(rec.rows().front()) << "\n";
  return kSuccess;
}

int cmd_identities(const Options& o, std::ostream& out, std::ostream& err) {
  const io::Snapshot s = io::read_snapshot(o.input);
  const VectorField eta = s.state.eta();
  const MatrixField F = geometry::deformation_gradient(eta);
  const MatrixField a = geometry::cofactor(F);
  const ScalarField J = geometry::jacobian(F);
  const double piola = geometry::piola_residual(a);
  const double values[] = {piola, geometry::piola_residual_boundary(a),
                           geometry::metric_decomp_residual(a, F),
                           geometry::cofactor_identity_residual(a, F, J),
                           geometry::geo_diff_residual(eta)};
  const char* names[] = {"piola_interior", "piola_boundary", "metric_decomposition",
                         "cofactor_jacobian", "geometric_difference"};
  out << "identity,residual\n";
  for (std::size_t k = 0; k < std::size(names); ++k) out << names[k] << "," << fmt(values[k]) << "\n";
  if (piola > 1e-10) {
    err << "identities: interior Piola residual " << fmt(piola) << " exceeds 1e-10\n";
    return kAborted;
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free-boundary viscoelastic fluid simulator", "fbve"};
  app.set_version_flag("--version", io::version_string());
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add = [&](const std::string& name, const std::string& desc, const std::string& what) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option(what, o.input, what)->required();
    sub->add_option("--output-dir", o.output_dir, "Directory for artifacts");
    sub->add_option("--threads", o.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", o.strict, "Treat monitored-ratio warnings as errors");
    sub->add_option("--seed", seed, "Perturbation RNG seed");
    return sub;
  };
  auto* sim = add("simulate", "Run one trajectory", "config");
  auto* sweep = add("sweep", "Vanishing-viscosity sweep and layer study", "config");
  auto* mms = add("mms", "Manufactured-solution order study", "config");
  auto* diag = add("diagnose", "Diagnostics report for a snapshot", "snapshot");
  auto* ident = add("identities", "Geometric identity residuals for a snapshot", "snapshot");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion& e) {
    out << io::version_string() << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsage;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed")) o.seed = seed;

  try {
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (mms->parsed()) return cmd_mms(o, out, err);
    if (diag->parsed()) return cmd_diagnose(o, out, err);
    if (ident->parsed()) return cmd_identities(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const CorruptFileError& e) {
    err << "input error: " << e.what() << "\n";
    return kConfig;
  } catch (const DegenerateMapError& e) {
    err << "run aborted: " << e.what() << "\n";
    return kAborted;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kAborted;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace fbve::cli
