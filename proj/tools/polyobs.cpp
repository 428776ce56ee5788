// polyobs: synthesis-and-verification toolkit for robust observers on
// polytopic discrete-time nonlinear descriptor models.
//
// Subcommands: discretize, synth, simulate, verify. Every run writes a
// manifest.json into the output directory tying outputs to input hashes.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polyobs/certificate_io.hpp"
#include "polyobs/discretizer.hpp"
#include "polyobs/errors.hpp"
#include "polyobs/lmi_synthesis.hpp"
#include "polyobs/manifest.hpp"
#include "polyobs/model_io.hpp"
#include "polyobs/observer.hpp"
#include "polyobs/verification.hpp"
#include "polyobs/version.hpp"

namespace fs = std::filesystem;
using namespace polyobs;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("POLYOBS_OUT_DIR");
  return env && *env ? env : ".";
}

std::string sidecar_path(const std::string& csv_path) {
  std::string p = csv_path;
  const std::string suffix = ".csv";
  if (p.size() >= suffix.size() && p.compare(p.size() - suffix.size(), suffix.size(), suffix) == 0)
    p.resize(p.size() - suffix.size());
  return p + "_meta.json";
}

int cmd_discretize(const std::string& model_path, double ts, const std::string& out_dir) {
  LoadedModel model = load_model(model_path);
  if (!model.is_continuous()) {
    std::cerr << "error: model is not flagged \"continuous\": true\n";
    return 1;
  }
  const double theta = ts / 2.0;
  if (!(ts > 0.0)) {
    std::cerr << "error: --ts must be positive\n";
    return 2;
  }
  for (std::size_t i = 0; i < model.continuous->vertices.size(); ++i) {
    const auto chk = check_generalized_eigs(model.continuous->vertices[i], theta);
    std::cout << "vertex " << i + 1 << ": generalized-eigenvalue margin sigma_min(Ec - theta*Ac) = "
              << chk.margin << (chk.ok ? "" : "  [SINGULAR]") << "\n";
    if (!chk.ok) {
      std::cerr << "error: discretization is singular at vertex " << i + 1 << "\n";
      return 2;
    }
  }
  PolytopicDescriptorSystem sys = tustin(*model.continuous, ts);

  fs::create_directories(out_dir);
  const std::string out_path = (fs::path(out_dir) / "discrete_model.json").string();
  save_model(out_path, sys, model.map);
  RunManifest man;
  man.command = "discretize";
  man.options = {{"ts", ts}};
  man.add_input(model_path);
  man.add_output(out_path);
  man.write(out_dir);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_synth(const std::string& model_path, const std::string& variant_name,
              std::vector<double> weights, double epsilon, bool constant_parameter,
              bool diagonal_multiplier, int sigma_grid, const std::string& dump_path,
              const std::string& out_dir) {
  LoadedModel model = load_model(model_path);
  if (model.is_continuous()) {
    std::cerr << "error: model is continuous; run 'discretize' first\n";
    return 1;
  }
  const Variant variant = variant_name == "thm2" ? Variant::Thm2 : Variant::Thm1;
  if (weights.size() != 3) {
    std::cerr << "error: --weights needs exactly three values c_v,c_w,c_psi\n";
    return 1;
  }
  SynthesisWeights w{weights[0], weights[1], weights[2]};
  SynthesisOptions opts;
  opts.epsilon = epsilon;
  opts.constant_parameter = constant_parameter;
  opts.diagonal_multiplier = diagonal_multiplier;
  opts.sigma_grid = sigma_grid;

  SynthesisCertificate cert;
  try {
    if (!dump_path.empty()) {
      const SynthesisWeights wn = w.normalized();
      LmiProblem lmi = variant == Variant::Thm1 ? build_thm1(*model.system, wn, opts)
                                                : build_thm2(*model.system, wn, opts);
      std::ofstream dump(dump_path);
      lmi.sdp.dump_sdpa(dump);
      std::cout << "dumped SDP to " << dump_path << "\n";
    }
    cert = synthesize(*model.system, model.map, variant, w, opts);
  } catch (const NonConstantEError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const InfeasibleError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const CertificateError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  }

  fs::create_directories(out_dir);
  const std::string cert_path = (fs::path(out_dir) / "certificate.json").string();
  save_certificate(cert_path, cert);

  const CertificateCheckResult chk = check_certificate(*model.system, cert);
  std::ostringstream summary;
  summary << "polyobs synthesis summary\n"
          << "variant:            " << to_string(variant) << "\n"
          << "status:             Optimal (" << cert.iterations << " iterations)\n"
          << "objective:          " << cert.objective_value << "\n"
          << "kappa_v:            " << cert.kappa_v << "\n"
          << "kappa_w:            " << cert.kappa_w << "\n"
          << "kappa_psi:          " << cert.kappa_psi << "\n"
          << "sigma_lower:        " << cert.sigma_lower << "\n"
          << "epsilon:            " << cert.epsilon << "\n"
          << "min block eig:      " << chk.min_block_eig << "\n"
          << "min eig P_i:        " << chk.min_P_eig << "\n"
          << "min sigma X:        " << chk.min_X_sigma << "\n"
          << "kappa_psi*sigma^2:  " << chk.kappa_sigma_sq << "\n";
  const std::string summary_path = (fs::path(out_dir) / "synth_summary.txt").string();
  std::ofstream(summary_path) << summary.str();
  std::cout << summary.str();

  RunManifest man;
  man.command = "synth";
  man.options = {{"variant", to_string(variant)},
                 {"weights", weights},
                 {"epsilon", epsilon},
                 {"constant_parameter", constant_parameter},
                 {"diagonal_multiplier", diagonal_multiplier},
                 {"sigma_grid", sigma_grid}};
  man.add_input(model_path);
  man.add_output(cert_path);
  man.add_output(summary_path);
  man.write(out_dir);
  std::cout << "wrote " << cert_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& cert_path,
                 const std::string& scenario_path, const std::string& out_dir) {
  LoadedModel model = load_model(model_path);
  if (model.is_continuous()) {
    std::cerr << "error: model is continuous; run 'discretize' first\n";
    return 1;
  }
  SynthesisCertificate cert = load_certificate(cert_path);
  Scenario scenario = load_scenario(scenario_path);

  Trajectory traj;
  try {
    ObserverGains gains(cert, model.map);
    traj = simulate(*model.system, model.map, gains, scenario);
  } catch (const ScheduleError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const DimensionError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  traj.model_hash = hash_file(model_path);
  traj.certificate_hash = hash_file(cert_path);
  traj.scenario_hash = hash_file(scenario_path);

  fs::create_directories(out_dir);
  const std::string csv_path = (fs::path(out_dir) / "trajectory.csv").string();
  {
    std::ofstream csv(csv_path);
    traj.write_csv(csv);
  }
  const std::string meta_path = sidecar_path(csv_path);
  save_json_file(meta_path, traj.metadata_to_json());

  // Per-channel plot series for external tools.
  json series;
  auto channel = [&](const std::string& name, auto&& get) {
    json arr = json::array();
    for (const auto& st : traj.steps) arr.push_back(get(st));
    series[name] = std::move(arr);
  };
  const int n_x = model.system->dims().n_x;
  for (int i = 0; i < n_x; ++i) {
    channel("x" + std::to_string(i + 1), [i](const TrajectoryStep& s) { return s.x[i]; });
    channel("xhat" + std::to_string(i + 1), [i](const TrajectoryStep& s) { return s.x_hat[i]; });
    channel("e" + std::to_string(i + 1), [i](const TrajectoryStep& s) { return s.e[i]; });
  }
  channel("e_norm", [](const TrajectoryStep& s) { return s.e.norm(); });
  const std::string series_path = (fs::path(out_dir) / "plot_series.json").string();
  save_json_file(series_path, series);

  RunManifest man;
  man.command = "simulate";
  man.seed = scenario.seed;
  man.has_seed = true;
  man.options = {{"horizon", scenario.horizon}};
  man.add_input(model_path);
  man.add_input(cert_path);
  man.add_input(scenario_path);
  man.add_output(csv_path);
  man.add_output(meta_path);
  man.add_output(series_path);
  man.write(out_dir);
  std::cout << "wrote " << csv_path << " (" << traj.steps.size() << " rows, "
            << traj.clamp_events << " clamped parameter samples)\n";
  return 0;
}

int cmd_verify(const std::string& model_path, const std::string& cert_path,
               const std::string& traj_path, const std::string& suite, const std::string& out_dir) {
  LoadedModel model = load_model(model_path);
  if (model.is_continuous()) {
    std::cerr << "error: model is continuous; run 'discretize' first\n";
    return 1;
  }
  const bool want_assumptions = suite == "assumptions" || suite == "all";
  const bool want_certificate = suite == "certificate" || suite == "all";
  const bool want_trajectory = suite == "trajectory" || (suite == "all" && !traj_path.empty());

  std::vector<CheckReport> reports;
  if (want_assumptions) {
    auto r = assumptions_suite(*model.system, model.map);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  SynthesisCertificate cert;
  if (want_certificate || want_trajectory) {
    if (cert_path.empty()) {
      std::cerr << "error: this suite needs a certificate\n";
      return 1;
    }
    cert = load_certificate(cert_path);
  }
  if (want_certificate) {
    auto r = certificate_suite(*model.system, model.map, cert);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (want_trajectory) {
    if (traj_path.empty()) {
      std::cerr << "error: suite 'trajectory' needs a trajectory CSV\n";
      return 1;
    }
    const std::string meta_path = sidecar_path(traj_path);
    json meta = load_json_file(meta_path);
    std::ifstream csv(traj_path);
    if (!csv) {
      std::cerr << "error: cannot open " << traj_path << "\n";
      return 1;
    }
    Trajectory traj = Trajectory::read_csv(csv, meta);
    const std::string mh = hash_file(model_path);
    const std::string ch = hash_file(cert_path);
    if (!traj.model_hash.empty() && traj.model_hash != mh) {
      std::cerr << "error: trajectory was produced from a different model (hash mismatch)\n";
      return 1;
    }
    if (!traj.certificate_hash.empty() && traj.certificate_hash != ch) {
      std::cerr << "error: trajectory was produced from a different certificate (hash mismatch)\n";
      return 1;
    }
    auto r = trajectory_suite(*model.system, model.map, cert, traj);
    reports.insert(reports.end(), r.begin(), r.end());
  }

  for (const auto& r : reports)
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  (margin " << r.worst_margin
              << (r.detail.empty() ? "" : "; " + r.detail) << ")\n";

  fs::create_directories(out_dir);
  const std::string report_path = (fs::path(out_dir) / "verify_report.json").string();
  json doc;
  doc["suite"] = suite;
  doc["all_pass"] = all_pass(reports);
  doc["checks"] = reports_to_json(reports);
  save_json_file(report_path, doc);

  RunManifest man;
  man.command = "verify";
  man.options = {{"suite", suite}};
  man.add_input(model_path);
  if (!cert_path.empty()) man.add_input(cert_path);
  if (!traj_path.empty()) man.add_input(traj_path);
  man.add_output(report_path);
  man.write(out_dir);

  return all_pass(reports) ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyobs: robust observer synthesis for polytopic descriptor models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string model_path, cert_path, scenario_path, traj_path;
  std::string out_dir = default_out_dir();
  double ts = 0.0;
  std::string variant = "thm1";
  std::vector<double> weights{1.0, 1.0, 1.0};
  double epsilon = 1e-6;
  bool constant_parameter = false, diagonal_multiplier = false;
  int sigma_grid = 50;
  std::string dump_path, suite = "all";

  auto* disc = app.add_subcommand("discretize", "Tustin/semi-implicit discretization of a continuous model");
  disc->add_option("model", model_path, "continuous model JSON")->required();
  disc->add_option("--ts", ts, "sampling period (seconds)")->required();
  disc->add_option("--out", out_dir, "output directory");

  auto* synth = app.add_subcommand("synth", "assemble and solve the observer-synthesis LMIs");
  synth->add_option("model", model_path, "discrete model JSON")->required();
  synth->add_option("--variant", variant, "thm1|thm2")->check(CLI::IsMember({"thm1", "thm2"}));
  synth->add_option("--weights", weights, "objective weights c_v,c_w,c_psi")->delimiter(',');
  synth->add_option("--epsilon", epsilon, "strict LMI margin");
  synth->add_flag("--constant-parameter", constant_parameter, "assemble only the (i,i) blocks");
  synth->add_flag("--diagonal-multiplier", diagonal_multiplier, "per-channel tau (diagonal Lambda)");
  synth->add_option("--sigma-grid", sigma_grid, "grid density for the sigma_lower scan");
  synth->add_option("--dump-sdp", dump_path, "write the assembled SDP in SDPA sparse format");
  synth->add_option("--out", out_dir, "output directory");

  auto* sim = app.add_subcommand("simulate", "closed-loop plant + observer simulation");
  sim->add_option("model", model_path, "discrete model JSON")->required();
  sim->add_option("certificate", cert_path, "certificate JSON")->required();
  sim->add_option("scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--out", out_dir, "output directory");

  auto* ver = app.add_subcommand("verify", "numeric checks: assumptions, certificate, trajectory");
  ver->add_option("model", model_path, "discrete model JSON")->required();
  ver->add_option("certificate", cert_path, "certificate JSON");
  ver->add_option("trajectory", traj_path, "trajectory CSV (with _meta.json sidecar)");
  ver->add_option("--suite", suite, "assumptions|certificate|trajectory|all")
      ->check(CLI::IsMember({"assumptions", "certificate", "trajectory", "all"}));
  ver->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (disc->parsed()) return cmd_discretize(model_path, ts, out_dir);
    if (synth->parsed())
      return cmd_synth(model_path, variant, weights, epsilon, constant_parameter,
                       diagonal_multiplier, sigma_grid, dump_path, out_dir);
    if (sim->parsed()) return cmd_simulate(model_path, cert_path, scenario_path, out_dir);
    if (ver->parsed()) return cmd_verify(model_path, cert_path, traj_path, suite, out_dir);
  } catch (const IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const ScheduleError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
