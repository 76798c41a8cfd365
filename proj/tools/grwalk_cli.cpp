#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "grwalk/error.hpp"
#include "grwalk/pipeline.hpp"

namespace fs = std::filesystem;
using namespace grwalk;

namespace {

// Every config key is also a flag (--burn-in for burn_in); flags override the file.
struct ConfigFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> manifest_file;
  std::map<std::string, std::string> values;
  std::vector<std::string> assignments;

  void attach(CLI::App* app, bool from_manifest) {
    app->add_option("-c,--config", config_file, "Plain-text key = value config file")->check(CLI::ExistingFile);
    if (from_manifest)
      app->add_option("--manifest", manifest_file, "Re-run the config echoed in a manifest.json")
          ->check(CLI::ExistingFile);
    app->add_option("--set", assignments, "Extra key=value overrides");
    for (const auto& [key, unused] : RunConfig{}.entries()) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app->add_option_function<std::string>(
          "--" + flag, [this, key = key](const std::string& v) { values[key] = v; }, "Config key " + key);
    }
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (manifest_file) cfg = RunConfig::from_manifest(read_json(*manifest_file));
    else if (config_file) cfg = RunConfig::load(*config_file);
    for (const auto& [k, v] : values) cfg.set(k, v);
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + a + "'");
      cfg.set(a.substr(0, eq), a.substr(eq + 1));
    }
    return cfg;
  }
};

void print_summary(const Analysis& a) {
  const Vector v = a.spectral.values();
  std::cout << (a.spectral.mode == SpectralMode::eigen ? "eigenvalues:" : "singular values:");
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(v.size(), 10); ++i) std::cout << " " << v[i];
  std::cout << "\nclusters: " << a.r << (a.gap.no_clear_gap ? " (no clear spectral gap)" : "") << "\n";
  std::cout << "transition matrix:\n" << a.transitions << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering and reconstruction of graphon random walks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ConfigFlags simulate_flags, ingest_flags, analyze_flags, run_flags;
  std::string out_path, trajectory_path, run_dir;
  std::optional<int> reconstruct_r;
  int reconstruct_grid = kReconstructionGrid;

  auto* simulate = app.add_subcommand("simulate", "Simulate a random walk or the lemon-slice SDE");
  simulate_flags.attach(simulate, false);
  simulate->add_option("-o,--out", out_path, "Trajectory CSV")->required();

  auto* ingest = app.add_subcommand("ingest", "Scale a CSV signal onto [0,1]");
  ingest_flags.attach(ingest, false);
  ingest->add_option("-o,--out", out_path, "Scaled trajectory CSV")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "Spectral analysis and clustering of a trajectory");
  analyze_flags.attach(analyze_cmd, false);
  analyze_cmd->add_option("-t,--trajectory", trajectory_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);

  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Rank-r tables from an analysed run directory");
  reconstruct_cmd->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  reconstruct_cmd->add_option("-r", reconstruct_r, "Rank (default: the run's r)");
  reconstruct_cmd->add_option("--grid", reconstruct_grid, "Points per axis");

  auto* plot = app.add_subcommand("plotdata", "Emit plot-ready CSV files for a run directory");
  plot->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* run_cmd = app.add_subcommand("run", "Full pipeline");
  run_flags.attach(run_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed() || ingest->parsed()) {
      RunConfig cfg = (simulate->parsed() ? simulate_flags : ingest_flags).resolve();
      if (ingest->parsed() && cfg.signal.empty()) throw ConfigError("ingest needs --signal");
      cfg.validate();
      Json metadata = Json::object();
      const Trajectory t = acquire(cfg, metadata);
      write_trajectory(out_path, t, metadata);
      std::cout << "wrote " << t.states.size() << " states to " << out_path << "\n";
    } else if (analyze_cmd->parsed()) {
      const RunConfig cfg = analyze_flags.resolve();
      const Trajectory t = read_trajectory(trajectory_path);
      const Analysis a = analyze(t, cfg);
      const fs::path dir = resolve_output_dir(cfg);
      write_analysis(dir, t, a);
      print_summary(a);
      std::cout << "artifacts in " << dir.string() << "\n";
    } else if (reconstruct_cmd->parsed()) {
      const SpectralModel sm = SpectralModel::from_json(read_json(fs::path(run_dir) / "spectral_model.json"));
      const int r = reconstruct_r ? *reconstruct_r : read_json(fs::path(run_dir) / "gap.json").at("r").get<int>();
      const ReconstructionSet rs = reconstruct(sm, r, reconstruct_grid);
      write_reconstruction(run_dir, rs);
      std::cout << "rank-" << r << " tables written to " << run_dir << " (negative mass " << rs.p.negative_mass
                << ")\n";
    } else if (plot->parsed()) {
      for (const auto& p : emit_plot_data(run_dir)) std::cout << p.string() << "\n";
    } else if (run_cmd->parsed()) {
      const RunConfig cfg = run_flags.resolve();
      const RunResult res = run(cfg);
      print_summary(res.analysis);
      std::cout << "artifacts in " << res.directory.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
