#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mflab/error.hpp"
#include "mflab/harness/config.hpp"
#include "mflab/harness/fit.hpp"
#include "mflab/harness/invariants.hpp"
#include "mflab/harness/report.hpp"
#include "mflab/harness/sweep.hpp"
#include "mflab/hartree.hpp"
#include "mflab/version.hpp"

namespace fs = std::filesystem;
using namespace mflab;
using namespace mflab::harness;

namespace {

enum Exit { ok = 0, invariant_failure = 1, config_error = 2, capacity_error = 3 };

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "csv";
  bool record_timing = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides output.dir)");
  cmd->add_option("--seed", f.seed, "seed override");
  cmd->add_option("--threads", f.threads, "worker threads; 1 is the reproducible reference")->check(CLI::PositiveNumber);
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--record-timing", f.record_timing, "write measured runtimes into the CSV");
}

ExperimentConfig load(const RunFlags& f) {
  auto c = load_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output.dir = f.out;
  if (f.record_timing) c.output.record_timing = true;
  return c;
}

void print_summary(const ConvergenceReport& r, const fs::path& file) {
  std::cout << r.experiment << "  config " << r.config_hash << "  rows " << r.rows.size() << "  -> " << file.string()
            << '\n';
  for (const auto& s : r.summary.at("per_t")) {
    std::cout << "  t=" << s.at("t").get<double>() << "  ";
    const auto& fit = s.at("fit");
    if (fit.contains("slope")) {
      std::cout << to_string(r.metric) << " slope " << fit.at("slope").get<double>() << "  r2 "
                << fit.at("r2").get<double>();
    } else if (fit.contains("exact_regime")) {
      std::cout << "exact regime (zero distance)";
    } else {
      std::cout << "no fit: " << fit.at("skipped").get<std::string>();
    }
    std::cout << "  decreasing " << (s.at("strictly_decreasing").get<bool>() ? "yes" : "no") << '\n';
  }
}

int run_sweep(const RunFlags& f, bool superpose) {
  const auto c = load(f);
  SweepOptions o;
  o.threads = f.threads;
  const auto report = superpose ? run_superposition_sweep(c, o) : run_convergence_sweep(c, o);
  const auto file =
      write_report(report, c.output.dir, c.output.stem, parse_format(f.format), c.output.record_timing);
  print_summary(report, file);
  return ok;
}

int run_hartree(const RunFlags& f) {
  const auto c = load(f);
  const auto ms = c.mode_system.build();
  std::vector<CVector> phis =
      c.state.family == Family::superposition ? c.state.phis : std::vector<CVector>{c.state.phi};
  std::vector<double> grid = c.t_list;
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  fs::create_directories(c.output.dir);
  HartreeOptions ho;
  ho.tol = c.tolerances.hartree;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const auto tr = evolve_hartree(ms, phis[i], grid, ho);
    const std::string suffix = phis.size() > 1 ? "_" + std::to_string(i) : "";
    const fs::path base = fs::path(c.output.dir) / (c.output.stem + "_hartree" + suffix);
    if (f.format == "json") {
      Json states = Json::array();
      for (std::size_t k = 0; k < tr.times().size(); ++k) {
        Json v = Json::array();
        for (auto z : tr.states()[k]) v.push_back({z.real(), z.imag()});
        states.push_back({{"t", tr.times()[k]}, {"phi", v}, {"norm", tr.norm_log()[k]}, {"energy", tr.energy_log()[k]}});
      }
      std::ofstream(base.string() + ".json") << Json{{"config_hash", config_hash(c)}, {"samples", states}}.dump(2)
                                             << '\n';
    } else {
      std::ofstream out(base.string() + ".csv", std::ios::binary);
      tr.write_csv(out);
    }
    std::cout << "component " << i << ": steps " << tr.steps() << "  norm drift " << tr.max_norm_drift()
              << "  energy drift " << tr.max_energy_drift() << '\n';
  }
  return ok;
}

int run_check(const std::string& level, const std::string& out, std::uint64_t seed) {
  InvariantOptions o;
  o.seed = seed;
  const auto report = run_invariant_suite(parse_level(level), o);
  const auto j = report.to_json();
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream(fs::path(out) / ("check_" + level + ".json")) << j.dump(2) << '\n';
  }
  std::cout << j.dump(2) << '\n';
  return report.passed() ? ok : invariant_failure;
}

int run_fit(const std::vector<std::string>& inputs, double t, const std::string& metric) {
  std::vector<ConvergenceReport> parts;
  for (const auto& in : inputs) parts.push_back(read_report(in));
  const auto report = parts.size() == 1 ? parts.front() : aggregate(parts);
  const Metric m = metric.empty() ? report.metric : parse_metric(metric);
  Json j = {{"t", t}, {"metric", to_string(m)}, {"config_hash", report.config_hash}};
  try {
    const auto fit = fit_rate(report, t, m);
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r2;
    j["points"] = fit.points;
  } catch (const ExactRegime& e) {
    j["exact_regime"] = true;
    j["message"] = e.what();
  }
  std::cout << j.dump(2) << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field convergence laboratory for bosonic Fock-space dynamics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string level = "quick", check_out;
  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "run the invariant suites");
  check->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  check->add_option("--out", check_out, "directory for the JSON verdict");
  check->add_option("--seed", check_seed, "offset added to every suite seed");

  RunFlags converge_flags, superpose_flags, hartree_flags;
  auto* converge = app.add_subcommand("converge", "distance to the Hartree projector as n grows");
  add_run_flags(converge, converge_flags);
  auto* superpose = app.add_subcommand("superpose", "superpositions against the weighted Hartree mixture");
  add_run_flags(superpose, superpose_flags);
  auto* hartree = app.add_subcommand("hartree", "export Hartree trajectories");
  add_run_flags(hartree, hartree_flags);

  std::vector<std::string> fit_inputs;
  double fit_t = 0.0;
  std::string fit_metric;
  auto* fit = app.add_subcommand("fit", "log-log rate fit on existing results");
  fit->add_option("--input", fit_inputs, "CSV or JSON report; repeat to combine runs of one config")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--t", fit_t, "time slice")->required();
  fit->add_option("--metric", fit_metric, "trace or hs (default: the report's own)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*check) return run_check(level, check_out, check_seed);
    if (*converge) return run_sweep(converge_flags, false);
    if (*superpose) return run_sweep(superpose_flags, true);
    if (*hartree) return run_hartree(hartree_flags);
    if (*fit) return run_fit(fit_inputs, fit_t, fit_metric);
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return capacity_error;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return config_error;
  } catch (const ContractError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return config_error;
  } catch (const DegeneracyError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return invariant_failure;
  }
  return ok;
}
