#pragma once

#include <string>
#include <vector>

#include "mflab/harness/config.hpp"

namespace mflab::harness {

struct Row {
  int n = 0;
  int m = 0;
  double t = 0.0;
  double trace_dist = 0.0;
  double hs_dist = 0.0;
  double op_dist = 0.0;
  double cross_term = 0.0;      // largest pairwise component overlap, 0 for single states
  double bound_envelope = 0.0;  // bound shape with unit constants
  double runtime_s = 0.0;
  std::string config_hash;
};

enum class Metric { trace, hilbert_schmidt };
std::string to_string(Metric m);
Metric parse_metric(const std::string& s);
double metric_value(const Row& r, Metric m);

struct ConvergenceReport {
  std::string config_hash;
  std::string experiment;  // "converge" or "superpose"
  Metric metric = Metric::trace;
  std::vector<Row> rows;  // ordered by (n, t)
  Json summary = Json::object();
  Json metadata = Json::object();
};

struct SweepOptions {
  int threads = 1;
};

// Distances between the reduced density matrix of the exactly evolved state
// and the Hartree projector, for every (n, t) of the config.
ConvergenceReport run_convergence_sweep(const ExperimentConfig& config, const SweepOptions& options = {});
// Same for superpositions, measured against the weighted mixture of the
// Hartree-evolved components.
ConvergenceReport run_superposition_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

// Concatenates reports of one configuration; mixed hashes raise ConfigError.
ConvergenceReport aggregate(const std::vector<ConvergenceReport>& parts);

}  // namespace mflab::harness
