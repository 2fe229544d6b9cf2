#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mflab/dynamics.hpp"
#include "mflab/json_dump.hpp"
#include "mflab/mode_system.hpp"
#include "mflab/states.hpp"

namespace mflab::harness {

enum class Family { product, coherent, theta, superposition };
Family parse_family(const std::string& s);
std::string to_string(Family f);
SuperpositionKind parse_superposition_kind(const std::string& s);
std::string to_string(SuperpositionKind k);
std::string to_string(ThetaMethod m);

// Excitation number per n: a constant, or round(a ln n) clamped to the
// admissible range.
struct MSchedule {
  std::optional<int> constant = 0;
  double a = 0.0;

  int at(int n) const;
  bool logarithmic() const { return !constant.has_value(); }
};

struct ModeSystemConfig {
  enum class Geometry { lattice, dense } geometry = Geometry::lattice;
  LatticeSpec lattice;
  CMatrix h;
  RMatrix v;

  ModeSystem build() const;
  int modes() const;
};

struct StateConfig {
  Family family = Family::product;
  CVector phi;  // product, coherent, theta
  MSchedule m;  // theta and Theta superpositions
  ThetaMethod theta_method = ThetaMethod::symmetrize;
  SuperpositionKind kind = SuperpositionKind::Phi;
  std::vector<cplx> coeffs;
  std::vector<CVector> phis;
};

struct Tolerances {
  double hartree = 1e-10;
  double krylov = 1e-10;
  double weyl_loss = 1e-6;
};

struct OutputConfig {
  std::string dir = ".";
  std::string stem = "run";
  bool record_timing = false;
};

struct ExperimentConfig {
  ModeSystemConfig mode_system;
  StateConfig state;
  std::vector<int> n_list;
  std::vector<double> t_list;
  Tolerances tolerances;
  PropagatorOptions propagator;
  std::uint64_t seed = 0;
  OutputConfig output;
};

// Strict parser: unknown keys, wrong types and violated invariants raise
// ConfigError. One-particle vectors are normalized on load.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical form; parse_config(config_json(c)) reproduces c.
Json config_json(const ExperimentConfig& c);
// 16 hex digits of FNV-1a over the canonical JSON text.
std::string config_hash(const ExperimentConfig& c);

// Cross-field invariants (m schedule admissibility, component counts, ...).
// parse_config calls it; callers that edit a config afterwards should too.
void validate(const ExperimentConfig& c);

}  // namespace mflab::harness
