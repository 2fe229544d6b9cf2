#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mflab/fock_ops.hpp"
#include "mflab/json_dump.hpp"

namespace mflab::harness {

enum class SuiteLevel { quick, full };
SuiteLevel parse_level(const std::string& s);

// Each check contributes value / limit; the suite passes when the worst ratio
// stays at or below one.
struct SuiteResult {
  std::string name;
  long checks = 0;
  long failures = 0;
  double worst_ratio = 0.0;
  double seconds = 0.0;
  std::string first_failure;

  bool passed() const { return failures == 0 && checks > 0; }
};

struct InvariantReport {
  SuiteLevel level = SuiteLevel::quick;
  std::vector<SuiteResult> suites;

  bool passed() const;
  Json to_json() const;
};

struct AlgebraParams {
  int states = 100;
  int max_modes = 4;
  int cutoff = 5;
  double tol = 1e-10;
  LadderCoefficient coefficient = bosonic_coefficient;
  std::uint64_t seed = 1;
};
struct WeylParams {
  int trials = 12;
  int max_modes = 3;
  double loss_limit = 1e-6;
  std::uint64_t seed = 2;
};
struct ThetaParams {
  int n_max = 8;
  int m_max = 3;
  std::vector<int> modes{2, 3};
  double tol = 1e-8;
  std::uint64_t seed = 3;
};
struct CoefficientParams {
  std::vector<std::pair<int, int>> cases{{6, 1}, {6, 2}, {8, 1}};
  int modes = 3;
  int cutoff = 48;
  double tol = 1e-7;
  double invariance_tol = 1e-10;
  std::uint64_t seed = 4;
};
struct KrasikovParams {
  int points = 500;
  std::uint64_t seed = 5;
};
struct MomentParams {
  std::vector<int> n_values{10, 30, 100, 300};
  std::vector<int> scaling_n{200, 800, 3200};
  double delta = 0.5;
  double spread_limit = 1.5;
};
struct ConservationParams {
  int systems = 20;
  double t_max = 2.0;
  double norm_tol = 1e-8;
  double energy_tol = 1e-6;
  double exact_tol = 1e-9;
  std::uint64_t seed = 6;
};
struct PropagatorParams {
  int systems = 4;
  int cutoff = 6;
  double tol = 1e-8;
  std::uint64_t seed = 7;
};
struct NormOrderingParams {
  int pairs = 200;
  std::uint64_t seed = 8;
};

// CCR, adjointness, dGamma(1) = N and the ladder operator norm bounds.
SuiteResult algebra_suite(const AlgebraParams& p);
// Unitarity, composition with its phase and the shift property.
SuiteResult weyl_suite(const WeylParams& p);
// Pairwise agreement of the three theta constructions and the m = 0 identity
// phi^n = d_{n,0} P_n C(sqrt(n) phi) vacuum.
SuiteResult theta_suite(const ThetaParams& p);
// Closed-form A_k against sector norms of the displaced-back theta state.
SuiteResult coefficient_suite(const CoefficientParams& p);
SuiteResult krasikov_suite(const KrasikovParams& p);
SuiteResult moment_suite(const MomentParams& p);
// Hartree norm/energy drift on random systems plus the solvable cases.
SuiteResult conservation_suite(const ConservationParams& p);
// Unitarity, sector conservation and dense/Krylov agreement.
SuiteResult propagator_suite(const PropagatorParams& p);
SuiteResult norm_ordering_suite(const NormOrderingParams& p);

struct InvariantOptions {
  LadderCoefficient coefficient = bosonic_coefficient;
  std::uint64_t seed = 0;  // added to every suite's own seed
};
InvariantReport run_invariant_suite(SuiteLevel level, const InvariantOptions& options = {});

}  // namespace mflab::harness
