#pragma once

#include <iosfwd>
#include <vector>

#include "mflab/mode_system.hpp"

namespace mflab {

// -i[(h phi)_p + (sum_q v(p,q)|phi_q|^2) phi_p]
CVector hartree_rhs(const ModeSystem& ms, const CVector& phi);
// <phi, h phi> + 1/2 sum_pq v(p,q)|phi_p|^2 |phi_q|^2
double hartree_energy(const ModeSystem& ms, const CVector& phi);

struct HartreeOptions {
  double tol = 1e-10;             // local error per unit time
  double max_norm_drift = 1e-8;
  double max_energy_drift = 1e-6;
  double min_step = 1e-12;
  long max_steps = 50'000'000;
};

// Solution of the mean-field equation sampled on a requested grid, with a
// continuous extension of the integrator for any time inside the covered
// window. Time is dimensionless with hbar = 1.
class HartreeTrajectory {
 public:
  struct Segment {
    double t0;
    double h;  // signed
    // order-4 continuous extension: y(t0 + s h) for s in [0, 1]
    CVector y0, r2, r3, r4, r5;
  };

  const std::vector<double>& times() const { return times_; }
  const std::vector<CVector>& states() const { return states_; }
  const std::vector<double>& norm_log() const { return norm_log_; }
  const std::vector<double>& energy_log() const { return energy_log_; }
  // <phi_t, (1 + h) phi_t>, the discrete stand-in for the H^1 norm
  const std::vector<double>& kinetic_log() const { return kinetic_log_; }
  std::size_t steps() const { return segments_.size(); }

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  bool covers(double t) const { return t >= t_min_ && t <= t_max_; }
  CVector at(double t) const;

  double max_norm_drift() const;
  double max_energy_drift() const;

  // t, Re/Im phi_p for each mode, norm, energy
  void write_csv(std::ostream& os) const;

 private:
  friend HartreeTrajectory evolve_hartree(const ModeSystem&, const CVector&, const std::vector<double>&,
                                          const HartreeOptions&);
  std::vector<double> times_;
  std::vector<CVector> states_;
  std::vector<double> norm_log_, energy_log_, kinetic_log_;
  std::vector<Segment> segments_;  // sorted by covered interval
  CVector phi0_;
  double energy0_ = 0.0;
  double t_min_ = 0.0, t_max_ = 0.0;
};

// Integrates from phi0 at t = 0 to every time in t_grid (either sign) with an
// adaptive Dormand-Prince 5(4) pair. Throws IntegrationError on step-size
// collapse or when norm/energy drift beyond the configured limits.
HartreeTrajectory evolve_hartree(const ModeSystem& ms, const CVector& phi0, const std::vector<double>& t_grid,
                                 const HartreeOptions& options = {});
HartreeTrajectory evolve_hartree(const ModeSystem& ms, const CVector& phi0, const std::vector<double>& t_grid,
                                 double tol);

}  // namespace mflab
