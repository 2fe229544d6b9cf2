#include "mflab/hartree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "mflab/error.hpp"
#include "mflab/numfmt.hpp"

namespace mflab {

CVector hartree_rhs(const ModeSystem& ms, const CVector& phi) {
  if (phi.size() != ms.modes()) throw ContractError("hartree_rhs: state length != mode count");
  const Eigen::VectorXd density = phi.cwiseAbs2();
  const Eigen::VectorXd mean_field = ms.pair() * density;
  CVector out = ms.one_body() * phi;
  out += (mean_field.cast<cplx>().array() * phi.array()).matrix();
  return cplx(0.0, -1.0) * out;
}

double hartree_energy(const ModeSystem& ms, const CVector& phi) {
  if (phi.size() != ms.modes()) throw ContractError("hartree_energy: state length != mode count");
  const Eigen::VectorXd density = phi.cwiseAbs2();
  return phi.dot(ms.one_body() * phi).real() + 0.5 * density.dot(ms.pair() * density);
}

namespace {

// Dormand-Prince 5(4) tableau and its order-4 continuous extension.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Stepper {
  const ModeSystem& ms;
  CVector k1, k2, k3, k4, k5, k6, k7;

  // One trial step from (y, k1 = f(y)). Returns the proposed y1, the error
  // estimate (max norm) and fills k2..k7; k7 = f(y1).
  CVector trial(const CVector& y, double h, double& err) {
    k2 = hartree_rhs(ms, y + h * (a21 * k1));
    k3 = hartree_rhs(ms, y + h * (a31 * k1 + a32 * k2));
    k4 = hartree_rhs(ms, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = hartree_rhs(ms, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = hartree_rhs(ms, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    CVector y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = hartree_rhs(ms, y1);
    const CVector est = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    err = est.cwiseAbs().maxCoeff();
    return y1;
  }

  HartreeTrajectory::Segment segment(double t0, double h, const CVector& y0, const CVector& y1) const {
    HartreeTrajectory::Segment s{t0, h, y0, {}, {}, {}, {}};
    s.r2 = y1 - y0;
    s.r3 = h * k1 - s.r2;
    s.r4 = s.r2 - h * k7 - s.r3;
    s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    return s;
  }
};

// Integrate from 0 towards the targets (all of one sign, sorted by |t|),
// recording segments and exact samples at each target.
void integrate_branch(const ModeSystem& ms, const CVector& phi0, const std::vector<double>& targets,
                      const HartreeOptions& opt, std::vector<HartreeTrajectory::Segment>& segments,
                      std::vector<std::pair<double, CVector>>& samples) {
  if (targets.empty()) return;
  const double dir = targets.back() < 0 ? -1.0 : 1.0;
  Stepper st{ms, {}, {}, {}, {}, {}, {}, {}};
  CVector y = phi0;
  double t = 0.0;
  double h = dir * std::min(1e-2, std::abs(targets.back()));
  st.k1 = hartree_rhs(ms, y);
  long steps = 0;
  for (double target : targets) {
    while (t != target) {
      if (++steps > opt.max_steps) throw IntegrationError("evolve_hartree: step budget exhausted at t = " + std::to_string(t));
      bool last = false;
      if (std::abs(h) >= std::abs(target - t)) {
        h = target - t;
        last = true;
      }
      double err = 0.0;
      CVector y1 = st.trial(y, h, err);
      const double per_unit = err / std::abs(h);
      if (per_unit <= opt.tol) {
        segments.push_back(st.segment(t, h, y, y1));
        t = last ? target : t + h;
        y = std::move(y1);
        st.k1 = st.k7;
        const double grow = per_unit == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(opt.tol / per_unit, 0.25), 0.2, 5.0);
        if (!last) h *= grow;
      } else {
        if (!std::isfinite(per_unit)) {
          h *= 0.2;
        } else {
          h *= std::clamp(0.9 * std::pow(opt.tol / per_unit, 0.25), 0.1, 0.9);
        }
      }
      if (std::abs(h) < opt.min_step * std::max(1.0, std::abs(t)))
        throw IntegrationError("evolve_hartree: step size collapsed to " + std::to_string(h) + " at t = " +
                               std::to_string(t));
    }
    samples.emplace_back(target, y);
  }
}

}  // namespace

HartreeTrajectory evolve_hartree(const ModeSystem& ms, const CVector& phi0, const std::vector<double>& t_grid,
                                 const HartreeOptions& options) {
  if (phi0.size() != ms.modes()) throw ContractError("evolve_hartree: state length != mode count");
  if (std::abs(phi0.norm() - 1.0) > 1e-10) throw ContractError("evolve_hartree: initial state must have unit norm");
  if (!(options.tol > 0.0)) throw ContractError("evolve_hartree: tolerance must be positive");
  for (double t : t_grid)
    if (!std::isfinite(t)) throw ContractError("evolve_hartree: non-finite time");

  std::vector<double> fwd, bwd;
  for (double t : t_grid) (t >= 0 ? fwd : bwd).push_back(t);
  std::sort(fwd.begin(), fwd.end());
  std::sort(bwd.begin(), bwd.end(), std::greater<>());
  fwd.erase(std::unique(fwd.begin(), fwd.end()), fwd.end());
  bwd.erase(std::unique(bwd.begin(), bwd.end()), bwd.end());

  std::vector<HartreeTrajectory::Segment> seg_f, seg_b;
  std::vector<std::pair<double, CVector>> samp_f, samp_b;
  integrate_branch(ms, phi0, fwd, options, seg_f, samp_f);
  integrate_branch(ms, phi0, bwd, options, seg_b, samp_b);

  HartreeTrajectory tr;
  tr.phi0_ = phi0;
  tr.energy0_ = hartree_energy(ms, phi0);
  tr.segments_.assign(seg_b.rbegin(), seg_b.rend());
  tr.segments_.insert(tr.segments_.end(), seg_f.begin(), seg_f.end());
  tr.t_min_ = bwd.empty() ? 0.0 : bwd.back();
  tr.t_max_ = fwd.empty() ? 0.0 : fwd.back();

  std::vector<std::pair<double, CVector>> samples(samp_b.rbegin(), samp_b.rend());
  samples.insert(samples.end(), samp_f.begin(), samp_f.end());
  const double norm0 = phi0.norm();
  const double e0 = hartree_energy(ms, phi0);
  for (auto& [t, phi] : samples) {
    tr.times_.push_back(t);
    tr.norm_log_.push_back(phi.norm());
    tr.energy_log_.push_back(hartree_energy(ms, phi));
    tr.kinetic_log_.push_back(phi.squaredNorm() + phi.dot(ms.one_body() * phi).real());
    tr.states_.push_back(std::move(phi));
    const double nd = std::abs(tr.norm_log_.back() - norm0);
    const double ed = std::abs(tr.energy_log_.back() - e0);
    if (nd > options.max_norm_drift)
      throw IntegrationError("evolve_hartree: norm drift " + shortest(nd) + " at t = " + shortest(t));
    if (ed > options.max_energy_drift)
      throw IntegrationError("evolve_hartree: energy drift " + shortest(ed) + " at t = " + shortest(t));
  }
  return tr;
}

HartreeTrajectory evolve_hartree(const ModeSystem& ms, const CVector& phi0, const std::vector<double>& t_grid,
                                 double tol) {
  HartreeOptions o;
  o.tol = tol;
  return evolve_hartree(ms, phi0, t_grid, o);
}

CVector HartreeTrajectory::at(double t) const {
  if (!covers(t))
    throw ContractError("HartreeTrajectory::at: t = " + std::to_string(t) + " outside [" + std::to_string(t_min_) +
                        ", " + std::to_string(t_max_) + "]");
  if (t == 0.0 || segments_.empty()) return phi0_;
  // first segment whose upper end reaches t
  auto upper = [](const Segment& s) { return std::max(s.t0, s.t0 + s.h); };
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                             [&](const Segment& s, double v) { return upper(s) < v; });
  if (it == segments_.end()) it = std::prev(segments_.end());
  const Segment& s = *it;
  const double th = (t - s.t0) / s.h;
  const double th1 = 1.0 - th;
  return s.y0 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
}

double HartreeTrajectory::max_norm_drift() const {
  double w = 0.0;
  const double n0 = phi0_.norm();
  for (double n : norm_log_) w = std::max(w, std::abs(n - n0));
  return w;
}

double HartreeTrajectory::max_energy_drift() const {
  double w = 0.0;
  for (double e : energy_log_) w = std::max(w, std::abs(e - energy0_));
  return w;
}

void HartreeTrajectory::write_csv(std::ostream& os) const {
  const auto d = phi0_.size();
  os << "t";
  for (Eigen::Index p = 0; p < d; ++p) os << ",re_phi" << p << ",im_phi" << p;
  os << ",norm,energy\n";
  for (std::size_t i = 0; i < times_.size(); ++i) {
    os << shortest(times_[i]);
    for (Eigen::Index p = 0; p < d; ++p) os << ',' << shortest(states_[i][p].real()) << ',' << shortest(states_[i][p].imag());
    os << ',' << shortest(norm_log_[i]) << ',' << shortest(energy_log_[i]) << '\n';
  }
}

}  // namespace mflab
