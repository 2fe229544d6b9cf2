#include "mflab/harness/invariants.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "mflab/combinatorics.hpp"
#include "mflab/dynamics.hpp"
#include "mflab/error.hpp"
#include "mflab/hartree.hpp"
#include "mflab/numfmt.hpp"
#include "mflab/rdm.hpp"
#include "mflab/states.hpp"

namespace mflab::harness {

namespace {

using Clock = std::chrono::steady_clock;
using Rng = std::mt19937_64;

class Tally {
 public:
  explicit Tally(std::string name) : start_(Clock::now()) { r_.name = std::move(name); }

  // value <= limit
  void le(double value, double limit, const std::string& what) {
    record(limit > 0.0 ? value / limit : (value <= 0.0 ? 0.0 : inf()), !(value <= limit), what, value, limit);
  }
  // value < limit
  void lt(double value, double limit, const std::string& what) {
    record(limit > 0.0 ? value / limit : inf(), !(value < limit), what, value, limit);
  }
  void expect(bool ok, const std::string& what) { record(ok ? 0.0 : inf(), !ok, what, ok ? 0.0 : 1.0, 0.0); }

  // Library errors inside a check count as a failure of that check.
  template <class F>
  void guard(const std::string& what, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      record(inf(), true, what + " threw: " + e.what(), 0.0, 0.0);
    }
  }

  SuiteResult finish() {
    r_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return r_;
  }

 private:
  static double inf() { return std::numeric_limits<double>::infinity(); }

  void record(double ratio, bool failed, const std::string& what, double value, double limit) {
    ++r_.checks;
    if (std::isnan(ratio)) ratio = inf();
    r_.worst_ratio = std::max(r_.worst_ratio, ratio);
    if (!failed) return;
    ++r_.failures;
    if (r_.first_failure.empty()) r_.first_failure = what + " (" + shortest(value) + " vs " + shortest(limit) + ")";
  }

  SuiteResult r_;
  Clock::time_point start_;
};

CVector random_unit(int d, Rng& rng) {
  std::normal_distribution<double> g;
  CVector v(d);
  for (auto& z : v) z = cplx(g(rng), g(rng));
  return v.normalized();
}

// Random unit state supported on sectors <= top.
FockVector random_state(const BasisPtr& b, int top, Rng& rng) {
  std::normal_distribution<double> g;
  FockVector v(b);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (b->total(i) <= top) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

CMatrix random_hermitian(int d, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix h(d, d);
  for (auto& z : h.reshaped()) z = cplx(g(rng), g(rng));
  return 0.5 * (h + h.adjoint());
}

ModeSystem random_system(int d, Rng& rng) {
  std::normal_distribution<double> g;
  RMatrix v(d, d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q <= p; ++q) v(p, q) = v(q, p) = g(rng);
  return ModeSystem::dense(random_hermitian(d, rng), v);
}

CMatrix random_density(int d, int rank, Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  CMatrix rho = CMatrix::Zero(d, d);
  double total = 0.0;
  for (int r = 0; r < rank; ++r) {
    const double w = u(rng);
    total += w;
    rho += w * projector(random_unit(d, rng));
  }
  return rho / total;
}

FockVector weighted_by_total(const FockVector& v, double (*weight)(int)) {
  FockVector out = v;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] *= weight(v.basis().total(i));
  return out;
}

double max_abs(const FockVector& v) { return v.size() ? v.coeffs().cwiseAbs().maxCoeff() : 0.0; }

ExcitationState excitation_for(const CVector& phi, int m, std::uint64_t seed) {
  return random_excitation(phi, m, seed);
}

}  // namespace

SuiteLevel parse_level(const std::string& s) {
  if (s == "quick") return SuiteLevel::quick;
  if (s == "full") return SuiteLevel::full;
  throw ConfigError("unknown check level '" + s + "' (quick or full)");
}

SuiteResult algebra_suite(const AlgebraParams& p) {
  Tally tally("algebra");
  Rng rng(p.seed);
  struct Ops {
    BasisPtr basis;
    std::vector<SparseOperator> lower, raise;
  };
  std::vector<Ops> ops;
  for (int d = 1; d <= p.max_modes; ++d) {
    Ops o{shared_basis(d, Sector::truncated(p.cutoff)), {}, {}};
    for (int q = 0; q < d; ++q) {
      o.lower.push_back(ladder_matrix(Ladder::annihilate, q, o.basis, p.coefficient));
      o.raise.push_back(ladder_matrix(Ladder::create, q, o.basis, p.coefficient));
    }
    ops.push_back(std::move(o));
  }
  const double tol = p.tol;

  for (int s = 0; s < p.states; ++s) {
    const int d = 1 + s % p.max_modes;
    const auto& o = ops[static_cast<std::size_t>(d - 1)];
    // Commutators need one free sector above the state; the two-creation
    // bound needs two.
    const auto v = random_state(o.basis, p.cutoff - 2, rng);
    const auto u = random_state(o.basis, p.cutoff, rng);

    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        auto ccr = o.lower[a].apply(o.raise[b].apply(v)) - o.raise[b].apply(o.lower[a].apply(v));
        if (a == b) ccr -= v;
        tally.le(max_abs(ccr), tol, "[a_p, a+_q] = delta_pq");
        tally.le(max_abs(o.lower[a].apply(o.lower[b].apply(v)) - o.lower[b].apply(o.lower[a].apply(v))), tol,
                 "[a_p, a_q] = 0");
        tally.le(max_abs(o.raise[a].apply(o.raise[b].apply(v)) - o.raise[b].apply(o.raise[a].apply(v))), tol,
                 "[a+_p, a+_q] = 0");
      }
      tally.le(std::abs(u.dot(o.raise[a].apply(v)) - o.lower[a].apply(u).dot(v)), tol, "<u, a+ v> = <a u, v>");
    }

    tally.le(max_abs(second_quantize(CMatrix::Identity(d, d), o.basis).apply(v) - number_operator(o.basis).apply(v)),
             tol, "dGamma(1) = N");
    const CMatrix herm = random_hermitian(d, rng);
    FockVector built(o.basis);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) built.axpy(herm(a, b), o.raise[a].apply(o.lower[b].apply(v)));
    tally.le(max_abs(second_quantize(herm, o.basis).apply(v) - built), tol * (1 + herm.norm()),
             "dGamma(A) = sum A_pq a+_p a_q");

    // One-ladder bounds against N^{1/2} and (N+1)^{1/2}.
    const CVector f = 2.0 * random_unit(d, rng);
    FockVector af(o.basis), cf(o.basis);
    for (int a = 0; a < d; ++a) {
      af.axpy(f[a], o.lower[a].apply(v));
      cf.axpy(f[a], o.raise[a].apply(v));
    }
    const double n_half = weighted_by_total(v, [](int k) { return std::sqrt(double(k)); }).norm();
    const double np1_half = weighted_by_total(v, [](int k) { return std::sqrt(k + 1.0); }).norm();
    tally.le(af.norm(), f.norm() * n_half * (1 + tol) + tol, "||a(f) v|| <= ||f|| ||N^1/2 v||");
    tally.le(cf.norm(), f.norm() * np1_half * (1 + tol) + tol, "||a*(f) v|| <= ||f|| ||(N+1)^1/2 v||");

    // Two-ladder bounds with a random kernel K and its Hilbert-Schmidt norm.
    CMatrix kern(d, d);
    for (auto& z : kern.reshaped()) z = cplx(std::normal_distribution<double>()(rng), 0.0);
    const double kn = kern.norm();
    FockVector aa(o.basis), ca(o.basis), cc(o.basis);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        aa.axpy(kern(a, b), o.lower[a].apply(o.lower[b].apply(v)));
        ca.axpy(kern(a, b), o.raise[a].apply(o.lower[b].apply(v)));
        cc.axpy(kern(a, b), o.raise[a].apply(o.raise[b].apply(v)));
      }
    const double np1 = weighted_by_total(v, [](int k) { return k + 1.0; }).norm();
    const double nn = weighted_by_total(v, [](int k) { return double(k); }).norm();
    const double sharp = weighted_by_total(v, [](int k) { return std::sqrt((k + 1.0) * (k + 2.0)); }).norm();
    tally.le(aa.norm(), kn * np1 * (1 + tol) + tol, "||sum K a a v|| <= ||K|| ||(N+1) v||");
    tally.le(ca.norm(), kn * nn * (1 + tol) + tol, "||sum K a* a v|| <= ||K|| ||N v||");
    tally.le(cc.norm(), kn * sharp * (1 + tol) + tol, "||sum K a* a* v|| <= ||K|| ||((N+1)(N+2))^1/2 v||");
  }
  return tally.finish();
}

SuiteResult weyl_suite(const WeylParams& p) {
  Tally tally("weyl");
  Rng rng(p.seed);
  const double radii[] = {0.5, 1.0, 1.5, 2.0};
  for (int trial = 0; trial < p.trials; ++trial) {
    const int d = 1 + trial % p.max_modes;
    const CVector alpha = radii[trial % 4] * random_unit(d, rng);
    const CVector beta = 0.7 * random_unit(d, rng);
    const int cutoff = weyl_headroom(alpha.norm() + beta.norm()) + 4;
    const auto basis = shared_basis(d, Sector::truncated(cutoff));
    const auto v = random_state(basis, 3, rng);
    tally.guard("weyl trial", [&] {
      const auto fwd = weyl_apply(alpha, v);
      tally.le(fwd.truncation_loss, p.loss_limit, "truncation loss under the headroom rule");
      tally.le(std::abs(fwd.state.norm2() - 1.0), std::abs(fwd.truncation_loss) + 1e-12, "norm kept up to the loss");
      const CVector minus = -alpha;
      const auto back = weyl_apply(minus, fwd.state);
      const double slack = 2.0 * (std::sqrt(std::abs(fwd.truncation_loss)) + std::sqrt(std::abs(back.truncation_loss)));
      tally.le((back.state - v).norm(), slack + 1e-9, "C(-a) C(a) = 1");

      const auto cb = weyl_apply(beta, v);
      const auto ab = weyl_apply(alpha, cb.state);
      const CVector sum = alpha + beta;
      auto joint = weyl_apply(sum, v);
      joint.state *= std::polar(1.0, -alpha.dot(beta).imag());
      const double comp_slack =
          2.0 * (std::sqrt(std::abs(cb.truncation_loss)) + std::sqrt(std::abs(ab.truncation_loss)) +
                 std::sqrt(std::abs(joint.truncation_loss)));
      tally.le((ab.state - joint.state).norm(), comp_slack + 1e-9, "C(a) C(b) = e^{-i Im<a,b>} C(a+b)");

      const double amp = std::sqrt(cutoff + 1.0);
      for (int q = 0; q < d; ++q) {
        const auto lowered = ladder_apply(Ladder::annihilate, q, fwd.state);
        const auto shifted = weyl_apply(minus, lowered);
        auto expect = ladder_apply(Ladder::annihilate, q, v);
        expect.axpy(alpha[q], v);
        const double s = amp * slack + 2.0 * std::sqrt(std::abs(shifted.truncation_loss));
        tally.le((shifted.state - expect).norm(), s + 1e-9, "C(a)* a_p C(a) = a_p + a_p(alpha)");
      }
    });
  }
  return tally.finish();
}

SuiteResult theta_suite(const ThetaParams& p) {
  Tally tally("theta_constructions");
  Rng rng(p.seed);
  std::uint64_t seed = p.seed * 1000;
  for (int d : p.modes) {
    for (int n = 2; n <= p.n_max; ++n) {
      for (int m = 0; m <= std::min(p.m_max, n); ++m) {
        const CVector phi = random_unit(d, rng);
        const auto basis = shared_basis(d, Sector::fixed(n));
        tally.guard("theta", [&] {
          const auto ex = excitation_for(phi, m, ++seed);
          const auto s = theta_state(phi, ex, n, ThetaMethod::symmetrize, basis);
          const auto c = theta_state(phi, ex, n, ThetaMethod::creation_polynomial, basis);
          const auto w = theta_state(phi, ex, n, ThetaMethod::weyl_projection, basis);
          tally.le(max_abs(s - c), p.tol, "symmetrize vs creation polynomial");
          tally.le(max_abs(s - w), p.tol, "symmetrize vs Weyl projection");
          tally.le(max_abs(c - w), p.tol, "creation polynomial vs Weyl projection");
          tally.le(std::abs(s.norm() - 1.0), p.tol, "unit norm");
        });
      }
      // phi^n = d_{n,0} P_n C(sqrt(n) phi) vacuum, built directly.
      const CVector phi = random_unit(d, rng);
      const auto trunc = shared_basis(d, Sector::truncated(n));
      const CVector alpha = std::sqrt(static_cast<double>(n)) * phi;
      auto projected = extract_sector(weyl_apply(alpha, FockVector::vacuum(trunc)).state, n);
      projected *= cplx(std::exp(log_dnm(n, 0)));
      tally.le(max_abs(projected - product_state(phi, n, shared_basis(d, Sector::fixed(n)))), p.tol,
               "phi^n = d_{n,0} P_n C(sqrt(n) phi) vacuum");
    }
  }
  return tally.finish();
}

SuiteResult coefficient_suite(const CoefficientParams& p) {
  Tally tally("theta_coefficients");
  Rng rng(p.seed);
  const auto big = shared_basis(p.modes, Sector::truncated(p.cutoff));
  for (auto [n, m] : p.cases) {
    const auto closed = theta_weyl_coefficients(n, m);
    std::vector<std::vector<double>> runs;
    for (int draw = 0; draw < 2; ++draw) {
      const CVector phi = random_unit(p.modes, rng);
      const auto ex = excitation_for(phi, m, p.seed * 100 + static_cast<std::uint64_t>(draw));
      const auto theta = theta_state(phi, ex, n, ThetaMethod::creation_polynomial, big);
      const CVector back = -std::sqrt(static_cast<double>(n)) * phi;
      const auto w = weyl_apply(back, theta).state.sector_weights();
      std::vector<double> norms;
      for (int k = 0; k <= n - m; ++k) {
        norms.push_back(std::sqrt(w[static_cast<std::size_t>(k + m)]));
        tally.le(std::abs(norms.back() - closed.a[static_cast<std::size_t>(k)]), p.tol, "A_k closed form");
      }
      runs.push_back(std::move(norms));
    }
    for (std::size_t k = 0; k < runs[0].size(); ++k)
      tally.le(std::abs(runs[0][k] - runs[1][k]), p.invariance_tol, "A_k independent of (phi, psi)");
  }
  return tally.finish();
}

SuiteResult krasikov_suite(const KrasikovParams& p) {
  Tally tally("krasikov");
  Rng rng(p.seed);
  std::uniform_int_distribution<int> kd(2, 40);
  std::uniform_real_distribution<double> ad(-0.99, 30.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < p.points; ++i) {
    const int k = kd(rng);
    const double alpha = ad(rng);
    const double a = std::sqrt(k + alpha + 1.0), b = std::sqrt(static_cast<double>(k));
    const double q2 = (a - b) * (a - b), s2 = (a + b) * (a + b);
    const double x = q2 + (s2 - q2) * (0.001 + 0.998 * u(rng));
    const auto kb = krasikov_bound(k, alpha, x);
    tally.expect(kb.valid, "point inside the window");
    tally.lt(std::abs(laguerre(k, alpha, x)), kb.bound, "|L_k^a(x)| below the envelope");
  }
  return tally.finish();
}

SuiteResult moment_suite(const MomentParams& p) {
  Tally tally("weighted_moment");
  for (int n : p.n_values) {
    for (int m = 0; m <= admissible_m(n); ++m) {
      tally.guard("moment", [&] {
        const auto r = weighted_number_moment(n, m, p.delta);
        tally.le(r.lhs, r.rhs, "lhs <= rhs at n = " + std::to_string(n) + ", m = " + std::to_string(m));
      });
    }
  }
  // rhs d_{n,m}^2 e^{-m} stays bounded as n grows.
  const int m_top = std::min(3, admissible_m(p.scaling_n.front()));
  for (int m = 1; m <= m_top; ++m) {
    std::vector<double> scaled;
    for (int n : p.scaling_n) {
      const auto r = weighted_number_moment(n, m, p.delta);
      tally.le(r.lhs, r.rhs, "lhs <= rhs at large n");
      scaled.push_back(r.rhs * std::exp(2.0 * log_dnm(n, m) - m));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    tally.le(*hi, p.spread_limit * *lo, "rhs d^2 e^{-m} bounded in n");
  }
  return tally.finish();
}

SuiteResult conservation_suite(const ConservationParams& p) {
  Tally tally("hartree_conservation");
  Rng rng(p.seed);
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(p.t_max * i / 20.0);
  for (int s = 0; s < p.systems; ++s) {
    const int d = 2 + s % 3;
    const auto ms = random_system(d, rng);
    const CVector phi = random_unit(d, rng);
    tally.guard("random system", [&] {
      HartreeOptions o;
      o.max_norm_drift = 1.0;  // measured below rather than enforced
      o.max_energy_drift = 1e6;
      const auto tr = evolve_hartree(ms, phi, grid, o);
      tally.le(tr.max_norm_drift(), p.norm_tol, "norm drift");
      tally.le(tr.max_energy_drift(), p.energy_tol, "energy drift");
    });
  }

  Eigen::VectorXd e(3);
  e << 0.3, -1.2, 2.5;
  const auto free = ModeSystem::dense(e.cast<cplx>().asDiagonal(), RMatrix::Zero(3, 3));
  const CVector phi = random_unit(3, rng);
  const auto tr = evolve_hartree(free, phi, grid);
  for (std::size_t i = 0; i < tr.times().size(); ++i)
    for (int q = 0; q < 3; ++q)
      tally.le(std::abs(tr.states()[i][q] - std::polar(1.0, -e[q] * tr.times()[i]) * phi[q]), p.exact_tol,
               "free evolution phases");

  RMatrix g(1, 1);
  g(0, 0) = 1.3;
  CVector one(1);
  one << 1.0;
  const auto single = evolve_hartree(ModeSystem::dense(CMatrix::Zero(1, 1), g), one, grid);
  for (std::size_t i = 0; i < single.times().size(); ++i)
    tally.le(std::abs(single.states()[i][0] - std::polar(1.0, -1.3 * single.times()[i])), p.exact_tol,
             "single-mode phase");
  return tally.finish();
}

SuiteResult propagator_suite(const PropagatorParams& p) {
  Tally tally("propagator");
  Rng rng(p.seed);
  for (int s = 0; s < p.systems; ++s) {
    const int d = 2 + s % 2;
    const auto ms = random_system(d, rng);
    const auto basis = shared_basis(d, Sector::truncated(p.cutoff));
    const auto h = build_hamiltonian(ms, p.cutoff, basis);
    const auto v = random_state(basis, p.cutoff, rng);
    PropagatorOptions dense_o, krylov_o;
    dense_o.method = PropagatorMethod::dense_eig;
    krylov_o.method = PropagatorMethod::krylov;
    const PropagatorPlan dense(h, dense_o), krylov(h, krylov_o);
    const auto w0 = v.sector_weights();
    for (double t : {0.5, -1.5, 3.0}) {
      tally.guard("evolve", [&] {
        const auto a = dense.evolve(v, t);
        const auto b = krylov.evolve(v, t);
        tally.le((a - b).norm(), p.tol, "dense and Krylov agree");
        tally.le(std::abs(a.norm() - 1.0), 1e-9, "unitary");
        const auto w = a.sector_weights();
        for (std::size_t k = 0; k < w.size(); ++k) tally.le(std::abs(w[k] - w0[k]), 1e-9, "sector weights kept");
      });
    }
  }
  return tally.finish();
}

SuiteResult norm_ordering_suite(const NormOrderingParams& p) {
  Tally tally("norm_ordering");
  Rng rng(p.seed);
  for (int i = 0; i < p.pairs; ++i) {
    const int d = 2 + i % 4;
    const bool rank_one = i % 2 == 1;
    const auto a = random_density(d, 1 + i % 3, rng);
    const auto b = rank_one ? projector(random_unit(d, rng)) : random_density(d, 2, rng);
    tally.guard("distances", [&] {
      const auto r = distances(a, b);
      tally.le(r.op, r.hilbert_schmidt + 1e-14, "op <= HS");
      tally.le(r.hilbert_schmidt, r.trace + 1e-14, "HS <= trace");
      if (rank_one) tally.le(r.trace, 2.0 * r.hilbert_schmidt + 1e-12, "trace <= 2 HS against a projector");
    });
  }
  return tally.finish();
}

bool InvariantReport::passed() const {
  return !suites.empty() && std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.passed(); });
}

Json InvariantReport::to_json() const {
  Json arr = Json::array();
  for (const auto& s : suites)
    arr.push_back({{"name", s.name},
                   {"passed", s.passed()},
                   {"checks", s.checks},
                   {"failures", s.failures},
                   {"worst_ratio", std::isfinite(s.worst_ratio) ? Json(s.worst_ratio) : Json("inf")},
                   {"seconds", s.seconds},
                   {"first_failure", s.first_failure}});
  return {{"level", level == SuiteLevel::quick ? "quick" : "full"}, {"passed", passed()}, {"suites", arr}};
}

InvariantReport run_invariant_suite(SuiteLevel level, const InvariantOptions& options) {
  const bool full = level == SuiteLevel::full;
  const auto s = options.seed;
  InvariantReport report;
  report.level = level;

  AlgebraParams alg;
  alg.coefficient = options.coefficient;
  alg.seed += s;
  alg.states = full ? 400 : 100;
  report.suites.push_back(algebra_suite(alg));

  WeylParams weyl;
  weyl.seed += s;
  weyl.trials = full ? 48 : 12;
  report.suites.push_back(weyl_suite(weyl));

  ThetaParams theta;
  theta.seed += s;
  if (full) theta.modes = {2, 3, 4};
  else theta.n_max = 6;
  report.suites.push_back(theta_suite(theta));

  CoefficientParams coeff;
  coeff.seed += s;
  if (!full) coeff.cases = {{6, 1}, {6, 2}};
  report.suites.push_back(coefficient_suite(coeff));

  KrasikovParams kras;
  kras.seed += s;
  kras.points = full ? 5000 : 500;
  report.suites.push_back(krasikov_suite(kras));

  MomentParams moment;
  if (full) moment.n_values = {10, 30, 100, 300, 1000};
  else moment.n_values = {10, 30, 100};
  report.suites.push_back(moment_suite(moment));

  ConservationParams cons;
  cons.seed += s;
  cons.systems = full ? 20 : 5;
  report.suites.push_back(conservation_suite(cons));

  PropagatorParams prop;
  prop.seed += s;
  prop.systems = full ? 8 : 2;
  report.suites.push_back(propagator_suite(prop));

  NormOrderingParams norms;
  norms.seed += s;
  norms.pairs = full ? 2000 : 200;
  report.suites.push_back(norm_ordering_suite(norms));
  return report;
}

}  // namespace mflab::harness
