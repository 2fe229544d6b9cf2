#include "mflab/harness/sweep.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"
#include "mflab/harness/fit.hpp"
#include "mflab/rdm.hpp"
#include "mflab/version.hpp"

namespace mflab::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
// owns its output slot, so results are independent of scheduling; the first
// failure by index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(count, 1))));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Excitation seeds depend on (seed, component, m) only, so the same psi_m is
// used at every n that shares an m.
std::uint64_t excitation_seed(std::uint64_t seed, std::size_t component, int m) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (component + 1) + 0xbf58476d1ce4e5b9ULL * static_cast<std::uint64_t>(m);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> hartree_grid(const std::vector<double>& t_list) {
  std::vector<double> g = t_list;
  g.push_back(0.0);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

HartreeTrajectory hartree_for(const ModeSystem& ms, const CVector& phi, const ExperimentConfig& c) {
  HartreeOptions o;
  o.tol = c.tolerances.hartree;
  return evolve_hartree(ms, phi, hartree_grid(c.t_list), o);
}

BasisPtr coherent_basis(int modes, int n, double max_norm) {
  return shared_basis(modes, Sector::truncated(weyl_headroom(std::sqrt(static_cast<double>(n)) * max_norm)));
}

void check_weyl_loss(const FockVector& v, double limit, const char* who) {
  const double loss = 1.0 - v.norm2();
  if (loss > limit)
    throw InvariantError(std::string(who) + ": truncation loss " + std::to_string(loss) + " above " +
                         std::to_string(limit));
}

PropagatorOptions propagator_options(const ExperimentConfig& c) {
  auto o = c.propagator;
  o.tol = c.tolerances.krylov;
  return o;
}

Row make_row(int n, int m, double t, const Distances& d, const std::string& hash) {
  Row r;
  r.n = n;
  r.m = m;
  r.t = t;
  r.trace_dist = d.trace;
  r.hs_dist = d.hilbert_schmidt;
  r.op_dist = d.op;
  r.config_hash = hash;
  return r;
}

// Least-squares weights w minimizing ||rho - sum w_i |phi_i><phi_i|||_HS.
std::vector<double> fit_mixture(const CMatrix& rho, const std::vector<CVector>& phis) {
  const auto k = static_cast<Eigen::Index>(phis.size());
  Eigen::MatrixXd g(k, k);
  Eigen::VectorXd b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& pi = phis[static_cast<std::size_t>(i)];
    b[i] = pi.dot(rho * pi).real();
    for (Eigen::Index j = 0; j < k; ++j) g(i, j) = std::norm(pi.dot(phis[static_cast<std::size_t>(j)]));
  }
  const Eigen::VectorXd w = g.colPivHouseholderQr().solve(b);
  return {w.data(), w.data() + w.size()};
}

Json common_metadata(const ExperimentConfig& c, const std::string& experiment, const SweepOptions& o, double seconds) {
  return {{"version", kVersion},
          {"experiment", experiment},
          {"config_hash", config_hash(c)},
          {"config", config_json(c)},
          {"threads", o.threads},
          {"wall_seconds", seconds},
          {"bound_constants", "bound_envelope uses unit constants; only its shape in n and m is meaningful"}};
}

// Per-t summary: log-log rate fit (or the exact-regime flag), whether the
// metric decreases strictly in n, and the largest ratio metric / envelope.
Json per_t_summary(const ConvergenceReport& r, const std::vector<double>& t_list) {
  Json out = Json::array();
  for (double t : t_list) {
    std::vector<const Row*> rows;
    for (const auto& row : r.rows)
      if (row.t == t) rows.push_back(&row);
    Json s = {{"t", t}};
    bool decreasing = true;
    double envelope_constant = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = metric_value(*rows[i], r.metric);
      if (i > 0 && !(v < metric_value(*rows[i - 1], r.metric))) decreasing = false;
      if (rows[i]->bound_envelope > 0.0) envelope_constant = std::max(envelope_constant, v / rows[i]->bound_envelope);
    }
    s["strictly_decreasing"] = decreasing;
    s["envelope_constant"] = envelope_constant;
    try {
      const auto f = fit_rate(r, t);
      s["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points", f.points}};
    } catch (const ExactRegime&) {
      s["fit"] = {{"exact_regime", true}};
    } catch (const ContractError& e) {
      s["fit"] = {{"skipped", e.what()}};
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::string to_string(Metric m) { return m == Metric::trace ? "trace" : "hs"; }

Metric parse_metric(const std::string& s) {
  if (s == "trace") return Metric::trace;
  if (s == "hs" || s == "hilbert_schmidt") return Metric::hilbert_schmidt;
  throw ConfigError("unknown metric '" + s + "' (trace or hs)");
}

double metric_value(const Row& r, Metric m) { return m == Metric::trace ? r.trace_dist : r.hs_dist; }

ConvergenceReport run_convergence_sweep(const ExperimentConfig& c, const SweepOptions& options) {
  validate(c);
  const auto& st = c.state;
  if (st.family == Family::superposition)
    throw ConfigError("converge: superposition configs belong to the superpose experiment");
  const auto t0 = Clock::now();
  const auto ms = c.mode_system.build();
  const int d = ms.modes();
  const auto hash = config_hash(c);
  const auto trajectory = hartree_for(ms, st.phi, c);
  const auto popts = propagator_options(c);

  std::vector<std::vector<Row>> cells(c.n_list.size());
  parallel_for(c.n_list.size(), options.threads, [&](std::size_t idx) {
    const auto cell_start = Clock::now();
    const int n = c.n_list[idx];
    const int m = st.family == Family::theta ? st.m.at(n) : 0;
    BasisPtr basis;
    FockVector state = [&] {
      switch (st.family) {
        case Family::coherent: {
          basis = coherent_basis(d, n, st.phi.norm());
          auto v = coherent_state(st.phi, n, basis);
          check_weyl_loss(v, c.tolerances.weyl_loss, "coherent state");
          return v;
        }
        case Family::theta: {
          basis = shared_basis(d, Sector::fixed(n));
          const auto ex = random_excitation(st.phi, m, excitation_seed(c.seed, 0, m));
          return theta_state(st.phi, ex, n, st.theta_method, basis);
        }
        default:
          basis = shared_basis(d, Sector::fixed(n));
          return product_state(st.phi, n, basis);
      }
    }();
    const PropagatorPlan plan(build_hamiltonian(ms, n, basis), popts);
    const double setup = seconds_since(cell_start) / static_cast<double>(c.t_list.size());
    const double envelope = std::exp(0.5 * m) * std::pow(m + 1.0, 7) / std::sqrt(static_cast<double>(n));

    for (double t : c.t_list) {
      const auto row_start = Clock::now();
      const auto dm = reduced_dm(plan.evolve(state, t));
      auto row = make_row(n, m, t, distances(dm.rho, projector(trajectory.at(t))), hash);
      row.bound_envelope = envelope;
      row.runtime_s = setup + seconds_since(row_start);
      cells[idx].push_back(std::move(row));
    }
  });

  ConvergenceReport r;
  r.config_hash = hash;
  r.experiment = "converge";
  r.metric = Metric::trace;
  for (auto& cell : cells)
    for (auto& row : cell) r.rows.push_back(std::move(row));
  r.summary = {{"family", to_string(st.family)},
               {"per_t", per_t_summary(r, c.t_list)},
               {"hartree", {{"max_norm_drift", trajectory.max_norm_drift()},
                            {"max_energy_drift", trajectory.max_energy_drift()},
                            {"steps", trajectory.steps()}}}};
  r.metadata = common_metadata(c, r.experiment, options, seconds_since(t0));
  return r;
}

ConvergenceReport run_superposition_sweep(const ExperimentConfig& c, const SweepOptions& options) {
  validate(c);
  const auto& st = c.state;
  if (st.family != Family::superposition) throw ConfigError("superpose: config state family must be 'superposition'");
  const auto t0 = Clock::now();
  const auto ms = c.mode_system.build();
  const int d = ms.modes();
  const auto hash = config_hash(c);
  const auto popts = propagator_options(c);
  const std::size_t k = st.phis.size();
  std::vector<HartreeTrajectory> trajectories;
  for (const auto& phi : st.phis) trajectories.push_back(hartree_for(ms, phi, c));
  const auto weights = limit_weights(st.coeffs);
  double max_norm = 0.0;
  for (const auto& phi : st.phis) max_norm = std::max(max_norm, phi.norm());

  struct Cell {
    std::vector<Row> rows;
    std::vector<std::vector<double>> fitted;  // per t
    std::vector<double> coeff_weights;        // |c_i(n)|^2
  };
  std::vector<Cell> cells(c.n_list.size());

  parallel_for(c.n_list.size(), options.threads, [&](std::size_t idx) {
    const auto cell_start = Clock::now();
    const int n = c.n_list[idx];
    const int m = st.kind == SuperpositionKind::Theta ? st.m.at(n) : 0;
    const auto basis = st.kind == SuperpositionKind::Psi ? coherent_basis(d, n, max_norm)
                                                         : shared_basis(d, Sector::fixed(n));
    SuperpositionSpec spec{st.kind, st.coeffs, st.phis, {}};
    if (st.kind == SuperpositionKind::Theta)
      for (std::size_t i = 0; i < k; ++i)
        spec.excitations.push_back(random_excitation(st.phis[i], m, excitation_seed(c.seed, i, m)));
    const auto sup = superposition(spec, n, basis);

    // Component overlaps recomputed from the vectors themselves, independent
    // of the closed forms used for the Gram matrix.
    std::vector<FockVector> parts;
    if (st.kind != SuperpositionKind::Theta) {
      for (const auto& phi : st.phis) {
        auto v = st.kind == SuperpositionKind::Phi ? product_state(phi, n, basis) : coherent_state(phi, n, basis);
        if (st.kind == SuperpositionKind::Psi) check_weyl_loss(v, c.tolerances.weyl_loss, "Psi component");
        parts.push_back(std::move(v));
      }
    }
    double cross = 0.0, weighted_cross = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double o = st.kind == SuperpositionKind::Theta
                             ? std::abs(theta_overlap(st.phis[i], spec.excitations[i], st.phis[j], spec.excitations[j], n).value)
                             : std::abs(parts[i].dot(parts[j]));
        cross = std::max(cross, o);
        weighted_cross += std::abs(std::conj(sup.coeffs_n[i]) * sup.coeffs_n[j]) * o;
      }
    }
    const double nn = static_cast<double>(n);
    double tail = 0.0;
    switch (st.kind) {
      case SuperpositionKind::Phi: tail = std::pow(nn, -0.25); break;
      case SuperpositionKind::Theta: tail = std::pow(nn, -0.25) * std::exp(0.5 * m) * std::pow(m + 1.0, 3); break;
      case SuperpositionKind::Psi: tail = 1.0 / std::sqrt(nn); break;
    }

    const PropagatorPlan plan(build_hamiltonian(ms, n, basis), popts);
    const double setup = seconds_since(cell_start) / static_cast<double>(c.t_list.size());
    auto& cell = cells[idx];
    for (auto z : sup.coeffs_n) cell.coeff_weights.push_back(std::norm(z));
    for (double t : c.t_list) {
      const auto row_start = Clock::now();
      const auto dm = reduced_dm(plan.evolve(sup.state, t));
      std::vector<CVector> evolved;
      for (const auto& tr : trajectories) evolved.push_back(tr.at(t));
      const auto target = mixed_target(weights, evolved);
      auto row = make_row(n, m, t, distances(dm.rho, target.rho), hash);
      row.cross_term = cross;
      row.bound_envelope = weighted_cross + tail;
      row.runtime_s = setup + seconds_since(row_start);
      cell.rows.push_back(std::move(row));
      cell.fitted.push_back(fit_mixture(dm.rho, evolved));
    }
  });

  ConvergenceReport r;
  r.config_hash = hash;
  r.experiment = "superpose";
  r.metric = Metric::hilbert_schmidt;
  for (auto& cell : cells)
    for (auto& row : cell.rows) r.rows.push_back(row);
  Json fitted = Json::array();
  for (std::size_t ti = 0; ti < c.t_list.size(); ++ti)
    fitted.push_back({{"t", c.t_list[ti]}, {"weights", cells.back().fitted[ti]}});
  r.summary = {{"family", "superposition"},
               {"kind", to_string(st.kind)},
               {"limit_weights", weights},
               {"largest_n",
                {{"n", c.n_list.back()},
                 {"coefficient_weights", cells.back().coeff_weights},
                 {"fitted_mixture_weights", fitted}}},
               {"per_t", per_t_summary(r, c.t_list)}};
  r.metadata = common_metadata(c, r.experiment, options, seconds_since(t0));
  return r;
}

ConvergenceReport aggregate(const std::vector<ConvergenceReport>& parts) {
  if (parts.empty()) throw ContractError("aggregate: nothing to combine");
  ConvergenceReport out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.config_hash != out.config_hash || p.config_hash.empty())
      throw ConfigError("aggregate: reports come from different configurations (" + out.config_hash + " vs " +
                        p.config_hash + ")");
    if (p.metric != out.metric) throw ConfigError("aggregate: reports use different metrics");
    out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
  }
  for (const auto& row : out.rows)
    if (row.config_hash != out.config_hash) throw ConfigError("aggregate: row from a different configuration");
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const Row& a, const Row& b) { return std::tie(a.n, a.t) < std::tie(b.n, b.t); });
  return out;
}

}  // namespace mflab::harness
