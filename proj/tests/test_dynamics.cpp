#include <cmath>
#include <random>

#include "doctest.h"
#include "mflab/dynamics.hpp"
#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"
#include "mflab/states.hpp"
#include "oracle.hpp"

using namespace mflab;

namespace {

ModeSystem random_system(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix h(d, d);
  for (auto& z : h.reshaped()) z = cplx(g(rng), g(rng));
  h = (0.5 * (h + h.adjoint())).eval();
  RMatrix v(d, d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q <= p; ++q) v(p, q) = v(q, p) = g(rng);
  return ModeSystem::dense(h, v);
}

PropagatorOptions with(PropagatorMethod m) {
  PropagatorOptions o;
  o.method = m;
  return o;
}

const PropagatorMethod kMethods[] = {PropagatorMethod::dense_eig, PropagatorMethod::krylov};

ModeSystem two_site() {
  LatticeSpec spec;
  spec.sites = 2;
  spec.coupling = 1.0;
  return ModeSystem::lattice(spec);
}

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_propagator_method("auto") == PropagatorMethod::automatic);
  CHECK(parse_propagator_method("dense") == PropagatorMethod::dense_eig);
  CHECK(parse_propagator_method("krylov") == PropagatorMethod::krylov);
  CHECK_THROWS_AS(parse_propagator_method("rk4"), ConfigError);
  CHECK(to_string(PropagatorMethod::krylov) == "krylov");
}

TEST_CASE("plan validation") {
  std::mt19937_64 rng(1);
  auto ms = random_system(3, rng);
  auto basis = shared_basis(3, Sector::truncated(4));
  const auto h = build_hamiltonian(ms, 4, basis);
  PropagatorOptions loose;
  loose.tol = 1e-8;
  CHECK_THROWS_AS(PropagatorPlan(h, loose), ContractError);
  PropagatorOptions small = with(PropagatorMethod::dense_eig);
  small.dense_limit = 10;
  CHECK_THROWS_AS(PropagatorPlan(h, small), CapacityError);
  small.method = PropagatorMethod::automatic;
  CHECK(PropagatorPlan(h, small).method() == PropagatorMethod::krylov);
  CHECK(PropagatorPlan(h).method() == PropagatorMethod::dense_eig);
}

TEST_CASE("identity at t = 0") {
  std::mt19937_64 rng(2);
  auto ms = random_system(3, rng);
  auto basis = shared_basis(3, Sector::truncated(5));
  const auto v = oracle::random_state(basis, rng);
  for (auto m : kMethods) {
    PropagatorPlan plan(build_hamiltonian(ms, 5, basis), with(m));
    CHECK((plan.evolve(v, 0.0) - v).norm() == 0.0);
  }
}

TEST_CASE("free evolution factorizes") {
  std::mt19937_64 rng(3);
  for (int d : {2, 3}) {
    auto ms = random_system(d, rng);
    auto free = ModeSystem::dense(ms.one_body(), RMatrix::Zero(d, d));
    const int n = 5;
    auto basis = shared_basis(d, Sector::fixed(n));
    const CVector phi = oracle::random_unit(d, rng);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(free.one_body());
    for (auto m : kMethods) {
      PropagatorPlan plan(build_hamiltonian(free, n, basis), with(m));
      for (double t : {0.3, -1.1, 2.0}) {
        const CMatrix u = eig.eigenvectors() *
                          (eig.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp().matrix().asDiagonal() *
                          eig.eigenvectors().adjoint();
        const CVector phit = u * phi;
        const auto got = plan.evolve(product_state(phi, n, basis), t);
        CHECK((got - product_state(phit, n, basis)).norm() < 1e-9);
      }
    }
  }
}

TEST_CASE("single mode phases") {
  const double g = 0.8;
  RMatrix v(1, 1);
  v(0, 0) = g;
  auto ms = ModeSystem::dense(CMatrix::Zero(1, 1), v);
  const int n = 3;
  auto basis = shared_basis(1, Sector::truncated(6));
  std::mt19937_64 rng(4);
  const auto psi = oracle::random_state(basis, rng);
  for (auto m : kMethods) {
    PropagatorPlan plan(build_hamiltonian(ms, n, basis), with(m));
    const double t = 1.7;
    const auto out = plan.evolve(psi, t);
    for (int k = 0; k <= 6; ++k) {
      const double e = g / (2.0 * n) * k * (k - 1);
      CHECK(std::abs(out[k] - std::polar(1.0, -e * t) * psi[k]) < 1e-10);
    }
  }
}

TEST_CASE("unitarity, sectors, group law and energy") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const int d = 2 + trial % 2;
    auto ms = random_system(d, rng);
    auto basis = shared_basis(d, Sector::truncated(6));
    const auto h = build_hamiltonian(ms, 4, basis);
    const auto v = oracle::random_state(basis, rng);
    const auto hv = h.apply(v);
    const double e0 = v.dot(hv).real();
    PropagatorPlan dense(h, with(PropagatorMethod::dense_eig));
    PropagatorPlan krylov(h, with(PropagatorMethod::krylov));
    for (double t : {0.4, -1.3, 3.0}) {
      const auto a = dense.evolve(v, t);
      const auto b = krylov.evolve(v, t);
      CHECK((a - b).norm() < 1e-8);
      for (const auto* w : {&a, &b}) {
        CHECK(std::abs(w->norm() - 1.0) < 1e-9);
        const auto s0 = v.sector_weights();
        const auto s1 = w->sector_weights();
        for (std::size_t k = 0; k < s0.size(); ++k) CHECK(std::abs(s0[k] - s1[k]) < 1e-9);
        CHECK(std::abs(w->dot(h.apply(*w)).real() - e0) < 1e-8 * (1 + std::abs(e0)));
      }
      const auto twice = dense.evolve(dense.evolve(v, t), 0.7);
      CHECK((twice - dense.evolve(v, t + 0.7)).norm() < 1e-9);
      const auto twice_k = krylov.evolve(krylov.evolve(v, t), 0.7);
      CHECK((twice_k - krylov.evolve(v, t + 0.7)).norm() < 1e-9);
    }
  }
}

TEST_CASE("fluctuation dynamics") {
  auto ms = two_site();
  const int n = 4;
  CVector phi0(2);
  phi0 << 1.0, 0.0;
  std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  auto traj = evolve_hartree(ms, phi0, grid);
  const int cutoff = weyl_headroom(std::sqrt(double(n)));
  auto basis = shared_basis(2, Sector::truncated(cutoff));
  PropagatorPlan plan(build_hamiltonian(ms, n, basis));
  const auto vac = FockVector::vacuum(basis);

  const auto w0 = fluctuation_apply(plan, n, traj, vac, 0.0);
  CHECK((w0.state - vac).norm() < 1e-10);
  for (double t : grid) {
    const auto w = fluctuation_apply(plan, n, traj, vac, t);
    CHECK(std::abs(w.state.norm() - 1.0) < 1e-6);
    CHECK(w.truncation_loss < 1e-6);
  }

  auto small = shared_basis(2, Sector::truncated(cutoff - 1));
  PropagatorPlan tight(build_hamiltonian(ms, n, small));
  CHECK_THROWS_AS(fluctuation_apply(tight, n, traj, FockVector::vacuum(small), 0.5), ContractError);
  CHECK_THROWS_AS(fluctuation_apply(plan, n, traj, vac, 1.5), ContractError);
}

TEST_CASE("number moments") {
  auto basis = shared_basis(2, Sector::truncated(40));
  CHECK(number_moment(FockVector::vacuum(basis), 1.0) == 1.0);
  const auto s = FockVector::basis_state(basis, {2, 1});
  CHECK(number_moment(s, 0.5) == doctest::Approx(2.0));
  CHECK(number_moment(s, 2.0) == doctest::Approx(16.0));

  // Coherent state with mean occupation 4: E[(N+1)^2] = var + (mean + 1)^2 = 29.
  CVector phi(2);
  phi << 0.6, cplx(0, 0.8);
  const auto c = coherent_state(phi, 4, basis);
  CHECK(number_moment(c, 1.0) == doctest::Approx(std::sqrt(29.0)).epsilon(1e-12));
  CHECK_THROWS_AS(number_moment(c, -0.5), ContractError);
}

TEST_CASE("growth envelope") {
  const std::vector<double> t{0, 0.5, 1, 1.5, 2};
  std::vector<double> y;
  for (double x : t) y.push_back(0.3 + 1.2 * x);
  auto e = fit_growth_envelope(t, y);
  CHECK(e.slope == doctest::Approx(1.2));
  CHECK(e.intercept == doctest::Approx(0.3));

  auto flat = fit_growth_envelope(t, {1.0, 0.9, 0.8, 0.7, 0.6});
  CHECK(flat.ls_slope < 0);
  CHECK(flat.slope == 1e-6);
  CHECK(flat.intercept == doctest::Approx(1.0));

  auto ms = two_site();
  const int n = 4;
  CVector phi0(2);
  phi0 << std::sqrt(0.5), std::sqrt(0.5);
  const std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  auto traj = evolve_hartree(ms, phi0, grid);
  auto basis = shared_basis(2, Sector::truncated(weyl_headroom(std::sqrt(double(n)))));
  PropagatorPlan plan(build_hamiltonian(ms, n, basis));
  const auto vac = FockVector::vacuum(basis);
  for (double delta : {0.5, 1.0, 2.0}) {
    std::vector<double> logs;
    for (double s : grid) logs.push_back(std::log(number_moment(fluctuation_apply(plan, n, traj, vac, s).state, delta)));
    CHECK(std::abs(logs.front()) < 1e-8);
    auto env = fit_growth_envelope(grid, logs);
    CHECK(env.slope >= 1e-6);
    CHECK(std::isfinite(env.intercept));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(logs[i] <= env.intercept + env.slope * grid[i] + 1e-12);
  }
  CHECK_THROWS_AS(fit_growth_envelope({1.0}, {1.0}), ContractError);
}
