#include <random>

#include "doctest.h"
#include "mflab/combinatorics.hpp"
#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"
#include "mflab/states.hpp"
#include "oracle.hpp"

using namespace mflab;

namespace {

double max_abs(const FockVector& v) { return v.coeffs().cwiseAbs().maxCoeff(); }

CVector vec(std::initializer_list<cplx> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

// c_{n,m} S_n(phi^{(n-m)} (x) psi_m) through explicit d^n tensors.
FockVector theta_by_tensor(const CVector& phi, const ExcitationState& ex, int n) {
  const int d = static_cast<int>(phi.size());
  oracle::Tensor t = oracle::to_tensor(ex.psi, ex.m);
  for (int k = 0; k < n - ex.m; ++k) t = oracle::tensor_product(oracle::one_particle(phi), t);
  auto sym = oracle::symmetrize(t);
  const double c = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(ex.m + 1.0) - std::lgamma(n - ex.m + 1.0)));
  for (auto& z : sym.data) z *= c;
  CHECK(std::abs(oracle::tensor_norm(sym) - 1.0) < 1e-10);
  return oracle::from_tensor(sym, shared_basis(d, Sector::fixed(n)));
}

}  // namespace

TEST_CASE("product states") {
  auto b1 = shared_basis(1, Sector::fixed(5));
  auto p1 = product_state(vec({1.0}), 5, b1);
  CHECK(p1[0] == cplx(1.0));

  auto b2 = shared_basis(2, Sector::fixed(3));
  auto e0 = product_state(vec({1.0, 0.0}), 3, b2);
  CHECK(e0.at({3, 0}) == cplx(1.0));
  CHECK(e0.norm2() == 1.0);

  const double r = 1.0 / std::sqrt(2.0);
  auto b22 = shared_basis(2, Sector::fixed(2));
  auto s = product_state(vec({r, r}), 2, b22);
  CHECK(std::abs(s.at({2, 0}) - 0.5) < 1e-15);
  CHECK(std::abs(s.at({1, 1}) - r) < 1e-15);
  CHECK(std::abs(s.at({0, 2}) - 0.5) < 1e-15);

  std::mt19937_64 rng(1);
  for (int d : {2, 3}) {
    const CVector phi = oracle::random_unit(d, rng);
    auto ps = product_state(phi, 4, shared_basis(d, Sector::fixed(4)));
    CHECK(std::abs(ps.norm() - 1.0) < 1e-13);
    oracle::Tensor t = oracle::one_particle(phi);
    for (int k = 1; k < 4; ++k) t = oracle::tensor_product(oracle::one_particle(phi), t);
    CHECK(max_abs(ps - oracle::from_tensor(t, shared_basis(d, Sector::fixed(4)))) < 1e-14);
  }
  CHECK_THROWS_AS(product_state(vec({1.0, 1.0}), 2, b22), ContractError);
  CHECK_THROWS_AS(product_state(vec({1.0, 0.0}), 3, b22), ContractError);
}

TEST_CASE("coherent states") {
  auto b = shared_basis(2, Sector::truncated(16));
  auto c0 = coherent_state(vec({1.0, 0.0}), 0, b);
  CHECK(max_abs(c0 - FockVector::vacuum(b)) == 0.0);

  auto b1 = shared_basis(1, Sector::truncated(weyl_headroom(2.0)));
  auto c = coherent_state(vec({1.0}), 4, b1);
  const auto w = c.sector_weights();
  for (int k = 0; k <= 15; ++k)
    CHECK(std::abs(w[static_cast<std::size_t>(k)] - std::exp(-4.0 + k * std::log(4.0) - std::lgamma(k + 1.0))) < 1e-14);

  std::mt19937_64 rng(4);
  const CVector phi = oracle::random_unit(2, rng);
  auto b2 = shared_basis(2, Sector::truncated(weyl_headroom(2.0)));
  auto coh = coherent_state(phi, 4, b2);
  auto recalled = extract_sector(coh, 4);
  recalled *= cplx(std::exp(log_dnm(4, 0)));
  CHECK(max_abs(recalled - product_state(phi, 4, shared_basis(2, Sector::fixed(4)))) < 1e-8);

  CHECK_THROWS_AS(coherent_state(phi, 4, shared_basis(2, Sector::truncated(20))), ContractError);
  CHECK_THROWS_AS(coherent_state(phi, 4, shared_basis(2, Sector::fixed(4))), ContractError);
}

TEST_CASE("excitations") {
  auto ex = random_excitation(vec({1.0, 0.0}), 2, 99);
  CHECK(ex.psi.basis().sector() == Sector::fixed(2));
  CHECK(std::abs(ex.psi.at({0, 2}) - 1.0) < 1e-14);

  auto a = random_excitation(vec({1.0, 0.0, 0.0}), 1, 5);
  auto b = random_excitation(vec({1.0, 0.0, 0.0}), 1, 5);
  auto c = random_excitation(vec({1.0, 0.0, 0.0}), 1, 6);
  CHECK(max_abs(a.psi - b.psi) == 0.0);
  CHECK(max_abs(a.psi - c.psi) > 1e-3);
  CHECK(a.psi.at({1, 0, 0}) == cplx(0.0));
  CHECK(std::abs(a.psi.norm() - 1.0) < 1e-14);

  std::mt19937_64 rng(8);
  for (int draw = 0; draw < 50; ++draw) {
    const int d = 2 + draw % 3;
    const int m = 1 + draw % 3;
    const CVector phi = oracle::random_unit(d, rng);
    auto e = random_excitation(phi, m, 1000 + static_cast<std::uint64_t>(draw));
    CHECK(std::abs(e.psi.norm() - 1.0) < 1e-12);
    CHECK(orthogonality_defect(phi, e.psi) < 1e-12);
  }
  CHECK_THROWS_AS(random_excitation(vec({1.0}), 1, 0), ContractError);
}

TEST_CASE("theta with m = 0 is the product state") {
  std::mt19937_64 rng(2);
  const CVector phi = oracle::random_unit(3, rng);
  auto b = shared_basis(3, Sector::fixed(4));
  ExcitationState none{0, FockVector::vacuum(shared_basis(3, Sector::fixed(0))), phi};
  const auto ref = product_state(phi, 4, b);
  for (auto method : {ThetaMethod::symmetrize, ThetaMethod::creation_polynomial, ThetaMethod::weyl_projection})
    CHECK(max_abs(theta_state(phi, none, 4, method, b) - ref) < 1e-12);
}

TEST_CASE("theta by hand: one particle in each of two modes") {
  const CVector phi = vec({1.0, 0.0});
  ExcitationState ex{1, FockVector::basis_state(shared_basis(2, Sector::fixed(1)), {0, 1}), phi};
  auto b = shared_basis(2, Sector::fixed(2));
  for (auto method : {ThetaMethod::symmetrize, ThetaMethod::creation_polynomial, ThetaMethod::weyl_projection}) {
    auto t = theta_state(phi, ex, 2, method, b);
    CHECK(std::abs(t.at({1, 1}) - 1.0) < 1e-13);
    CHECK(std::abs(t.norm() - 1.0) < 1e-13);
  }
}

TEST_CASE("theta constructions agree with each other and the tensor oracle") {
  std::mt19937_64 rng(6);
  for (int d : {2, 3}) {
    for (int n = 2; n <= 8; ++n) {
      for (int m = 0; m <= std::min(3, n); ++m) {
        const CVector phi = oracle::random_unit(d, rng);
        ExcitationState ex = m == 0 ? ExcitationState{0, FockVector::vacuum(shared_basis(d, Sector::fixed(0))), phi}
                                    : random_excitation(phi, m, static_cast<std::uint64_t>(100 * n + 10 * m + d));
        auto b = shared_basis(d, Sector::fixed(n));
        auto s = theta_state(phi, ex, n, ThetaMethod::symmetrize, b);
        auto c = theta_state(phi, ex, n, ThetaMethod::creation_polynomial, b);
        auto w = theta_state(phi, ex, n, ThetaMethod::weyl_projection, b);
        CAPTURE(d);
        CAPTURE(n);
        CAPTURE(m);
        CHECK(std::abs(s.norm() - 1.0) < 1e-9);
        CHECK(max_abs(s - c) < 1e-8);
        CHECK(max_abs(s - w) < 1e-8);
        CHECK(max_abs(c - w) < 1e-8);
        if (oracle::ipow(d, n) <= 729 && n <= 6 && m > 0) CHECK(max_abs(s - theta_by_tensor(phi, ex, n)) < 1e-12);
      }
    }
  }
}

TEST_CASE("theta into a truncated basis and precondition errors") {
  const CVector phi = vec({1.0, 0.0, 0.0});
  auto ex = random_excitation(phi, 2, 3);
  auto trunc = shared_basis(3, Sector::truncated(6));
  auto t = theta_state(phi, ex, 5, ThetaMethod::creation_polynomial, trunc);
  CHECK(std::abs(t.norm() - 1.0) < 1e-12);
  CHECK(std::abs(t.sector_weights()[5] - 1.0) < 1e-12);

  auto bad = ex;
  bad.psi = FockVector::basis_state(shared_basis(3, Sector::fixed(2)), {1, 1, 0});
  CHECK_THROWS_AS(theta_state(phi, bad, 5, ThetaMethod::symmetrize, trunc), ContractError);
  CHECK_THROWS_AS(theta_state(phi, ex, 1, ThetaMethod::symmetrize, shared_basis(3, Sector::fixed(1))),
                  ContractError);
}

TEST_CASE("closed-form A_k match displaced-back sector norms") {
  std::mt19937_64 rng(12);
  for (auto [n, m] : {std::pair{6, 1}, {6, 2}, {8, 1}, {5, 0}}) {
    const int d = 3;
    const auto closed = theta_weyl_coefficients(n, m);
    std::vector<std::vector<double>> runs;
    for (int pair = 0; pair < 2; ++pair) {
      const CVector phi = oracle::random_unit(d, rng);
      ExcitationState ex = m == 0 ? ExcitationState{0, FockVector::vacuum(shared_basis(d, Sector::fixed(0))), phi}
                                  : random_excitation(phi, m, static_cast<std::uint64_t>(7 + pair));
      auto big = shared_basis(d, Sector::truncated(48));
      auto theta = theta_state(phi, ex, n, ThetaMethod::creation_polynomial, big);
      const CVector back = -std::sqrt(static_cast<double>(n)) * phi;
      auto shifted = weyl_apply(back, theta).state;
      const auto w = shifted.sector_weights();
      std::vector<double> norms;
      for (int k = 0; k <= n - m; ++k) {
        norms.push_back(std::sqrt(w[static_cast<std::size_t>(k + m)]));
        CHECK(std::abs(norms.back() - closed.a[static_cast<std::size_t>(k)]) < 1e-7);
      }
      runs.push_back(norms);
    }
    for (std::size_t k = 0; k < runs[0].size(); ++k) CHECK(std::abs(runs[0][k] - runs[1][k]) < 1e-10);
  }
}

TEST_CASE("superposition basics") {
  const double r = 1.0 / std::sqrt(2.0);
  SuperpositionSpec one{SuperpositionKind::Phi, {cplx(2.0)}, {vec({r, r})}, {}};
  auto b = shared_basis(2, Sector::fixed(6));
  auto s1 = superposition(one, 6, b);
  CHECK(std::abs(s1.coeffs_n[0] - 1.0) < 1e-15);
  CHECK(max_abs(s1.state - product_state(vec({r, r}), 6, b)) < 1e-14);

  SuperpositionSpec ortho{SuperpositionKind::Phi, {r, r}, {vec({1.0, 0.0}), vec({0.0, 1.0})}, {}};
  for (int n : {1, 3, 7}) {
    auto s = superposition(ortho, n, shared_basis(2, Sector::fixed(n)));
    CHECK(std::abs(s.coeffs_n[0] - r) < 1e-15);  // only the rounding of r*r + r*r
    CHECK(std::abs(s.coeffs_n[1] - r) < 1e-15);
    CHECK(std::abs(s.state.norm() - 1.0) < 1e-9);
  }

  SuperpositionSpec psi{SuperpositionKind::Psi, {r, r}, {vec({1.0, 0.0}), vec({0.5, std::sqrt(3.0) / 2})}, {}};
  auto bt = shared_basis(2, Sector::truncated(weyl_headroom(2.0)));
  auto sp = superposition(psi, 4, bt);
  CHECK(std::abs(std::abs(sp.gram(0, 1)) - std::exp(-2.0)) < 1e-15);
  CHECK(sp.closed_form_defect < 1e-7);
  CHECK(std::abs(sp.state.norm() - 1.0) < 1e-9);

  SuperpositionSpec same{SuperpositionKind::Phi, {r, r}, {vec({1.0, 0.0}), vec({1.0, 0.0})}, {}};
  CHECK_THROWS_AS(superposition(same, 3, shared_basis(2, Sector::fixed(3))), DegeneracyError);
  SuperpositionSpec same_psi{SuperpositionKind::Psi, {r, r}, {vec({1.0, 0.0}), vec({1.0, 0.0})}, {}};
  CHECK_THROWS_AS(superposition(same_psi, 3, bt), DegeneracyError);
}

TEST_CASE("Gram matrices approach the identity") {
  std::mt19937_64 rng(31);
  const CVector p1 = vec({1.0, 0.0});
  const CVector p2 = vec({0.5, std::sqrt(3.0) / 2});
  const std::vector<cplx> coeffs{2.0 / std::sqrt(5.0), 1.0 / std::sqrt(5.0)};
  double prev_phi = 1, prev_psi = 1;
  for (int n : {8, 16, 32}) {
    SuperpositionSpec phi{SuperpositionKind::Phi, coeffs, {p1, p2}, {}};
    auto s = superposition(phi, n, shared_basis(2, Sector::fixed(n)));
    CHECK(std::abs(std::abs(s.gram(0, 1)) - std::pow(0.5, n)) < 1e-15);
    CHECK(std::abs(s.gram(0, 1)) < prev_phi);
    prev_phi = std::abs(s.gram(0, 1));

    SuperpositionSpec psi{SuperpositionKind::Psi, coeffs, {p1, p2}, {}};
    auto bt = shared_basis(2, Sector::truncated(weyl_headroom(std::sqrt(static_cast<double>(n)))));
    auto sp = superposition(psi, n, bt);
    CHECK(std::abs(std::abs(sp.gram(0, 1)) - std::exp(-0.5 * n)) < 1e-15);
    CHECK(sp.closed_form_defect < 1e-8);
    CHECK(std::abs(sp.gram(0, 1)) < prev_psi);
    prev_psi = std::abs(sp.gram(0, 1));
    // normalized coefficients stay bounded by the limit ones
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(sp.coeffs_n[i]) <= 1.5 * std::abs(coeffs[i]));

    const CVector q1 = oracle::random_unit(2, rng), q2 = oracle::random_unit(2, rng);
    SuperpositionSpec theta{SuperpositionKind::Theta, coeffs, {q1, q2}, {random_excitation(q1, 1, 1), random_excitation(q2, 1, 2)}};
    auto st = superposition(theta, n, shared_basis(2, Sector::fixed(n)));
    const auto ov = theta_overlap(q1, theta.excitations[0], q2, theta.excitations[1], n);
    CHECK(std::abs(std::abs(st.gram(0, 1)) - std::abs(ov.value)) < 1e-12);
    CHECK(std::abs(ov.value) <= ov.bound);
  }
}

TEST_CASE("closed-form overlaps") {
  std::mt19937_64 rng(5);
  const CVector a = oracle::random_unit(3, rng);
  CHECK(std::abs(product_overlap(a, a, 7) - 1.0) < 1e-14);
  const CVector u = vec({1.0, 0.0});
  const CVector w = vec({0.9, std::sqrt(1 - 0.81)});
  CHECK(std::abs(product_overlap(u, w, 20) - std::pow(0.9, 20)) < 1e-15);
  CHECK(std::abs(product_overlap(u, w, 20) - 0.1216) < 1e-4);

  auto e1 = random_excitation(u, 1, 1);
  auto e2 = random_excitation(w, 1, 2);
  const auto ov = theta_overlap(u, e1, w, e2, 8);
  CHECK(std::abs(ov.value) <= ov.bound);
  CHECK(ov.bound == doctest::Approx(2.0 * 8.0 * std::pow(0.9, 6)));
}
