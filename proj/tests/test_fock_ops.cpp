#include <random>

#include "doctest.h"
#include "mflab/error.hpp"
#include "mflab/fock_ops.hpp"
#include "oracle.hpp"

using namespace mflab;

namespace {

double max_abs(const FockVector& v) { return v.coeffs().cwiseAbs().maxCoeff(); }

FockVector sqrt_n_plus_one(const FockVector& v, double power) {
  FockVector out = v;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] *= std::pow(v.basis().total(i) + 1.0, power);
  return out;
}

}  // namespace

TEST_CASE("creation on the vacuum") {
  auto b = shared_basis(2, Sector::fixed(0));
  auto out = ladder_apply(Ladder::create, 0, FockVector::vacuum(b));
  CHECK(out.basis().sector() == Sector::fixed(1));
  CHECK(out.at({1, 0}) == cplx(1.0));
  CHECK(out.norm2() == doctest::Approx(1.0));
}

TEST_CASE("annihilation matches the tensor contraction oracle") {
  auto b = shared_basis(2, Sector::fixed(4));
  auto v = FockVector::basis_state(b, {3, 1});
  auto out = ladder_apply(Ladder::annihilate, 0, v);
  CHECK(std::abs(out.at({2, 1}) - std::sqrt(3.0)) < 1e-14);
  CHECK(out.norm2() == doctest::Approx(3.0));

  std::mt19937_64 rng(3);
  for (int d : {2, 3}) {
    auto bn = shared_basis(d, Sector::fixed(4));
    auto bm = shared_basis(d, Sector::fixed(3));
    auto psi = oracle::random_state(bn, rng);
    const auto t = oracle::to_tensor(psi, 4);
    for (int p = 0; p < d; ++p) {
      auto ref = oracle::from_tensor(oracle::annihilate(t, p), bm);
      auto got = ladder_apply(Ladder::annihilate, p, psi);
      CHECK(max_abs(got - ref) < 1e-13);
    }
  }
}

TEST_CASE("annihilating an empty mode gives zero") {
  auto b = shared_basis(2, Sector::fixed(2));
  auto out = ladder_apply(Ladder::annihilate, 1, FockVector::basis_state(b, {2, 0}));
  CHECK(out.norm2() == 0.0);
}

TEST_CASE("ladder errors") {
  auto b = shared_basis(2, Sector::fixed(2));
  auto v = FockVector::basis_state(b, {1, 1});
  CHECK_THROWS_AS(ladder_apply(Ladder::create, 2, v), ContractError);
  CHECK_THROWS_AS(ladder_apply(Ladder::create, -1, v), ContractError);
  CHECK_THROWS_AS(ladder_apply(Ladder::create, 0, v, shared_basis(2, Sector::fixed(2))), ContractError);
  CHECK_THROWS_AS(ladder_apply(Ladder::annihilate, 0, FockVector::vacuum(shared_basis(2, Sector::fixed(0)))),
                  ContractError);
  const std::vector<cplx> f{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(field_apply(Ladder::create, f, v), ContractError);
}

TEST_CASE("truncated creation drops amplitude above the cutoff") {
  auto b = shared_basis(2, Sector::truncated(2));
  auto v = FockVector::basis_state(b, {1, 1});
  CHECK(ladder_apply(Ladder::create, 0, v).norm2() == 0.0);
  auto w = FockVector::basis_state(b, {1, 0});
  CHECK(std::abs(ladder_apply(Ladder::create, 0, w).at({2, 0}) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("field operators are linear in the test function") {
  auto b = shared_basis(2, Sector::fixed(2));
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<cplx> f{r, r};
  auto out = field_apply(Ladder::annihilate, f, FockVector::basis_state(b, {1, 1}));
  CHECK(std::abs(out.at({0, 1}) - r) < 1e-15);
  CHECK(std::abs(out.at({1, 0}) - r) < 1e-15);

  auto vac = FockVector::vacuum(shared_basis(3, Sector::fixed(0)));
  const std::vector<cplx> e0{1.0, 0.0, 0.0};
  CHECK(field_apply(Ladder::create, e0, vac).at({1, 0, 0}) == cplx(1.0));

  // complex f: no conjugation anywhere
  const std::vector<cplx> g{cplx(0, 2), cplx(1, -1)};
  auto w = field_apply(Ladder::create, g, FockVector::vacuum(shared_basis(2, Sector::fixed(0))));
  CHECK(w.at({1, 0}) == cplx(0, 2));
  CHECK(w.at({0, 1}) == cplx(1, -1));
}

TEST_CASE("field commutator is sum f_p g_p inside the truncation") {
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 4}) {
    auto b = shared_basis(d, Sector::truncated(5));
    for (int trial = 0; trial < 5; ++trial) {
      const CVector f = oracle::random_unit(d, rng), g = oracle::random_unit(d, rng);
      const auto v = oracle::random_state_below(b, 4, rng);
      auto lhs = field_apply(Ladder::annihilate, f, field_apply(Ladder::create, g, v)) -
                 field_apply(Ladder::create, g, field_apply(Ladder::annihilate, f, v));
      const cplx fg = (f.array() * g.array()).sum();
      CHECK(max_abs(lhs - fg * v) < 1e-12);
    }
  }
}

TEST_CASE("CCR and adjointness of assembled ladder matrices") {
  std::mt19937_64 rng(5);
  for (int d : {1, 2, 3, 4}) {
    auto b = shared_basis(d, Sector::truncated(4));
    for (int p = 0; p < d; ++p) {
      auto ap = ladder_matrix(Ladder::annihilate, p, b);
      auto cp = ladder_matrix(Ladder::create, p, b);
      CHECK(max_abs_difference(cp, ap.adjoint()) < 1e-14);
      for (int q = 0; q < d; ++q) {
        auto aq = ladder_matrix(Ladder::annihilate, q, b);
        auto cq = ladder_matrix(Ladder::create, q, b);
        auto v = oracle::random_state_below(b, 3, rng);
        auto comm = ap.apply(cq.apply(v)) - cq.apply(ap.apply(v));
        if (p == q) comm -= v;
        CHECK(max_abs(comm) < 1e-12);
        auto cc = ap.apply(aq.apply(v)) - aq.apply(ap.apply(v));
        CHECK(max_abs(cc) < 1e-12);
        auto u = oracle::random_state(b, rng);
        CHECK(std::abs(u.dot(cq.apply(v)) - aq.apply(u).dot(v)) < 1e-12);
      }
    }
  }
}

TEST_CASE("a corrupted ladder coefficient breaks the CCR") {
  auto b = shared_basis(2, Sector::truncated(4));
  auto bad = +[](int n) { return n == 2 ? 1.5 : std::sqrt(static_cast<double>(n)); };
  auto a = ladder_matrix(Ladder::annihilate, 0, b, bad);
  auto c = ladder_matrix(Ladder::create, 0, b, bad);
  auto v = FockVector::basis_state(b, {1, 0});
  auto comm = a.apply(c.apply(v)) - c.apply(a.apply(v)) - v;
  CHECK(max_abs(comm) > 0.1);
}

TEST_CASE("second quantization") {
  auto b3 = shared_basis(2, Sector::fixed(3));
  auto n_op = second_quantize(CMatrix::Identity(2, 2), b3);
  CHECK((n_op.to_dense() - 3.0 * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  auto v = FockVector::basis_state(b3, {2, 1});
  auto out = second_quantize(a, b3).apply(v);
  CHECK(max_abs(out - 2.0 * v) < 1e-15);

  auto b1 = shared_basis(2, Sector::fixed(1));
  CMatrix hop = CMatrix::Zero(2, 2);
  hop(0, 1) = hop(1, 0) = 1.0;
  auto moved = second_quantize(hop, b1).apply(FockVector::basis_state(b1, {1, 0}));
  CHECK(moved.at({0, 1}) == cplx(1.0));
  CHECK(moved.at({1, 0}) == cplx(0.0));

  CHECK_THROWS_AS(second_quantize(CMatrix::Identity(3, 3), b1), ContractError);
}

TEST_CASE("dGamma(1) equals N entrywise and dGamma(A) = sum A_pq a+_p a_q") {
  std::mt19937_64 rng(9);
  for (int d : {1, 2, 3, 4}) {
    auto b = shared_basis(d, Sector::truncated(4));
    CHECK(max_abs_difference(second_quantize(CMatrix::Identity(d, d), b), number_operator(b)) == 0.0);
    CMatrix a = CMatrix::Random(d, d);
    a = (a + a.adjoint()).eval();
    auto dg = second_quantize(a, b);
    CHECK(dg.hermitian());
    CHECK(dg.hermiticity_defect() < 1e-14);
    CHECK(dg.conserves_number());
    std::vector<Triplet> none;
    SparseOperator ref(b, none, false);
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q)
        ref = ref + a(p, q) * (ladder_matrix(Ladder::create, p, b) * ladder_matrix(Ladder::annihilate, q, b));
    CHECK(max_abs_difference(dg, ref) < 1e-13);
  }
}

TEST_CASE("operator bounds on random states") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 4;
    auto b = shared_basis(d, Sector::truncated(5));
    auto v = oracle::random_state(b, rng);
    const CVector f = 3.0 * oracle::random_unit(d, rng);
    const double rhs1 = f.norm() * sqrt_n_plus_one(v, 0.5).norm();
    CHECK(field_apply(Ladder::create, f, v).norm() <= rhs1 * (1 + 1e-12));
    CHECK(field_apply(Ladder::annihilate, f, v).norm() <= rhs1 * (1 + 1e-12));

    CMatrix kern = CMatrix::Random(d, d);
    const double fn = kern.norm();
    auto apply_two = [&](Ladder first, Ladder second) {
      FockVector acc(v.basis_ptr());
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          acc.axpy(kern(p, q), ladder_apply(first, p, ladder_apply(second, q, v)));
      return acc.norm();
    };
    const double np1 = sqrt_n_plus_one(v, 1.0).norm();
    // two creations: sector n picks up sqrt((n+1)(n+2)), so (N+1) alone is not enough
    FockVector raised = v;
    for (std::size_t i = 0; i < v.size(); ++i) raised[i] *= std::sqrt((b->total(i) + 1.0) * (b->total(i) + 2.0));
    CHECK(apply_two(Ladder::create, Ladder::create) <= fn * raised.norm() * (1 + 1e-12));
    CHECK(apply_two(Ladder::annihilate, Ladder::annihilate) <= fn * np1 * (1 + 1e-12));
    FockVector nv = v;
    for (std::size_t i = 0; i < v.size(); ++i) nv[i] *= static_cast<double>(b->total(i));
    CHECK(apply_two(Ladder::create, Ladder::annihilate) <= fn * nv.norm() * (1 + 1e-12));
  }
}

TEST_CASE("two creations exceed ||f|| ||(N+1) v|| on the vacuum") {
  auto b = shared_basis(1, Sector::truncated(2));
  auto out = ladder_apply(Ladder::create, 0, ladder_apply(Ladder::create, 0, FockVector::vacuum(b)));
  CHECK(out.norm() == doctest::Approx(std::sqrt(2.0)));  // ||f|| = 1, ||(N+1) vac|| = 1
}

TEST_CASE("Hamiltonian assembly") {
  CMatrix h(2, 2);
  h << 1.0, -1.0, -1.0, 1.0;
  auto free = ModeSystem::dense(h, RMatrix::Zero(2, 2));
  auto b = shared_basis(2, Sector::truncated(4));
  CHECK(max_abs_difference(build_hamiltonian(free, 3, b), second_quantize(h, b)) == 0.0);

  const double g = 0.7;
  RMatrix v1(1, 1);
  v1(0, 0) = g;
  auto single = ModeSystem::dense(CMatrix::Zero(1, 1), v1);
  for (int n : {1, 2, 5, 9}) {
    auto bn = shared_basis(1, Sector::fixed(n));
    auto hm = build_hamiltonian(single, n, bn).to_dense();
    CHECK(std::abs(hm(0, 0) - g / (2.0 * n) * n * (n - 1)) < 1e-14);
  }

  // number conservation: <v, [H, N] v> = 0, and H is block diagonal
  std::mt19937_64 rng(4);
  auto ms = ModeSystem::lattice({3, 1.0, {0.2, -0.1, 0.0}, PairPotential::gaussian, 1.3, 0.8});
  auto bt = shared_basis(3, Sector::truncated(5));
  auto hh = build_hamiltonian(ms, 5, bt);
  auto nn = number_operator(bt);
  CHECK(hh.conserves_number());
  CHECK(hh.hermiticity_defect() < 1e-13);
  for (int trial = 0; trial < 10; ++trial) {
    auto v = oracle::random_state(bt, rng);
    auto comm = hh.apply(nn.apply(v)) - nn.apply(hh.apply(v));
    CHECK(std::abs(v.dot(comm)) < 1e-12);
  }
  CHECK_THROWS_AS(build_hamiltonian(ms, 0, bt), ContractError);
  CHECK_THROWS_AS(build_hamiltonian(ms, 4, shared_basis(2, Sector::fixed(2))), ContractError);
}

TEST_CASE("two-body term matches the explicit normal-ordered sum") {
  auto ms = ModeSystem::lattice({3, 0.0, {}, PairPotential::gaussian, 1.1, 1.0});
  auto b = shared_basis(3, Sector::truncated(4));
  const int n = 4;
  auto hh = build_hamiltonian(ms, n, b);
  std::vector<Triplet> none;
  SparseOperator ref(b, none, false);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      auto term = ladder_matrix(Ladder::create, p, b) * ladder_matrix(Ladder::create, q, b) *
                  ladder_matrix(Ladder::annihilate, q, b) * ladder_matrix(Ladder::annihilate, p, b);
      ref = ref + cplx(ms.pair(p, q) / (2.0 * n)) * term;
    }
  // creation operators on the top sector are truncated, so compare below it
  auto dense_h = hh.to_dense();
  auto dense_r = ref.to_dense();
  const auto keep = static_cast<Eigen::Index>(b->sector_offset(4));
  CHECK((dense_h - dense_r).topLeftCorner(keep, keep).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sector projection") {
  auto b = shared_basis(2, Sector::truncated(3));
  auto vac = FockVector::vacuum(b);
  CHECK(max_abs(sector_project(0, vac) - vac) == 0.0);
  std::mt19937_64 rng(2);
  auto v = oracle::random_state(b, rng);
  for (int n = 0; n <= 3; ++n) {
    auto p = sector_project(n, v);
    CHECK(max_abs(sector_project(n, p) - p) == 0.0);
    for (int m = 0; m <= 3; ++m)
      if (m != n) CHECK(sector_project(m, p).norm2() == 0.0);
  }
  CHECK_THROWS_AS(sector_project(4, v), ContractError);
}

TEST_CASE("mode system validation") {
  CMatrix h(2, 2);
  h << 1.0, cplx(0, 1), cplx(0, 1), 1.0;  // not Hermitian
  CHECK_THROWS_AS(ModeSystem::dense(h, RMatrix::Zero(2, 2)), ContractError);
  RMatrix v(2, 2);
  v << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(ModeSystem::dense(CMatrix::Identity(2, 2), v), ContractError);
  auto ring2 = ModeSystem::lattice({2, 1.0, {}, PairPotential::contact, 1.0, 1.0});
  CHECK(ring2.one_body()(0, 0) == cplx(1.0));
  CHECK(ring2.one_body()(0, 1) == cplx(-1.0));
  auto ring4 = ModeSystem::lattice({4, 1.0, {}, PairPotential::uniform, 2.0, 1.0});
  CHECK(ring4.one_body()(0, 0) == cplx(2.0));
  CHECK(ring4.one_body()(0, 3) == cplx(-1.0));
  CHECK(ring4.pair(1, 3) == 2.0);
}
