#include "mflab/json_dump.hpp"

#include <cmath>

#include "mflab/error.hpp"

namespace mflab {

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const FockBasis& basis) {
  Json states = Json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Json occ = Json::array();
    for (auto n : basis.occupation(i)) occ.push_back(static_cast<int>(n));
    states.push_back(std::move(occ));
  }
  return {{"modes", basis.modes()},
          {"sector", {{"kind", basis.is_fixed() ? "fixed" : "truncated"}, {"n", basis.sector().n}}},
          {"states", std::move(states)}};
}

Json to_json(const FockVector& v) {
  Json coeffs = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i) coeffs.push_back(complex_json(v[i]));
  return {{"basis", to_json(v.basis())}, {"coeffs", std::move(coeffs)}};
}

Json to_json(const SparseOperator& op) {
  Json entries = Json::array();
  for (const auto& t : op.triplets())
    entries.push_back({{"row", t.row}, {"col", t.col}, {"value", complex_json(t.value)}});
  return {{"basis", to_json(op.basis())}, {"hermitian", op.hermitian()}, {"entries", std::move(entries)}};
}

Json packed_hermitian_json(const CMatrix& m) {
  if (m.rows() != m.cols()) throw ContractError("packed_hermitian_json: matrix not square");
  Json diag = Json::array();
  Json upper = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    diag.push_back(m(i, i).real());
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) upper.push_back(complex_json(m(i, j)));
  }
  return {{"dim", m.rows()}, {"diag", std::move(diag)}, {"upper", std::move(upper)}};
}

CMatrix unpack_hermitian_json(const Json& j) {
  const auto n = j.at("dim").get<Eigen::Index>();
  const auto& diag = j.at("diag");
  const auto& upper = j.at("upper");
  if (static_cast<Eigen::Index>(diag.size()) != n || static_cast<Eigen::Index>(upper.size()) != n * (n - 1) / 2)
    throw ContractError("unpack_hermitian_json: inconsistent sizes");
  CMatrix m(n, n);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    m(r, r) = diag[static_cast<std::size_t>(r)].get<double>();
    for (Eigen::Index c = r + 1; c < n; ++c, ++k) {
      const cplx z(upper[k][0].get<double>(), upper[k][1].get<double>());
      m(r, c) = z;
      m(c, r) = std::conj(z);
    }
  }
  return m;
}

}  // namespace mflab
