#pragma once

// Debug dumps. Occupation tuples are integer arrays, complex numbers are
// [re, im] pairs, and Hermitian matrices are packed as their real diagonal
// plus the upper triangle read row by row.

#include "json.hpp"
#include "mflab/fock_vector.hpp"
#include "mflab/sparse_operator.hpp"

namespace mflab {

using Json = nlohmann::json;

Json complex_json(cplx z);
Json to_json(const FockBasis& basis);
Json to_json(const FockVector& v);
Json to_json(const SparseOperator& op);

Json packed_hermitian_json(const CMatrix& m);
CMatrix unpack_hermitian_json(const Json& j);

}  // namespace mflab
