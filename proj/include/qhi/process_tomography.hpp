#pragma once

#include <cstdint>
#include <vector>

#include "qhi/quantum.hpp"

namespace qhi {

// Experimental-data matrix: row m holds the expansion coefficients of the
// m-th basis element's process output in the natural basis.
struct LambdaMatrix {
    ComplexMatrix matrix;  // d^2 x d^2
};

// The d^4 x d^4 basis-change matrix stored as a permutation: perm[r] is the
// column of the single 1 in row r (0-based). Never materialized densely
// outside the test oracle.
struct PermutationB {
    Eigen::Index d;
    std::vector<std::int64_t> perm;
};

struct DMatrix {
    ComplexMatrix matrix;  // d^2 x d^2
};

// lambda_{m,n} with n = (s-1)d + t is entry (s, t) of output_m; a direct
// read-off thanks to the orthonormality of the natural basis.
LambdaMatrix compute_lambda(const std::vector<ComplexMatrix>& outputs,
                            const NaturalBasis& basis);

PermutationB b_permutation(Eigen::Index d);

// D = unvec(B^dag vec(Lambda)); a pure reordering, so the Frobenius norm is
// preserved exactly.
DMatrix apply_b_dagger(const LambdaMatrix& lam, const PermutationB& B);

}  // namespace qhi
