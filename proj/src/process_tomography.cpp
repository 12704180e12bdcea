#include "qhi/process_tomography.hpp"

#include <string>

namespace qhi {

LambdaMatrix compute_lambda(const std::vector<ComplexMatrix>& outputs,
                            const NaturalBasis& basis) {
    const Eigen::Index d = basis.d;
    if (static_cast<Eigen::Index>(outputs.size()) != d * d) {
        throw ShapeError("compute_lambda: expected " + std::to_string(d * d) +
                         " outputs, got " + std::to_string(outputs.size()));
    }
    ComplexMatrix lambda(d * d, d * d);
    for (Eigen::Index m = 0; m < d * d; ++m) {
        const ComplexMatrix& out = outputs[m];
        if (out.rows() != d || out.cols() != d) {
            throw ShapeError("compute_lambda: output dimension mismatch");
        }
        // lambda_{m, s*d+t} = Tr(|t><s| out) = out(s, t).
        for (Eigen::Index s = 0; s < d; ++s) {
            for (Eigen::Index t = 0; t < d; ++t) {
                lambda(m, s * d + t) = out(s, t);
            }
        }
    }
    return LambdaMatrix{std::move(lambda)};
}

PermutationB b_permutation(Eigen::Index d) {
    if (d < 2) {
        throw ShapeError("b_permutation: dimension must be at least 2");
    }
    const Eigen::Index d2 = d * d;
    PermutationB B;
    B.d = d;
    B.perm.resize(d2 * d2);
    // Row r of B addresses vec(Lambda) entry (m, n): r = n*d^2 + m with
    // m = p*d + q, n = s*d + t. The single 1 sits in column k*d^2 + j with
    // j = s*d + p and k = t*d + q (Kronecker-delta structure of the natural
    // basis change).
    for (Eigen::Index p = 0; p < d; ++p) {
        for (Eigen::Index q = 0; q < d; ++q) {
            const Eigen::Index m = p * d + q;
            for (Eigen::Index s = 0; s < d; ++s) {
                for (Eigen::Index t = 0; t < d; ++t) {
                    const Eigen::Index n = s * d + t;
                    const Eigen::Index j = s * d + p;
                    const Eigen::Index k = t * d + q;
                    B.perm[n * d2 + m] = k * d2 + j;
                }
            }
        }
    }
    return B;
}

DMatrix apply_b_dagger(const LambdaMatrix& lam, const PermutationB& B) {
    const Eigen::Index d2 = B.d * B.d;
    if (lam.matrix.rows() != d2 || lam.matrix.cols() != d2) {
        throw ShapeError("apply_b_dagger: Lambda dimension does not match permutation");
    }
    const ComplexVector v = vec(lam.matrix);
    ComplexVector out(v.size());
    // B is a real permutation, so B^dag = B^T scatters entry r to perm[r].
    for (Eigen::Index r = 0; r < v.size(); ++r) {
        out(B.perm[r]) = v(r);
    }
    return DMatrix{unvec(out)};
}

}  // namespace qhi
