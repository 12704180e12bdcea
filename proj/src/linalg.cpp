#include "qhi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qhi {

void require_finite(const ComplexMatrix& A, const char* what) {
    if (!A.allFinite()) {
        throw ShapeError(std::string(what) + " contains non-finite entries");
    }
}

ComplexVector vec(const ComplexMatrix& A) {
    require_finite(A);
    // Eigen stores column-major, so this is exactly column-stacking.
    return ComplexVector(Eigen::Map<const ComplexVector>(A.data(), A.size()));
}

ComplexMatrix unvec(const ComplexVector& v) {
    const auto n = v.size();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d * d != n) {
        throw ShapeError("unvec: length " + std::to_string(n) + " is not a perfect square");
    }
    return ComplexMatrix(Eigen::Map<const ComplexMatrix>(v.data(), d, d));
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    require_finite(A, "kron lhs");
    require_finite(B, "kron rhs");
    ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

double frobenius_norm(const ComplexMatrix& A) {
    return A.norm();
}

namespace {

Eigen::Index subsystem_dim(const ComplexMatrix& X, const char* who) {
    if (X.rows() != X.cols()) {
        throw ShapeError(std::string(who) + ": input must be square");
    }
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(X.rows()))));
    if (d * d != X.rows()) {
        throw ShapeError(std::string(who) + ": dimension " + std::to_string(X.rows()) +
                         " is not a perfect square");
    }
    return d;
}

}  // namespace

ComplexMatrix partial_trace_1(const ComplexMatrix& X) {
    const auto d = subsystem_dim(X, "partial_trace_1");
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index s = 0; s < d; ++s) {
                out(i, j) += X(s * d + i, s * d + j);
            }
        }
    }
    return out;
}

ComplexMatrix partial_trace_2(const ComplexMatrix& X) {
    const auto d = subsystem_dim(X, "partial_trace_2");
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index s = 0; s < d; ++s) {
                out(i, j) += X(i * d + s, j * d + s);
            }
        }
    }
    return out;
}

HermitianEig eig_hermitian(const ComplexMatrix& A, double hermiticity_tol) {
    require_finite(A, "eig_hermitian input");
    if (A.rows() != A.cols()) {
        throw ShapeError("eig_hermitian: input must be square");
    }
    const double scale = std::max(1.0, A.norm());
    if ((A - A.adjoint()).norm() > hermiticity_tol * scale) {
        throw ShapeError("eig_hermitian: input is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(A);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
    }
    const auto n = A.rows();
    HermitianEig out;
    out.values = solver.eigenvalues().reverse();
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    }
    return out;
}

UnitaryEig eig_unitary(const ComplexMatrix& U, double unitarity_tol) {
    require_finite(U, "eig_unitary input");
    if (U.rows() != U.cols()) {
        throw ShapeError("eig_unitary: input must be square");
    }
    const auto n = U.rows();
    if ((U.adjoint() * U - ComplexMatrix::Identity(n, n)).norm() > unitarity_tol) {
        throw ShapeError("eig_unitary: input is not unitary within tolerance");
    }

    const ComplexMatrix re_part = 0.5 * (U + U.adjoint());
    const ComplexMatrix im_part = (U - U.adjoint()) / Complex(0.0, 2.0);

    HermitianEig base = eig_hermitian(re_part);
    ComplexMatrix vectors = base.vectors;

    // Re-diagonalize the commuting imaginary part inside each degenerate
    // cluster of the real part (gap threshold scaled by ||U||).
    const double gap = 1e-8 * std::max(1.0, U.norm());
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && std::abs(base.values(end) - base.values(end - 1)) <= gap) {
            ++end;
        }
        const Eigen::Index len = end - start;
        if (len > 1) {
            const ComplexMatrix block =
                vectors.middleCols(start, len).adjoint() * im_part * vectors.middleCols(start, len);
            HermitianEig sub = eig_hermitian(0.5 * (block + block.adjoint()));
            vectors.middleCols(start, len) = vectors.middleCols(start, len) * sub.vectors;
        }
        start = end;
    }

    UnitaryEig out;
    out.vectors = vectors;
    out.values.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        // Rayleigh quotient, then snap to the unit circle.
        Complex lambda = vectors.col(j).dot(U * vectors.col(j));
        const double mod = std::abs(lambda);
        out.values(j) = mod > 0.0 ? lambda / mod : Complex(1.0, 0.0);
    }
    return out;
}

ComplexMatrix polar_unitary_factor(const ComplexMatrix& S) {
    require_finite(S, "polar input");
    if (S.rows() != S.cols()) {
        throw ShapeError("polar_unitary_factor: input must be square");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

ComplexMatrix expm_neg_i_Ht(const ComplexMatrix& H, double t) {
    HermitianEig eig = eig_hermitian(H);
    ComplexVector phases(eig.values.size());
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        phases(j) = std::exp(Complex(0.0, -eig.values(j) * t));
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace qhi
