#pragma once

#include <complex>
#include <Eigen/Dense>

#include "qhi/errors.hpp"

namespace qhi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Library-wide convention: vectorization is column-stacking. Element (i,j)
// of an m-row matrix lands at position j*m + i (0-based). Every module uses
// this single convention.

// Throws ShapeError if any entry is NaN or Inf.
void require_finite(const ComplexMatrix& A, const char* what = "matrix");

ComplexVector vec(const ComplexMatrix& A);

// Inverse of vec restricted to square shapes; length must be a perfect square.
ComplexMatrix unvec(const ComplexVector& v);

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);

double frobenius_norm(const ComplexMatrix& A);

// X lives on H1 (x) H2 with dim(H1) = dim(H2) = d; X is d^2 x d^2.
// Tr_1 traces out the first factor, Tr_2 the second.
ComplexMatrix partial_trace_1(const ComplexMatrix& X);
ComplexMatrix partial_trace_2(const ComplexMatrix& X);

struct HermitianEig {
    RealVector values;      // sorted descending
    ComplexMatrix vectors;  // unitary, columns aligned with values
};

struct UnitaryEig {
    ComplexVector values;   // unit modulus
    ComplexMatrix vectors;  // unitary, columns aligned with values
};

// Requires ||A - A^dag|| <= tol * max(1, ||A||).
HermitianEig eig_hermitian(const ComplexMatrix& A, double hermiticity_tol = 1e-8);

// Diagonalizes the Hermitian part (U + U^dag)/2, then re-diagonalizes the
// Hermitian matrix (U - U^dag)/(2i) restricted to each degenerate cluster;
// the two commute for normal U. Requires ||U^dag U - I|| <= unitarity_tol.
UnitaryEig eig_unitary(const ComplexMatrix& U, double unitarity_tol = 1e-6);

// Unitary factor W of the polar decomposition S = W P, computed from the SVD
// as (left factor) * (right factor)^dag so rank-deficient S is handled.
ComplexMatrix polar_unitary_factor(const ComplexMatrix& S);

// U = exp(-i H t) through the spectral decomposition of Hermitian H (hbar = 1).
ComplexMatrix expm_neg_i_Ht(const ComplexMatrix& H, double t);

}  // namespace qhi
