#pragma once

#include <optional>

#include "qhi/process_tomography.hpp"

namespace qhi {

struct RankOneFit {
    ComplexMatrix S_hat;    // d x d
    double alpha1 = 0.0;    // largest eigenvalue of D + D^dag
    double residual = 0.0;  // ||vec(S)vec(S)^dag - D||
    bool degenerate_top = false;  // top eigenvalue was not well separated
};

struct UnitaryFit {
    ComplexMatrix G_hat;
    bool singular_warning = false;  // S was rank deficient
};

struct HamiltonianEstimate {
    ComplexMatrix H_hat;  // Hermitian
    double h1_anchor = 0.0;
};

struct TimeCheck {
    bool ok = false;
    double spread = 0.0;           // h_d - h_1
    double bound = 0.0;            // pi / spread
    double margin = 0.0;           // bound - t
    std::optional<bool> sufficient_ok;  // t < pi/(2 h_m) when h_m supplied
};

struct ErrorReport {
    double sq_error = 0.0;            // Tr[(H_hat - H)^dag (H_hat - H)]
    double shift_min_sq_error = 0.0;  // min_c ||H_hat + cI - H||^2
};

// Rank-one fit: top eigenpair of D + D^dag gives S = sqrt(alpha1/2) P1.
// Throws DegenerateData when alpha1 <= 0.
RankOneFit solve_rank_one(const DMatrix& D_hat);

// Unitary projection via the SVD polar factor of S.
UnitaryFit solve_unitary(const RankOneFit& fit);

// The single Kraus operator implied by G: A = G^T (global phase deferred to
// the h1 anchor).
ComplexMatrix kraus_from_g(const UnitaryFit& fit);

// Phase-aware matrix logarithm: eigenphases of A sorted ascending in
// [0, 2pi), branch-cut repair when the spread reaches pi, then the h1 anchor
// removes the global phase. Throws AssumptionViolation if the repaired
// spread still reaches pi.
HamiltonianEstimate hamiltonian_from_unitary(const ComplexMatrix& A_hat, double t,
                                             double h1);

// Simulation-side guard: t must sit inside (0, pi/(h_d - h_1)); also
// evaluates the sufficient bound t < pi/(2 h_m) for a supplied
// submultiplicative-norm bound h_m.
TimeCheck check_evolution_time(const Hamiltonian& H, double t,
                               std::optional<double> h_m = std::nullopt);

ErrorReport gauge_aligned_error(const HamiltonianEstimate& H_hat, const Hamiltonian& H_true);

}  // namespace qhi
