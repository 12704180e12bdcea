#pragma once

#include <optional>
#include <vector>

#include "qhi/linalg.hpp"

namespace qhi {

// Hermitian generator of the dynamics, energy units with hbar = 1.
// h1_anchor, when set, is the assumed-known smallest eigenvalue used to fix
// the unobservable global phase of the recovered propagator.
struct Hamiltonian {
    ComplexMatrix matrix;
    std::optional<double> h1_anchor;

    explicit Hamiltonian(ComplexMatrix m, std::optional<double> h1 = std::nullopt);
    Eigen::Index dim() const { return matrix.rows(); }
};

struct DensityMatrix {
    ComplexMatrix matrix;

    explicit DensityMatrix(ComplexMatrix m);
    Eigen::Index dim() const { return matrix.rows(); }
};

// The d^2 elementary matrices |j><k| with index i = (j-1)d + k (1-based in
// the docs, 0-based in storage: index j*d + k for 0-based j, k).
struct NaturalBasis {
    Eigen::Index d;
    std::vector<ComplexMatrix> elements;
};

struct RecipeTerm {
    int probe_index;
    Complex coeff;
};

// Physical probe states realizing the natural basis. Layout: the d diagonal
// states |j><j| first, then for each pair j < k the three superpositions
// (|j>+|k>)/sqrt2, (|j>+i|k>)/sqrt2, (|k>+i|j>)/sqrt2.
struct ProbeSet {
    Eigen::Index d;
    std::vector<DensityMatrix> physical_probes;
    // One recipe per natural-basis element, aligned with NaturalBasis order.
    std::vector<std::vector<RecipeTerm>> index_map;

    static Eigen::Index probe_count(Eigen::Index d) { return (3 * d * d - d) / 2; }
};

NaturalBasis natural_basis(Eigen::Index d);

ProbeSet probe_set(Eigen::Index d);

// rho -> U rho U^dag. Requires U unitary to unitarity_tol.
DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& U,
                     double unitarity_tol = 1e-8);

// Complex linear combination of per-probe process outputs; estimates the
// process image of a natural-basis element, so the result is in general
// not Hermitian.
ComplexMatrix assemble_output_for_basis(const std::vector<ComplexMatrix>& probe_outputs,
                                        const std::vector<RecipeTerm>& recipe);

// 1D chain of qubits: sum_k (omega_k/2) sigma_z^k
//                   + sum_k delta_k (sp^k sm^{k+1} + sm^k sp^{k+1}).
Hamiltonian chain_hamiltonian(int nqubits, const std::vector<double>& omegas,
                              const std::vector<double>& deltas);

// 2x2 Pauli matrices.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace qhi
