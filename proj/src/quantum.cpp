#include "qhi/quantum.hpp"

#include <cmath>
#include <string>

namespace qhi {

namespace {

const Complex kI(0.0, 1.0);

ComplexVector ket(Eigen::Index d, Eigen::Index j) {
    ComplexVector v = ComplexVector::Zero(d);
    v(j) = 1.0;
    return v;
}

DensityMatrix pure_state(const ComplexVector& psi) {
    return DensityMatrix(psi * psi.adjoint());
}

}  // namespace

Hamiltonian::Hamiltonian(ComplexMatrix m, std::optional<double> h1)
    : matrix(std::move(m)), h1_anchor(h1) {
    require_finite(matrix, "Hamiltonian");
    if (matrix.rows() != matrix.cols()) {
        throw ShapeError("Hamiltonian must be square");
    }
    const double scale = std::max(1.0, matrix.norm());
    if ((matrix - matrix.adjoint()).norm() > 1e-10 * scale) {
        throw ShapeError("Hamiltonian must be Hermitian");
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix(std::move(m)) {
    require_finite(matrix, "DensityMatrix");
    if (matrix.rows() != matrix.cols()) {
        throw ShapeError("DensityMatrix must be square");
    }
    if ((matrix - matrix.adjoint()).norm() > 1e-10 * std::max(1.0, matrix.norm())) {
        throw ShapeError("DensityMatrix must be Hermitian");
    }
    if (std::abs(matrix.trace().real() - 1.0) > 1e-10 || std::abs(matrix.trace().imag()) > 1e-10) {
        throw ShapeError("DensityMatrix must have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix);
    if (solver.eigenvalues().minCoeff() < -1e-8) {
        throw ShapeError("DensityMatrix must be positive semidefinite");
    }
}

NaturalBasis natural_basis(Eigen::Index d) {
    if (d < 2) {
        throw ShapeError("natural_basis: dimension must be at least 2");
    }
    NaturalBasis out;
    out.d = d;
    out.elements.reserve(d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            ComplexMatrix e = ComplexMatrix::Zero(d, d);
            e(j, k) = 1.0;
            out.elements.push_back(std::move(e));
        }
    }
    return out;
}

ProbeSet probe_set(Eigen::Index d) {
    if (d < 2) {
        throw ShapeError("probe_set: dimension must be at least 2");
    }
    ProbeSet out;
    out.d = d;
    out.physical_probes.reserve(ProbeSet::probe_count(d));

    for (Eigen::Index j = 0; j < d; ++j) {
        out.physical_probes.push_back(pure_state(ket(d, j)));
    }
    // Pair block base index: d + 3 * rank of (j, k) in lexicographic order.
    std::vector<std::vector<int>> pair_base(d, std::vector<int>(d, -1));
    int next = static_cast<int>(d);
    const double s2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            pair_base[j][k] = next;
            out.physical_probes.push_back(pure_state(s2 * (ket(d, j) + ket(d, k))));
            out.physical_probes.push_back(pure_state(s2 * (ket(d, j) + kI * ket(d, k))));
            out.physical_probes.push_back(pure_state(s2 * (ket(d, k) + kI * ket(d, j))));
            next += 3;
        }
    }

    const Complex half_1pi(0.5, 0.5);
    out.index_map.resize(d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            auto& recipe = out.index_map[j * d + k];
            if (j == k) {
                recipe = {{static_cast<int>(j), Complex(1.0, 0.0)}};
                continue;
            }
            const Eigen::Index lo = std::min(j, k);
            const Eigen::Index hi = std::max(j, k);
            const int base = pair_base[lo][hi];
            // |+> is shared; the second probe plays |-> for |lo><hi| and the
            // third plays |-> for |hi><lo|.
            const int minus = (j < k) ? base + 1 : base + 2;
            recipe = {{base, Complex(1.0, 0.0)},
                      {minus, kI},
                      {static_cast<int>(j), -half_1pi},
                      {static_cast<int>(k), -half_1pi}};
        }
    }
    return out;
}

DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& U, double unitarity_tol) {
    if (U.rows() != U.cols() || U.rows() != rho.dim()) {
        throw ShapeError("evolve: propagator dimension mismatch");
    }
    const auto n = U.rows();
    if ((U.adjoint() * U - ComplexMatrix::Identity(n, n)).norm() > unitarity_tol) {
        throw ShapeError("evolve: propagator is not unitary within tolerance");
    }
    ComplexMatrix m = U * rho.matrix * U.adjoint();
    // Symmetrize away roundoff so the result validates as a state.
    m = 0.5 * (m + m.adjoint());
    return DensityMatrix(std::move(m));
}

ComplexMatrix assemble_output_for_basis(const std::vector<ComplexMatrix>& probe_outputs,
                                        const std::vector<RecipeTerm>& recipe) {
    if (recipe.empty()) {
        throw ShapeError("assemble_output_for_basis: empty recipe");
    }
    for (const auto& term : recipe) {
        if (term.probe_index < 0 ||
            term.probe_index >= static_cast<int>(probe_outputs.size())) {
            throw ShapeError("assemble_output_for_basis: probe index out of range");
        }
    }
    ComplexMatrix out =
        ComplexMatrix::Zero(probe_outputs[recipe[0].probe_index].rows(),
                            probe_outputs[recipe[0].probe_index].cols());
    for (const auto& term : recipe) {
        out += term.coeff * probe_outputs[term.probe_index];
    }
    return out;
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Hamiltonian chain_hamiltonian(int nqubits, const std::vector<double>& omegas,
                              const std::vector<double>& deltas) {
    if (nqubits < 1) {
        throw ShapeError("chain_hamiltonian: need at least one qubit");
    }
    if (static_cast<int>(omegas.size()) != nqubits ||
        static_cast<int>(deltas.size()) != nqubits - 1) {
        throw ShapeError("chain_hamiltonian: parameter count mismatch");
    }
    const Eigen::Index d = Eigen::Index(1) << nqubits;
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix sp = 0.5 * (pauli_x() + kI * pauli_y());
    const ComplexMatrix sm = 0.5 * (pauli_x() - kI * pauli_y());

    auto site_op = [&](const std::vector<std::pair<int, ComplexMatrix>>& ops) {
        ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
        for (int q = 0; q < nqubits; ++q) {
            const ComplexMatrix* factor = &id2;
            for (const auto& [site, op] : ops) {
                if (site == q) factor = &op;
            }
            acc = kron(acc, *factor);
        }
        return acc;
    };

    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (int q = 0; q < nqubits; ++q) {
        h += 0.5 * omegas[q] * site_op({{q, pauli_z()}});
    }
    for (int q = 0; q + 1 < nqubits; ++q) {
        h += deltas[q] * (site_op({{q, sp}, {q + 1, sm}}) + site_op({{q, sm}, {q + 1, sp}}));
    }
    return Hamiltonian(std::move(h));
}

}  // namespace qhi
