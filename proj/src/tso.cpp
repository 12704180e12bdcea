#include "qhi/tso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qhi {

RankOneFit solve_rank_one(const DMatrix& D_hat) {
    const ComplexMatrix& D = D_hat.matrix;
    if (D.rows() != D.cols()) {
        throw ShapeError("solve_rank_one: D must be square");
    }
    const ComplexMatrix sym = D + D.adjoint();
    HermitianEig eig = eig_hermitian(0.5 * (sym + sym.adjoint()));

    RankOneFit fit;
    fit.alpha1 = eig.values(0);
    if (fit.alpha1 <= 0.0) {
        throw DegenerateData("solve_rank_one: top eigenvalue of D + D^dag is not positive");
    }
    if (eig.values.size() > 1) {
        const double gap = fit.alpha1 - eig.values(1);
        fit.degenerate_top = gap <= 1e-8 * std::max(1.0, std::abs(fit.alpha1));
    }
    const ComplexVector s_vec = std::sqrt(fit.alpha1 / 2.0) * eig.vectors.col(0);
    fit.S_hat = unvec(s_vec);
    fit.residual = (s_vec * s_vec.adjoint() - D).norm();
    return fit;
}

UnitaryFit solve_unitary(const RankOneFit& fit) {
    UnitaryFit out;
    out.G_hat = polar_unitary_factor(fit.S_hat);
    Eigen::JacobiSVD<ComplexMatrix> svd(fit.S_hat);
    const auto& sv = svd.singularValues();
    out.singular_warning = sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0));
    return out;
}

ComplexMatrix kraus_from_g(const UnitaryFit& fit) {
    return fit.G_hat.transpose();
}

HamiltonianEstimate hamiltonian_from_unitary(const ComplexMatrix& A_hat, double t, double h1) {
    if (t <= 0.0) {
        throw AssumptionViolation("hamiltonian_from_unitary: evolution time must be positive");
    }
    UnitaryEig eig = eig_unitary(A_hat, 1e-6);
    const auto n = eig.values.size();

    std::vector<double> phases(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double theta = std::arg(eig.values(j));
        if (theta < 0.0) theta += 2.0 * M_PI;
        phases[j] = theta;
    }
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return phases[a] < phases[b]; });

    std::vector<double> sorted(n);
    ComplexMatrix Q(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        sorted[j] = phases[order[j]];
        Q.col(j) = eig.vectors.col(order[j]);
    }

    // Branch-cut repair: fold the top phase block down by 2pi.
    if (sorted[n - 1] - sorted[0] >= M_PI) {
        Eigen::Index k = 0;
        while (k < n && sorted[k] - sorted[0] < M_PI) ++k;
        for (Eigen::Index j = k; j < n; ++j) sorted[j] -= 2.0 * M_PI;
    }
    const auto [min_it, max_it] = std::minmax_element(sorted.begin(), sorted.end());
    if (*max_it - *min_it >= M_PI) {
        throw AssumptionViolation(
            "hamiltonian_from_unitary: phase spread >= pi after branch repair; "
            "evolution time too large for the observed spectrum");
    }

    const double theta0 = *max_it;
    ComplexVector diag(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        diag(j) = -(sorted[j] - h1 * t - theta0) / t;
    }
    ComplexMatrix H = Q * diag.asDiagonal() * Q.adjoint();
    H = 0.5 * (H + H.adjoint());

    HamiltonianEstimate out;
    out.H_hat = std::move(H);
    out.h1_anchor = h1;
    return out;
}

TimeCheck check_evolution_time(const Hamiltonian& H, double t, std::optional<double> h_m) {
    HermitianEig eig = eig_hermitian(H.matrix);
    TimeCheck out;
    out.spread = eig.values(0) - eig.values(eig.values.size() - 1);
    out.bound = out.spread > 0.0 ? M_PI / out.spread : std::numeric_limits<double>::infinity();
    out.margin = out.bound - t;
    out.ok = t > 0.0 && t < out.bound;
    if (h_m) {
        out.sufficient_ok = t > 0.0 && t < M_PI / (2.0 * *h_m);
    }
    return out;
}

ErrorReport gauge_aligned_error(const HamiltonianEstimate& H_hat, const Hamiltonian& H_true) {
    if (H_hat.H_hat.rows() != H_true.dim()) {
        throw ShapeError("gauge_aligned_error: dimension mismatch");
    }
    const ComplexMatrix diff = H_hat.H_hat - H_true.matrix;
    ErrorReport out;
    out.sq_error = diff.squaredNorm();
    const double d = static_cast<double>(H_true.dim());
    out.shift_min_sq_error = out.sq_error - std::norm(diff.trace()) / d;
    return out;
}

}  // namespace qhi
