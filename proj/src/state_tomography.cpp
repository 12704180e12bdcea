#include "qhi/state_tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace qhi {

namespace {

bool is_power_of_two(Eigen::Index d) {
    return d >= 1 && (d & (d - 1)) == 0;
}

std::vector<ComplexMatrix> pauli_string_basis(int nqubits) {
    const std::array<ComplexMatrix, 4> singles = {ComplexMatrix::Identity(2, 2), pauli_x(),
                                                  pauli_y(), pauli_z()};
    const Eigen::Index d = Eigen::Index(1) << nqubits;
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<ComplexMatrix> out;
    out.reserve(d * d - 1);
    const long long total = 1LL << (2 * nqubits);  // 4^n strings
    for (long long code = 1; code < total; ++code) {
        ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
        long long rem = code;
        for (int q = 0; q < nqubits; ++q) {
            acc = kron(acc, singles[rem % 4]);
            rem /= 4;
        }
        out.push_back(norm * acc);
    }
    return out;
}

std::vector<ComplexMatrix> gell_mann_basis(Eigen::Index d) {
    std::vector<ComplexMatrix> out;
    out.reserve(d * d - 1);
    const double s2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = j + 1; k < d; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(d, d);
            sym(j, k) = s2;
            sym(k, j) = s2;
            out.push_back(sym);
            ComplexMatrix asym = ComplexMatrix::Zero(d, d);
            asym(j, k) = Complex(0, -s2);
            asym(k, j) = Complex(0, s2);
            out.push_back(asym);
        }
    }
    for (Eigen::Index l = 1; l < d; ++l) {
        ComplexMatrix diag = ComplexMatrix::Zero(d, d);
        const double scale = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (Eigen::Index m = 0; m < l; ++m) {
            diag(m, m) = scale;
        }
        diag(l, l) = -scale * static_cast<double>(l);
        out.push_back(diag);
    }
    return out;
}

}  // namespace

std::vector<ComplexMatrix> traceless_hermitian_basis(Eigen::Index d) {
    if (d < 2) {
        throw ShapeError("traceless_hermitian_basis: dimension must be at least 2");
    }
    if (is_power_of_two(d)) {
        int n = 0;
        for (Eigen::Index v = d; v > 1; v >>= 1) ++n;
        return pauli_string_basis(n);
    }
    return gell_mann_basis(d);
}

MeasurementPlan cube_plan(int nqubits, long long shots_per_setting) {
    if (nqubits < 1) {
        throw ConfigError("cube_plan: need at least one qubit");
    }
    if (shots_per_setting < 1) {
        throw ConfigError("cube_plan: shots_per_setting must be positive");
    }
    const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    const std::array<ComplexMatrix, 3> axes = {pauli_x(), pauli_y(), pauli_z()};

    MeasurementPlan plan;
    plan.nqubits = nqubits;
    plan.shots_per_setting = shots_per_setting;

    long long num_settings = 1;
    for (int q = 0; q < nqubits; ++q) num_settings *= 3;
    plan.settings.reserve(num_settings);

    for (long long s = 0; s < num_settings; ++s) {
        // Base-3 digits of s pick the axis per qubit; leftmost qubit is the
        // most significant digit.
        std::vector<int> axis(nqubits);
        long long rem = s;
        for (int q = nqubits - 1; q >= 0; --q) {
            axis[q] = static_cast<int>(rem % 3);
            rem /= 3;
        }
        const Eigen::Index outcomes = Eigen::Index(1) << nqubits;
        std::vector<ComplexMatrix> projectors;
        projectors.reserve(outcomes);
        for (Eigen::Index o = 0; o < outcomes; ++o) {
            ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
            for (int q = 0; q < nqubits; ++q) {
                const double sign = ((o >> (nqubits - 1 - q)) & 1) ? -1.0 : 1.0;
                acc = kron(acc, 0.5 * (id2 + sign * axes[axis[q]]));
            }
            projectors.push_back(std::move(acc));
        }
        plan.settings.push_back(std::move(projectors));
    }
    return plan;
}

std::vector<long long> allocate_shots(long long total, int num_settings) {
    if (num_settings < 1 || total < num_settings) {
        throw ConfigError("allocate_shots: budget smaller than the number of settings");
    }
    std::vector<long long> out(num_settings, total / num_settings);
    const long long rem = total % num_settings;
    for (long long i = 0; i < rem; ++i) out[i] += 1;
    return out;
}

RealVector born_probabilities(const DensityMatrix& rho,
                              const std::vector<ComplexMatrix>& setting) {
    RealVector probs(setting.size());
    for (std::size_t i = 0; i < setting.size(); ++i) {
        const Complex tr = (rho.matrix * setting[i]).trace();
        double p = tr.real();
        if (p < -1e-12 || p > 1.0 + 1e-12) {
            throw ShapeError("born_probabilities: probability outside [0,1]");
        }
        probs(static_cast<Eigen::Index>(i)) = std::clamp(p, 0.0, 1.0);
    }
    if (std::abs(probs.sum() - 1.0) > 1e-10) {
        throw ShapeError("born_probabilities: probabilities do not sum to 1");
    }
    return probs;
}

std::vector<long long> sample_counts(const RealVector& probs, long long shots,
                                     std::mt19937_64& rng) {
    const auto k = probs.size();
    if ((probs.array() < 0.0).any()) {
        throw ShapeError("sample_counts: negative probability");
    }
    std::vector<long long> counts(k, 0);
    long long remaining = shots;
    double mass = probs.sum();
    for (Eigen::Index i = 0; i + 1 < k && remaining > 0; ++i) {
        const double p = mass > 0.0 ? std::clamp(probs(i) / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long long> binom(remaining, p);
        counts[i] = binom(rng);
        remaining -= counts[i];
        mass -= probs(i);
    }
    if (k > 0) counts[k - 1] = remaining;
    return counts;
}

std::vector<long long> sample_counts(const RealVector& probs, long long shots,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_counts(probs, shots, rng);
}

ShotCounts measure_state(const DensityMatrix& rho, const MeasurementPlan& plan,
                         long long total_shots, std::mt19937_64& rng) {
    const auto alloc = allocate_shots(total_shots, plan.num_settings());
    ShotCounts out;
    out.total_shots = total_shots;
    out.counts.reserve(plan.settings.size());
    for (std::size_t s = 0; s < plan.settings.size(); ++s) {
        const RealVector probs = born_probabilities(rho, plan.settings[s]);
        out.counts.push_back(sample_counts(probs, alloc[s], rng));
    }
    return out;
}

LreSolver::LreSolver(const MeasurementPlan& plan) : plan_(&plan), d_(plan.dim()) {
    basis_ = traceless_hermitian_basis(d_);
    const Eigen::Index params = d_ * d_ - 1;
    const Eigen::Index outcomes = static_cast<Eigen::Index>(plan.settings.at(0).size());
    const Eigen::Index rows = static_cast<Eigen::Index>(plan.settings.size()) * outcomes;

    Eigen::MatrixXd design(rows, params);
    offset_.resize(rows);
    Eigen::Index r = 0;
    for (const auto& setting : plan.settings) {
        for (const auto& proj : setting) {
            offset_(r) = proj.trace().real() / static_cast<double>(d_);
            for (Eigen::Index a = 0; a < params; ++a) {
                design(r, a) = (proj * basis_[a]).trace().real();
            }
            ++r;
        }
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    if (cod.rank() < params) {
        throw ConfigError("LreSolver: measurement plan is not informationally complete");
    }
    pseudo_inverse_ = cod.pseudoInverse();
}

LinearEstimate LreSolver::from_frequencies(const RealVector& freqs) const {
    const RealVector theta = pseudo_inverse_ * (freqs - offset_);
    ComplexMatrix rho = ComplexMatrix::Identity(d_, d_) / static_cast<double>(d_);
    for (Eigen::Index a = 0; a < theta.size(); ++a) {
        rho += theta(a) * basis_[a];
    }
    return LinearEstimate{std::move(rho)};
}

LinearEstimate LreSolver::estimate(const ShotCounts& counts) const {
    const Eigen::Index outcomes = static_cast<Eigen::Index>(plan_->settings.at(0).size());
    RealVector freqs(static_cast<Eigen::Index>(counts.counts.size()) * outcomes);
    Eigen::Index r = 0;
    for (const auto& setting_counts : counts.counts) {
        long long shots = 0;
        for (long long c : setting_counts) shots += c;
        if (shots <= 0) {
            throw ShapeError("LreSolver: empty setting counts");
        }
        for (long long c : setting_counts) {
            freqs(r++) = static_cast<double>(c) / static_cast<double>(shots);
        }
    }
    return from_frequencies(freqs);
}

LinearEstimate LreSolver::estimate_exact(const DensityMatrix& rho) const {
    const Eigen::Index outcomes = static_cast<Eigen::Index>(plan_->settings.at(0).size());
    RealVector freqs(static_cast<Eigen::Index>(plan_->settings.size()) * outcomes);
    Eigen::Index r = 0;
    for (const auto& setting : plan_->settings) {
        freqs.segment(r, outcomes) = born_probabilities(rho, setting);
        r += outcomes;
    }
    return from_frequencies(freqs);
}

LinearEstimate lre_estimate(const ShotCounts& counts, const MeasurementPlan& plan) {
    return LreSolver(plan).estimate(counts);
}

DensityMatrix project_to_physical(const LinearEstimate& est) {
    HermitianEig eig = eig_hermitian(est.matrix);
    // Euclidean projection of the (descending) eigenvalues onto the simplex.
    const auto n = eig.values.size();
    double running = 0.0;
    double threshold = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        running += eig.values(j);
        const double candidate = (running - 1.0) / static_cast<double>(j + 1);
        if (eig.values(j) - candidate > 0.0) {
            threshold = candidate;
        }
    }
    RealVector projected = (eig.values.array() - threshold).max(0.0);
    ComplexMatrix rho =
        eig.vectors * projected.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    // Renormalize away the last ulps of trace error.
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

}  // namespace qhi
