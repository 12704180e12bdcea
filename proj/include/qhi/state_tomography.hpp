#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qhi/quantum.hpp"

namespace qhi {

// Cube-basis projective measurement plan: 3^nqubits settings, each a list of
// 2^nqubits rank-one projectors (tensor products of single-qubit +-x, +-y,
// +-z eigenprojectors).
struct MeasurementPlan {
    int nqubits = 0;
    std::vector<std::vector<ComplexMatrix>> settings;
    long long shots_per_setting = 0;

    Eigen::Index dim() const { return Eigen::Index(1) << nqubits; }
    int num_settings() const { return static_cast<int>(settings.size()); }
};

struct ShotCounts {
    std::vector<std::vector<long long>> counts;  // per setting, per outcome
    long long total_shots = 0;
};

// Raw linear-regression reconstruction: Hermitian, unit trace, possibly
// non-positive.
struct LinearEstimate {
    ComplexMatrix matrix;
};

MeasurementPlan cube_plan(int nqubits, long long shots_per_setting);

// Split a per-state budget N equally across n settings; the remainder goes
// to the first settings.
std::vector<long long> allocate_shots(long long total, int num_settings);

RealVector born_probabilities(const DensityMatrix& rho,
                              const std::vector<ComplexMatrix>& setting);

// Multinomial draw via a chain of binomials, O(outcomes) independent of the
// shot count. Deterministic given the generator state.
std::vector<long long> sample_counts(const RealVector& probs, long long shots,
                                     std::mt19937_64& rng);
std::vector<long long> sample_counts(const RealVector& probs, long long shots,
                                     std::uint64_t seed);

// One full cube measurement of a state: per-setting shot allocation of
// `total_shots`, one multinomial per setting.
ShotCounts measure_state(const DensityMatrix& rho, const MeasurementPlan& plan,
                         long long total_shots, std::mt19937_64& rng);

// Least-squares state reconstruction over a traceless orthonormal Hermitian
// operator basis. The design pseudo-inverse depends only on the plan and is
// computed once at construction.
class LreSolver {
public:
    explicit LreSolver(const MeasurementPlan& plan);

    LinearEstimate estimate(const ShotCounts& counts) const;
    // Exact-probability path (the infinite-shot limit).
    LinearEstimate estimate_exact(const DensityMatrix& rho) const;

    const std::vector<ComplexMatrix>& basis() const { return basis_; }

private:
    LinearEstimate from_frequencies(const RealVector& freqs) const;

    const MeasurementPlan* plan_;
    Eigen::Index d_;
    std::vector<ComplexMatrix> basis_;  // traceless orthonormal Hermitian
    Eigen::MatrixXd pseudo_inverse_;    // (d^2-1) x (#settings * #outcomes)
    RealVector offset_;                 // Tr(M_i)/d per flattened outcome
};

// Convenience wrapper; builds the solver on each call.
LinearEstimate lre_estimate(const ShotCounts& counts, const MeasurementPlan& plan);

// Euclidean projection of the eigenvalue vector onto the probability simplex.
DensityMatrix project_to_physical(const LinearEstimate& est);

// Traceless orthonormal Hermitian bases: normalized Pauli strings for
// d = 2^n, generalized Gell-Mann matrices otherwise.
std::vector<ComplexMatrix> traceless_hermitian_basis(Eigen::Index d);

}  // namespace qhi
