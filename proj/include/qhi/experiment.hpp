#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qhi/io.hpp"
#include "qhi/tso.hpp"

namespace qhi {

enum class HamiltonianSourceKind { File, TwoQubitFixture, Random, Chain, TensorPower };

struct HamiltonianSource {
    HamiltonianSourceKind kind = HamiltonianSourceKind::TwoQubitFixture;
    std::string file_path;
    // Random draw (GUE-style, rescaled to the spread cap).
    std::uint64_t random_seed = 0;
    Eigen::Index random_dim = 2;
    double spread_cap = 10.0;
    // Chain parameters.
    std::vector<double> omegas;
    std::vector<double> deltas;
    // Tensor-power fixture.
    int nqubits = 1;
};

struct ExperimentConfig {
    HamiltonianSource source;
    double t = 0.1;
    long long shots_per_state = 729000;  // N, per output state
    int repetitions = 10;
    std::uint64_t root_seed = 0;
    int workers = 1;
    bool exact = false;
    bool no_projection = false;
    bool assume_hermitian_map = false;
    std::string dump_dir;  // empty disables intermediate dumps
    int max_qubits = 5;

    std::vector<long long> n_grid;
    std::vector<double> t_grid;
    std::vector<int> q_grid;
};

struct IdentificationResult {
    Eigen::Index d = 0;
    double t = 0.0;
    long long N = 0;
    std::uint64_t seed = 0;
    double mse_anchor_gauge = 0.0;
    double mse_shift_min = 0.0;
    double alpha1 = 0.0;
    double rank_one_residual = 0.0;
    double wall_time_ms = 0.0;
    double tomography_ms = 0.0;
    double tso_ms = 0.0;
    bool degenerate_top = false;
};

struct SlopeFit {
    double slope = 0.0;
    double std_err = 0.0;
};

struct SweepPoint {
    double x = 0.0;
    double mean_log10_mse = 0.0;
    double std_log10_mse = 0.0;
    std::vector<IdentificationResult> repetitions;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    SlopeFit fit;
};

// Deterministic 64-bit seed derivation: root -> (repetition, probe, setting)
// via a splitmix64 chain.
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0);

// Fixtures.
Hamiltonian two_qubit_fixture();
Hamiltonian tensor_power_fixture(int nqubits);
Hamiltonian random_hamiltonian(Eigen::Index d, std::uint64_t seed, double spread_cap);
Hamiltonian make_hamiltonian(const HamiltonianSource& source);

// Caches everything that depends only on (H, t): propagator, probes, plan,
// regression pseudo-inverse, permutation. run() is const and thread safe;
// distinct repetitions derive disjoint seed lineages from the root seed.
class IdentificationEngine {
public:
    IdentificationEngine(Hamiltonian H, const ExperimentConfig& cfg);
    IdentificationEngine(Hamiltonian H, const ExperimentConfig& cfg, double t_override);

    IdentificationResult run(long long shots_per_state, int repetition) const;

    Eigen::Index dim() const { return H_.dim(); }
    double evolution_time() const { return t_; }
    double h1() const { return h1_; }

private:
    Hamiltonian H_;
    double t_;
    double h1_;
    bool exact_;
    bool no_projection_;
    bool assume_hermitian_map_;
    std::uint64_t root_seed_;
    std::string dump_dir_;
    ComplexMatrix propagator_;
    NaturalBasis basis_;
    ProbeSet probes_;
    std::vector<bool> probe_used_;
    std::vector<DensityMatrix> exact_outputs_;
    MeasurementPlan plan_;
    std::unique_ptr<LreSolver> solver_;
    PermutationB bperm_;
};

IdentificationResult run_identification(const ExperimentConfig& cfg);

SweepResult sweep_resources(const ExperimentConfig& cfg);
SweepResult sweep_time(const ExperimentConfig& cfg);
SweepResult sweep_qubits(const ExperimentConfig& cfg);  // no slope asserted

// OLS on (log10 x, log10 y); stderr from the residual variance.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

void write_results_csv(const std::string& path,
                       const std::vector<IdentificationResult>& results);
void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::string& x_name, bool with_slope = true);

}  // namespace qhi
