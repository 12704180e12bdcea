#include "doctest.h"

#include <cmath>
#include <utility>

#include "oracles.hpp"
#include "qhi/experiment.hpp"

using namespace qhi;
using namespace qhi::testing;

TEST_CASE("mix_seed is deterministic and lineage-sensitive") {
    CHECK(mix_seed(1, 2, 3, 4) == mix_seed(1, 2, 3, 4));
    CHECK(mix_seed(1, 2, 3, 4) != mix_seed(1, 2, 3, 5));
    CHECK(mix_seed(1, 2, 3, 4) != mix_seed(2, 2, 3, 4));
    CHECK(mix_seed(0) != mix_seed(1));
}

TEST_CASE("fixtures") {
    const Hamiltonian h2q = two_qubit_fixture();
    CHECK(h2q.dim() == 4);
    CHECK((h2q.matrix - h2q.matrix.adjoint()).norm() < 1e-12);
    const HermitianEig eig = eig_hermitian(h2q.matrix);
    const double spread = eig.values(0) - eig.values(3);
    CHECK(spread == doctest::Approx(11.95).epsilon(0.01));

    const Hamiltonian tp1 = tensor_power_fixture(1);
    ComplexMatrix h0(2, 2);
    h0 << 1.0, Complex(0.9, 0.9), Complex(0.9, -0.9), 2.0;
    CHECK((tp1.matrix - h0).norm() < 1e-15);
    const Hamiltonian tp2 = tensor_power_fixture(2);
    CHECK((tp2.matrix - kron(h0, h0)).norm() < 1e-14);

    const Hamiltonian tp5 = tensor_power_fixture(5);
    const HermitianEig eig5 = eig_hermitian(tp5.matrix);
    CHECK(eig5.values(0) - eig5.values(31) == doctest::Approx(193.87).epsilon(0.01));

    const Hamiltonian rnd = random_hamiltonian(4, 99, 10.0);
    const HermitianEig eig_r = eig_hermitian(rnd.matrix);
    CHECK(eig_r.values(0) - eig_r.values(3) == doctest::Approx(10.0).epsilon(1e-10));
    CHECK((random_hamiltonian(4, 99, 10.0).matrix - rnd.matrix).norm() == 0.0);
    CHECK((random_hamiltonian(4, 100, 10.0).matrix - rnd.matrix).norm() > 1e-3);
}

TEST_CASE("exact identification hits the machine-precision floor") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t = 0.1;
    cfg.exact = true;
    const IdentificationResult res = run_identification(cfg);
    CHECK(res.d == 4);
    CHECK(res.mse_anchor_gauge < 1e-16);
    CHECK(res.alpha1 == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("exact identification at d=2 and d=8") {
    for (auto [dim, seed] : {std::pair<Eigen::Index, std::uint64_t>{2, 11},
                             std::pair<Eigen::Index, std::uint64_t>{8, 12}}) {
        ExperimentConfig cfg;
        cfg.source.kind = HamiltonianSourceKind::Random;
        cfg.source.random_dim = dim;
        cfg.source.random_seed = seed;
        cfg.source.spread_cap = 8.0;
        cfg.t = 0.5 * M_PI / 8.0;
        cfg.exact = true;
        const IdentificationResult res = run_identification(cfg);
        CHECK(res.mse_anchor_gauge < 1e-16);
    }
}

TEST_CASE("noisy identification shrinks with the shot budget") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t = 0.1;
    cfg.root_seed = 7;
    IdentificationEngine engine(make_hamiltonian(cfg.source), cfg);
    const IdentificationResult coarse = engine.run(2000, 0);
    const IdentificationResult fine = engine.run(2000000, 0);
    CHECK(fine.mse_anchor_gauge < coarse.mse_anchor_gauge);
    CHECK(fine.mse_anchor_gauge < 0.05);
}

TEST_CASE("identification is deterministic in the root seed") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t = 0.1;
    cfg.root_seed = 123;
    cfg.shots_per_state = 9000;
    const IdentificationResult a = run_identification(cfg);
    const IdentificationResult b = run_identification(cfg);
    CHECK(a.mse_anchor_gauge == b.mse_anchor_gauge);
    CHECK(a.seed == b.seed);

    cfg.root_seed = 124;
    const IdentificationResult c = run_identification(cfg);
    CHECK(a.mse_anchor_gauge != c.mse_anchor_gauge);
}

TEST_CASE("dagger shortcut stays close to the full probe set") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t = 0.1;
    cfg.root_seed = 31;
    cfg.assume_hermitian_map = true;
    cfg.exact = true;
    const IdentificationResult res = run_identification(cfg);
    CHECK(res.mse_anchor_gauge < 1e-16);
}

TEST_CASE("invalid evolution time is rejected before any sampling") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t = 1.0;  // spread 11.95 -> bound ~0.263
    CHECK_THROWS_AS(run_identification(cfg), AssumptionViolation);
}

TEST_CASE("non-power-of-two dimensions only run in exact mode") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::Random;
    cfg.source.random_dim = 3;
    cfg.source.random_seed = 5;
    cfg.source.spread_cap = 5.0;
    cfg.t = 0.2;
    CHECK_THROWS_AS(run_identification(cfg), ConfigError);
    cfg.exact = true;
    CHECK(run_identification(cfg).mse_anchor_gauge < 1e-16);
}

TEST_CASE("sweep_resources validates its grid") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t = 0.1;
    cfg.n_grid = {1000};
    CHECK_THROWS_AS(sweep_resources(cfg), ConfigError);
    cfg.n_grid = {1000, 2000, 4000, 8000};  // under two decades
    CHECK_THROWS_AS(sweep_resources(cfg), ConfigError);
}

TEST_CASE("sweep_resources slope on the one-qubit fixture") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::Chain;
    cfg.source.nqubits = 1;
    cfg.source.omegas = {2.0};
    cfg.t = 0.8;
    cfg.root_seed = 41;
    cfg.repetitions = 10;
    cfg.workers = 4;
    cfg.n_grid = {1000, 10000, 100000, 1000000};
    const SweepResult sweep = sweep_resources(cfg);
    REQUIRE(sweep.points.size() == 4);
    // x-axis carries the total resource count (5 probes per shot budget).
    CHECK(sweep.points[0].x == doctest::Approx(5000.0));
    CHECK(sweep.fit.slope > -1.15);
    CHECK(sweep.fit.slope < -0.85);
}

TEST_CASE("sweep_time validates every grid point up front") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
    cfg.t_grid = {0.05, 0.1, 0.5};  // 0.5 > pi/11.95
    CHECK_THROWS_AS(sweep_time(cfg), AssumptionViolation);
    cfg.t_grid = {0.05, 0.1};
    CHECK_THROWS_AS(sweep_time(cfg), ConfigError);
}

TEST_CASE("sweep_time slope on the one-qubit fixture") {
    ExperimentConfig cfg;
    cfg.source.kind = HamiltonianSourceKind::Chain;
    cfg.source.nqubits = 1;
    cfg.source.omegas = {2.0};
    cfg.shots_per_state = 200000;
    cfg.root_seed = 43;
    cfg.repetitions = 10;
    cfg.workers = 4;
    cfg.t_grid = {0.02, 0.04, 0.08, 0.16};
    const SweepResult sweep = sweep_time(cfg);
    CHECK(sweep.fit.slope > -2.3);
    CHECK(sweep.fit.slope < -1.7);
}

TEST_CASE("sweep_qubits guards the qubit budget and reports the trend") {
    ExperimentConfig cfg;
    cfg.q_grid = {6};
    CHECK_THROWS_AS(sweep_qubits(cfg), ConfigError);

    cfg.q_grid = {1, 2};
    cfg.t = 0.01;
    cfg.exact = true;
    cfg.repetitions = 1;
    const SweepResult sweep = sweep_qubits(cfg);
    REQUIRE(sweep.points.size() == 2);
    for (const auto& point : sweep.points) {
        CHECK(point.repetitions[0].mse_anchor_gauge < 1e-14);
    }
}

TEST_CASE("fit_loglog_slope") {
    CHECK(fit_loglog_slope({{1.0, 1.0}, {10.0, 10.0}, {100.0, 100.0}}).slope ==
          doctest::Approx(1.0));
    CHECK(fit_loglog_slope({{1.0, 7.0}, {10.0, 0.07}, {100.0, 7e-4}, {1000.0, 7e-6}}).slope ==
          doctest::Approx(-2.0));

    // Noisy slope -1 synthetic data.
    std::mt19937_64 rng(47);
    std::normal_distribution<double> gauss(0.0, 0.05);
    std::vector<std::pair<double, double>> pts;
    for (double x : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        pts.emplace_back(x, 3.0 / x * std::exp(gauss(rng)));
    }
    const SlopeFit fit = fit_loglog_slope(pts);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.1));
    CHECK(fit.std_err < 0.1);

    CHECK_THROWS_AS(fit_loglog_slope({{1.0, 1.0}, {2.0, 2.0}}), ConfigError);
    CHECK_THROWS_AS(fit_loglog_slope({{1.0, 1.0}, {2.0, -2.0}, {3.0, 3.0}}), ConfigError);
}
