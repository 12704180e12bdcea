// Command-line harness for Hamiltonian identification experiments.
//
// Subcommands:
//   identify   one identification run (optionally repeated)
//   sweep-n    error scaling vs the shot budget
//   sweep-t    error scaling vs the evolution time
//   sweep-q    error trend vs qubit count on the tensor-power fixture
//   selftest   quick internal consistency checks
//
// Exit codes: 0 success, 2 configuration error, 3 assumption violation
// (evolution time outside the identifiable window), 4 degenerate data.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qhi/experiment.hpp"

namespace {

using nlohmann::json;
using namespace qhi;

struct CliOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    int workers = 1;
    bool exact = false;
    bool no_projection = false;
    std::string dump_dir;
};

void apply_json_source(const json& j, HamiltonianSource& source) {
    const std::string kind = j.value("kind", "two-qubit-fixture");
    if (kind == "file") {
        source.kind = HamiltonianSourceKind::File;
        source.file_path = j.at("path").get<std::string>();
    } else if (kind == "two-qubit-fixture") {
        source.kind = HamiltonianSourceKind::TwoQubitFixture;
    } else if (kind == "random") {
        source.kind = HamiltonianSourceKind::Random;
        source.random_dim = j.value("dim", 2);
        source.random_seed = j.value("seed", std::uint64_t(0));
        source.spread_cap = j.value("spread_cap", 10.0);
    } else if (kind == "chain") {
        source.kind = HamiltonianSourceKind::Chain;
        source.omegas = j.at("omegas").get<std::vector<double>>();
        source.deltas = j.value("deltas", std::vector<double>{});
        source.nqubits = static_cast<int>(source.omegas.size());
    } else if (kind == "tensor-power") {
        source.kind = HamiltonianSourceKind::TensorPower;
        source.nqubits = j.value("nqubits", 1);
    } else {
        throw ConfigError("unknown hamiltonian kind: " + kind);
    }
}

ExperimentConfig load_config(const CliOptions& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        std::ifstream is(opts.config_path);
        if (!is) throw ConfigError("cannot open config file: " + opts.config_path);
        json j;
        try {
            is >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        try {
            if (j.contains("hamiltonian")) apply_json_source(j["hamiltonian"], cfg.source);
            cfg.t = j.value("t", cfg.t);
            cfg.shots_per_state = j.value("shots_per_state", cfg.shots_per_state);
            cfg.repetitions = j.value("repetitions", cfg.repetitions);
            cfg.root_seed = j.value("seed", cfg.root_seed);
            cfg.assume_hermitian_map = j.value("assume_hermitian_map", false);
            cfg.max_qubits = j.value("max_qubits", cfg.max_qubits);
            cfg.n_grid = j.value("n_grid", cfg.n_grid);
            cfg.t_grid = j.value("t_grid", cfg.t_grid);
            cfg.q_grid = j.value("q_grid", cfg.q_grid);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config field error: ") + e.what());
        }
    }
    if (opts.seed_set) cfg.root_seed = opts.seed;
    cfg.workers = opts.workers;
    cfg.exact = opts.exact;
    cfg.no_projection = opts.no_projection;
    cfg.dump_dir = opts.dump_dir;
    if (!cfg.dump_dir.empty()) {
        std::filesystem::create_directories(cfg.dump_dir);
    }
    std::filesystem::create_directories(opts.out_dir);
    return cfg;
}

int run_identify(const CliOptions& opts) {
    const ExperimentConfig cfg = load_config(opts);
    IdentificationEngine engine(make_hamiltonian(cfg.source), cfg);
    std::vector<IdentificationResult> results;
    results.reserve(cfg.repetitions);
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        results.push_back(engine.run(cfg.shots_per_state, rep));
    }
    const std::string path = opts.out_dir + "/identify.csv";
    write_results_csv(path, results);
    double mean = 0.0;
    for (const auto& r : results) mean += r.mse_anchor_gauge / results.size();
    std::cout << "d=" << engine.dim() << " t=" << engine.evolution_time()
              << " N=" << cfg.shots_per_state << " repetitions=" << results.size()
              << " mean_mse=" << mean << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int run_sweep(const CliOptions& opts, const std::string& which) {
    const ExperimentConfig cfg = load_config(opts);
    SweepResult sweep;
    std::string x_name;
    bool with_slope = true;
    if (which == "n") {
        sweep = sweep_resources(cfg);
        x_name = "N_total";
    } else if (which == "t") {
        sweep = sweep_time(cfg);
        x_name = "t";
    } else {
        sweep = sweep_qubits(cfg);
        x_name = "N_q";
        with_slope = false;
    }
    const std::string path = opts.out_dir + "/sweep_" + which + ".csv";
    write_sweep_csv(path, sweep, x_name, with_slope);
    for (const auto& point : sweep.points) {
        std::cout << x_name << "=" << point.x << " mean_log10_mse=" << point.mean_log10_mse
                  << " std=" << point.std_log10_mse << "\n";
    }
    if (with_slope) {
        std::cout << "slope=" << sweep.fit.slope << " stderr=" << sweep.fit.std_err << "\n";
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int run_selftest(const CliOptions& opts) {
    (void)opts;
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    // Probe recipes reconstruct the natural basis under the identity process.
    {
        bool ok = true;
        for (Eigen::Index d : {2, 3, 4}) {
            const ProbeSet ps = probe_set(d);
            const NaturalBasis nb = natural_basis(d);
            std::vector<ComplexMatrix> outputs;
            for (const auto& probe : ps.physical_probes) outputs.push_back(probe.matrix);
            for (std::size_t i = 0; i < nb.elements.size(); ++i) {
                ok = ok && (assemble_output_for_basis(outputs, ps.index_map[i]) -
                            nb.elements[i])
                                   .norm() < 1e-12;
            }
        }
        check(ok, "probe recipes reconstruct the operator basis");
    }

    // Exact pipeline floor on the two-qubit fixture.
    {
        ExperimentConfig cfg;
        cfg.source.kind = HamiltonianSourceKind::TwoQubitFixture;
        cfg.t = 0.1;
        cfg.exact = true;
        const IdentificationResult res = run_identification(cfg);
        check(res.mse_anchor_gauge < 1e-14, "noiseless identification at the precision floor");
    }

    // Exact LRE inversion on random two-qubit states.
    {
        const MeasurementPlan plan = cube_plan(2, 1);
        const LreSolver solver(plan);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> gauss(0.0, 1.0);
        bool ok = true;
        for (int trial = 0; trial < 5; ++trial) {
            ComplexMatrix A(4, 4);
            for (Eigen::Index i = 0; i < 4; ++i) {
                for (Eigen::Index j = 0; j < 4; ++j) {
                    A(i, j) = Complex(gauss(rng), gauss(rng));
                }
            }
            ComplexMatrix rho = A * A.adjoint();
            rho /= rho.trace().real();
            rho = 0.5 * (rho + rho.adjoint());
            const DensityMatrix state{std::move(rho)};
            ok = ok && (solver.estimate_exact(state).matrix - state.matrix).norm() < 1e-8;
        }
        check(ok, "linear regression inverts exact frequencies");
    }

    // Permutation equals its own inverse composition.
    {
        bool ok = true;
        for (Eigen::Index d : {2, 3, 4}) {
            const PermutationB B = b_permutation(d);
            std::vector<bool> hit(B.perm.size(), false);
            for (auto c : B.perm) {
                if (c < 0 || c >= static_cast<std::int64_t>(B.perm.size()) || hit[c]) {
                    ok = false;
                    break;
                }
                hit[c] = true;
            }
            check(ok, "basis-change permutation is a bijection (d=" + std::to_string(d) + ")");
        }
    }

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Hamiltonian identification via two-step optimization"};
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--config", opts.config_path, "JSON configuration file");
    auto* seed_opt = app.add_option("--seed", opts.seed, "Root seed (overrides config)");
    app.add_option("--out", opts.out_dir, "Output directory for CSV results");
    app.add_option("--workers", opts.workers, "Worker threads for repetitions/sweep points");
    app.add_flag("--exact", opts.exact, "Noiseless mode: exact output states, no sampling");
    app.add_flag("--no-projection", opts.no_projection,
                 "Feed raw linear estimates to the optimization stage");
    app.add_option("--dump-intermediates", opts.dump_dir,
                   "Directory for counts/Lambda/D intermediate dumps");

    auto* identify = app.add_subcommand("identify", "Run one identification experiment");
    auto* sweep_n = app.add_subcommand("sweep-n", "Sweep the per-state shot budget");
    auto* sweep_t = app.add_subcommand("sweep-t", "Sweep the evolution time");
    auto* sweep_q = app.add_subcommand("sweep-q", "Sweep the qubit count");
    auto* selftest = app.add_subcommand("selftest", "Run internal consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    opts.seed_set = seed_opt->count() > 0;

    try {
        if (identify->parsed()) return run_identify(opts);
        if (sweep_n->parsed()) return run_sweep(opts, "n");
        if (sweep_t->parsed()) return run_sweep(opts, "t");
        if (sweep_q->parsed()) return run_sweep(opts, "q");
        if (selftest->parsed()) return run_selftest(opts);
    } catch (const AssumptionViolation& e) {
        std::cerr << "assumption violation: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateData& e) {
        std::cerr << "degenerate data: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
