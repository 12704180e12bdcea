#include "qhi/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <thread>

namespace qhi {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int qubits_for_dim(Eigen::Index d) {
    int n = 0;
    Eigen::Index v = d;
    while (v > 1 && (v & 1) == 0) {
        v >>= 1;
        ++n;
    }
    if (v != 1) {
        throw ConfigError("measurement simulation requires a power-of-two dimension, got " +
                          std::to_string(d));
    }
    return n;
}

// Run fn(0..ntasks-1) across a small worker pool; first exception wins.
void parallel_for(int workers, int ntasks, const std::function<void(int)>& fn) {
    if (workers <= 1 || ntasks <= 1) {
        for (int i = 0; i < ntasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= ntasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(ntasks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min(workers, ntasks);
    pool.reserve(count);
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double point_mse(const SweepPoint& point) {
    double sum = 0.0;
    for (const auto& rep : point.repetitions) sum += rep.mse_anchor_gauge;
    return sum / static_cast<double>(point.repetitions.size());
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t z = splitmix(root);
    z = splitmix(z ^ a);
    z = splitmix(z ^ b);
    z = splitmix(z ^ c);
    return z;
}

Hamiltonian two_qubit_fixture() {
    const Complex i(0.0, 1.0);
    ComplexMatrix h(4, 4);
    h << 5.0, 0.1, 3.0 * i, 4.0 * i,
         0.1, -1.0, 1.8, 0.9,
         -3.0 * i, 1.8, 2.0, 0.7 * i,
         -4.0 * i, 0.9, -0.7 * i, 3.0;
    return Hamiltonian(std::move(h));
}

Hamiltonian tensor_power_fixture(int nqubits) {
    if (nqubits < 1) {
        throw ConfigError("tensor_power_fixture: need at least one qubit");
    }
    ComplexMatrix h0(2, 2);
    h0 << 1.0, Complex(0.9, 0.9), Complex(0.9, -0.9), 2.0;
    ComplexMatrix h = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < nqubits; ++q) h = kron(h, h0);
    return Hamiltonian(std::move(h));
}

Hamiltonian random_hamiltonian(Eigen::Index d, std::uint64_t seed, double spread_cap) {
    if (d < 2) throw ConfigError("random_hamiltonian: dimension must be at least 2");
    if (spread_cap <= 0.0) throw ConfigError("random_hamiltonian: spread cap must be positive");
    std::mt19937_64 rng(mix_seed(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix A(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            A(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    ComplexMatrix h = 0.5 * (A + A.adjoint());
    HermitianEig eig = eig_hermitian(h);
    const double spread = eig.values(0) - eig.values(eig.values.size() - 1);
    if (spread > 0.0) {
        h *= spread_cap / spread;
    }
    return Hamiltonian(std::move(h));
}

Hamiltonian make_hamiltonian(const HamiltonianSource& source) {
    switch (source.kind) {
        case HamiltonianSourceKind::File:
            return read_hamiltonian_file(source.file_path);
        case HamiltonianSourceKind::TwoQubitFixture:
            return two_qubit_fixture();
        case HamiltonianSourceKind::Random:
            return random_hamiltonian(source.random_dim, source.random_seed, source.spread_cap);
        case HamiltonianSourceKind::Chain:
            return chain_hamiltonian(source.nqubits, source.omegas, source.deltas);
        case HamiltonianSourceKind::TensorPower:
            return tensor_power_fixture(source.nqubits);
    }
    throw ConfigError("make_hamiltonian: unknown source kind");
}

IdentificationEngine::IdentificationEngine(Hamiltonian H, const ExperimentConfig& cfg)
    : IdentificationEngine(std::move(H), cfg, cfg.t) {}

IdentificationEngine::IdentificationEngine(Hamiltonian H, const ExperimentConfig& cfg,
                                           double t_override)
    : H_(std::move(H)),
      t_(t_override),
      exact_(cfg.exact),
      no_projection_(cfg.no_projection),
      assume_hermitian_map_(cfg.assume_hermitian_map),
      root_seed_(cfg.root_seed),
      dump_dir_(cfg.dump_dir),
      basis_(natural_basis(H_.dim())),
      probes_(probe_set(H_.dim())),
      bperm_(b_permutation(H_.dim())) {
    const TimeCheck check = check_evolution_time(H_, t_);
    if (!check.ok) {
        throw AssumptionViolation("evolution time " + std::to_string(t_) +
                                  " outside the identifiable window (bound " +
                                  std::to_string(check.bound) + ")");
    }
    HermitianEig eig = eig_hermitian(H_.matrix);
    h1_ = H_.h1_anchor.value_or(eig.values(eig.values.size() - 1));

    propagator_ = expm_neg_i_Ht(H_.matrix, t_);
    exact_outputs_.reserve(probes_.physical_probes.size());
    for (const auto& probe : probes_.physical_probes) {
        exact_outputs_.push_back(evolve(probe, propagator_));
    }

    probe_used_.assign(probes_.physical_probes.size(), true);
    if (assume_hermitian_map_) {
        // The third probe of each pair only feeds lower-triangle recipes,
        // which the dagger shortcut replaces.
        const Eigen::Index d = H_.dim();
        Eigen::Index idx = d;
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index k = j + 1; k < d; ++k) {
                probe_used_[idx + 2] = false;
                idx += 3;
            }
        }
    }

    if (!exact_) {
        const int nq = qubits_for_dim(H_.dim());
        plan_ = cube_plan(nq, 1);
        solver_ = std::make_unique<LreSolver>(plan_);
    }
}

IdentificationResult IdentificationEngine::run(long long shots_per_state, int repetition) const {
    const auto start = Clock::now();
    const Eigen::Index d = H_.dim();

    IdentificationResult result;
    result.d = d;
    result.t = t_;
    result.N = shots_per_state;
    result.seed = mix_seed(root_seed_, static_cast<std::uint64_t>(repetition) + 1);

    std::vector<ComplexMatrix> probe_estimates(probes_.physical_probes.size());
    const auto tomo_start = Clock::now();
    if (exact_) {
        for (std::size_t p = 0; p < probes_.physical_probes.size(); ++p) {
            probe_estimates[p] = exact_outputs_[p].matrix;
        }
    } else {
        if (shots_per_state < plan_.num_settings()) {
            throw ConfigError("shots per output state below the number of settings");
        }
        const auto alloc = allocate_shots(shots_per_state, plan_.num_settings());
        for (std::size_t p = 0; p < probes_.physical_probes.size(); ++p) {
            if (!probe_used_[p]) continue;
            ShotCounts counts;
            counts.total_shots = shots_per_state;
            counts.counts.reserve(plan_.settings.size());
            for (std::size_t s = 0; s < plan_.settings.size(); ++s) {
                const RealVector probs =
                    born_probabilities(exact_outputs_[p], plan_.settings[s]);
                const std::uint64_t seed =
                    mix_seed(root_seed_, static_cast<std::uint64_t>(repetition) + 1,
                             static_cast<std::uint64_t>(p) + 1, static_cast<std::uint64_t>(s) + 1);
                counts.counts.push_back(sample_counts(probs, alloc[s], seed));
            }
            if (!dump_dir_.empty()) {
                write_counts_csv(dump_dir_ + "/counts_rep" + std::to_string(repetition) +
                                     "_probe" + std::to_string(p) + ".csv",
                                 counts);
            }
            const LinearEstimate est = solver_->estimate(counts);
            probe_estimates[p] =
                no_projection_ ? est.matrix : project_to_physical(est).matrix;
        }
    }
    result.tomography_ms = ms_since(tomo_start);

    std::vector<ComplexMatrix> outputs(d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const Eigen::Index i = j * d + k;
            if (assume_hermitian_map_ && j > k) {
                outputs[i] = outputs[k * d + j].adjoint();
            } else {
                outputs[i] = assemble_output_for_basis(probe_estimates, probes_.index_map[i]);
            }
        }
    }

    const LambdaMatrix lambda = compute_lambda(outputs, basis_);
    const DMatrix D = apply_b_dagger(lambda, bperm_);
    if (!dump_dir_.empty()) {
        write_matrix_file(dump_dir_ + "/lambda_rep" + std::to_string(repetition) + ".txt",
                          lambda.matrix);
        write_matrix_file(dump_dir_ + "/dmatrix_rep" + std::to_string(repetition) + ".txt",
                          D.matrix);
    }

    const auto tso_start = Clock::now();
    const RankOneFit rank_one = solve_rank_one(D);
    const UnitaryFit unitary = solve_unitary(rank_one);
    const ComplexMatrix kraus = kraus_from_g(unitary);
    const HamiltonianEstimate estimate = hamiltonian_from_unitary(kraus, t_, h1_);
    result.tso_ms = ms_since(tso_start);

    const ErrorReport report = gauge_aligned_error(estimate, H_);
    result.mse_anchor_gauge = report.sq_error;
    result.mse_shift_min = report.shift_min_sq_error;
    result.alpha1 = rank_one.alpha1;
    result.rank_one_residual = rank_one.residual;
    result.degenerate_top = rank_one.degenerate_top;
    result.wall_time_ms = ms_since(start);
    return result;
}

IdentificationResult run_identification(const ExperimentConfig& cfg) {
    IdentificationEngine engine(make_hamiltonian(cfg.source), cfg);
    return engine.run(cfg.shots_per_state, 0);
}

namespace {

SweepResult finalize_sweep(std::vector<SweepPoint> points, bool with_slope) {
    SweepResult out;
    out.points = std::move(points);
    for (auto& point : out.points) {
        double mean = 0.0;
        for (const auto& rep : point.repetitions) {
            mean += std::log10(std::max(rep.mse_anchor_gauge, 1e-300));
        }
        mean /= static_cast<double>(point.repetitions.size());
        double var = 0.0;
        for (const auto& rep : point.repetitions) {
            const double y = std::log10(std::max(rep.mse_anchor_gauge, 1e-300));
            var += (y - mean) * (y - mean);
        }
        point.mean_log10_mse = mean;
        point.std_log10_mse = point.repetitions.size() > 1
                                  ? std::sqrt(var / (point.repetitions.size() - 1))
                                  : 0.0;
    }
    if (with_slope) {
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(out.points.size());
        for (const auto& point : out.points) {
            pairs.emplace_back(point.x, point_mse(point));
        }
        out.fit = fit_loglog_slope(pairs);
    }
    return out;
}

}  // namespace

SweepResult sweep_resources(const ExperimentConfig& cfg) {
    if (cfg.n_grid.size() < 4) {
        throw ConfigError("sweep_resources: need at least 4 N-grid points");
    }
    const auto [lo, hi] = std::minmax_element(cfg.n_grid.begin(), cfg.n_grid.end());
    if (*lo < 1 || static_cast<double>(*hi) / static_cast<double>(*lo) < 100.0) {
        throw ConfigError("sweep_resources: N-grid must span at least two decades");
    }
    if (cfg.repetitions < 1) throw ConfigError("sweep_resources: repetitions must be positive");

    IdentificationEngine engine(make_hamiltonian(cfg.source), cfg);
    const double d = static_cast<double>(engine.dim());
    const double probes_per_state = (3.0 * d * d - d) / 2.0;

    std::vector<SweepPoint> points(cfg.n_grid.size());
    const int reps = cfg.repetitions;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        points[i].x = probes_per_state * static_cast<double>(cfg.n_grid[i]);
        points[i].repetitions.resize(reps);
    }
    const int ntasks = static_cast<int>(cfg.n_grid.size()) * reps;
    parallel_for(cfg.workers, ntasks, [&](int task) {
        const int pi = task / reps;
        const int rep = task % reps;
        // Repetition index folds in the grid point so lineages stay disjoint.
        points[pi].repetitions[rep] = engine.run(cfg.n_grid[pi], pi * reps + rep);
    });
    return finalize_sweep(std::move(points), true);
}

SweepResult sweep_time(const ExperimentConfig& cfg) {
    if (cfg.t_grid.size() < 3) {
        throw ConfigError("sweep_time: need at least 3 t-grid points");
    }
    if (cfg.repetitions < 1) throw ConfigError("sweep_time: repetitions must be positive");

    Hamiltonian H = make_hamiltonian(cfg.source);
    for (double t : cfg.t_grid) {
        const TimeCheck check = check_evolution_time(H, t);
        if (!check.ok) {
            throw AssumptionViolation("sweep_time: grid point t=" + std::to_string(t) +
                                      " outside the identifiable window");
        }
    }

    const int reps = cfg.repetitions;
    std::vector<std::unique_ptr<IdentificationEngine>> engines;
    engines.reserve(cfg.t_grid.size());
    for (double t : cfg.t_grid) {
        engines.push_back(std::make_unique<IdentificationEngine>(H, cfg, t));
    }

    std::vector<SweepPoint> points(cfg.t_grid.size());
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
        points[i].x = cfg.t_grid[i];
        points[i].repetitions.resize(reps);
    }
    const int ntasks = static_cast<int>(cfg.t_grid.size()) * reps;
    parallel_for(cfg.workers, ntasks, [&](int task) {
        const int pi = task / reps;
        const int rep = task % reps;
        points[pi].repetitions[rep] = engines[pi]->run(cfg.shots_per_state, pi * reps + rep);
    });
    return finalize_sweep(std::move(points), true);
}

SweepResult sweep_qubits(const ExperimentConfig& cfg) {
    if (cfg.q_grid.empty()) {
        throw ConfigError("sweep_qubits: empty qubit grid");
    }
    for (int q : cfg.q_grid) {
        if (q < 1) throw ConfigError("sweep_qubits: qubit counts must be positive");
        if (q > cfg.max_qubits) {
            throw ConfigError("sweep_qubits: " + std::to_string(q) +
                              " qubits exceeds the configured maximum of " +
                              std::to_string(cfg.max_qubits));
        }
    }
    if (cfg.repetitions < 1) throw ConfigError("sweep_qubits: repetitions must be positive");

    const int reps = cfg.repetitions;
    std::vector<std::unique_ptr<IdentificationEngine>> engines;
    engines.reserve(cfg.q_grid.size());
    for (int q : cfg.q_grid) {
        engines.push_back(
            std::make_unique<IdentificationEngine>(tensor_power_fixture(q), cfg));
    }

    std::vector<SweepPoint> points(cfg.q_grid.size());
    for (std::size_t i = 0; i < cfg.q_grid.size(); ++i) {
        points[i].x = static_cast<double>(cfg.q_grid[i]);
        points[i].repetitions.resize(reps);
    }
    const int ntasks = static_cast<int>(cfg.q_grid.size()) * reps;
    parallel_for(cfg.workers, ntasks, [&](int task) {
        const int pi = task / reps;
        const int rep = task % reps;
        points[pi].repetitions[rep] = engines[pi]->run(cfg.shots_per_state, pi * reps + rep);
    });
    // The trend is reported without a fitted slope.
    return finalize_sweep(std::move(points), false);
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw ConfigError("fit_loglog_slope: need at least 3 points");
    }
    const auto n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (const auto& [x, y] : points) {
        if (x <= 0.0 || y <= 0.0) {
            throw ConfigError("fit_loglog_slope: all coordinates must be positive");
        }
        logs.emplace_back(std::log10(x), std::log10(y));
        mx += logs.back().first;
        my += logs.back().second;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [lx, ly] : logs) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
    }
    if (sxx <= 0.0) {
        throw ConfigError("fit_loglog_slope: degenerate x grid");
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (const auto& [lx, ly] : logs) {
        const double r = ly - (intercept + fit.slope * lx);
        ssr += r * r;
    }
    fit.std_err = points.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    return fit;
}

void write_results_csv(const std::string& path,
                       const std::vector<IdentificationResult>& results) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os << std::setprecision(17);
    os << "d,t,N,seed,mse_anchor_gauge,mse_shift_min,alpha1,rank_one_residual,wall_time_ms\n";
    for (const auto& r : results) {
        os << r.d << "," << r.t << "," << r.N << "," << r.seed << "," << r.mse_anchor_gauge
           << "," << r.mse_shift_min << "," << r.alpha1 << "," << r.rank_one_residual << ","
           << r.wall_time_ms << "\n";
    }
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::string& x_name, bool with_slope) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os << std::setprecision(17);
    os << x_name
       << ",repetition,d,t,N,seed,mse_anchor_gauge,mse_shift_min,alpha1,rank_one_residual,"
          "wall_time_ms\n";
    for (const auto& point : sweep.points) {
        for (std::size_t rep = 0; rep < point.repetitions.size(); ++rep) {
            const auto& r = point.repetitions[rep];
            os << point.x << "," << rep << "," << r.d << "," << r.t << "," << r.N << ","
               << r.seed << "," << r.mse_anchor_gauge << "," << r.mse_shift_min << ","
               << r.alpha1 << "," << r.rank_one_residual << "," << r.wall_time_ms << "\n";
        }
    }
    if (with_slope) {
        os << "# slope " << sweep.fit.slope << " stderr " << sweep.fit.std_err << "\n";
    }
}

}  // namespace qhi
