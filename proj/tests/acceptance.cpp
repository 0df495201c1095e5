// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances and thresholds are pinned in code; every stochastic input is
// seeded, so reruns are bit-reproducible.

#include "qsvp/experiments.hpp"
#include "qsvp/io.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace qsvp;

namespace {

using clock_type = std::chrono::steady_clock;

int g_failures = 0;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& message) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += message;
        }
    }
    void note(const std::string& message) {
        if (!detail.empty()) detail += "; ";
        detail += message;
    }
};

void run_criterion(int id, const char* title, double budget_seconds,
                   const std::function<void(Outcome&)>& body) {
    Outcome outcome;
    const auto start = clock_type::now();
    try {
        body(outcome);
    } catch (const std::exception& e) {
        outcome.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - start).count();
    if (budget_seconds > 0)
        outcome.require(elapsed < budget_seconds,
                        "runtime " + format_double(elapsed) + "s over budget " +
                            format_double(budget_seconds) + "s");
    if (!outcome.pass) ++g_failures;
    std::printf("[%s] criterion %2d (%6.1fs): %s%s%s\n", outcome.pass ? "PASS" : "FAIL", id, elapsed,
                title, outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
    std::fflush(stdout);
}

Basis seeded_uniform_basis(std::uint64_t seed, int dim, int bound = 10) {
    Rng rng(seed);
    return random_basis_uniform(dim, rng, bound);
}

std::string vec_str(const IntVec& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].str();
    return out + ")";
}

// ---------------------------------------------------------------------- 1
void criterion_appendix_golden(Outcome& out) {
    const auto result = exp_appendix_c(2.0, 0);
    IntMat want{{BigInt(5), BigInt(-4)}, {BigInt(-4), BigInt(4)}};
    out.require(result.gram_matrix == want, "Gram matrix mismatch");
    out.require(result.h0_offdiag_error <= 1e-12, "H0 off-diagonals deviate from -sqrt(2)");
    out.require(result.psi0_error <= 1e-12, "psi0 deviates from (1/2, sqrt(2)/2, 1/2)");
    out.require(result.p11_final > 0.9,
                "final P(|1,1>) = " + format_double(result.p11_final) + " (threshold 0.9)");
    out.require(result.decoded_vector == IntVec{BigInt(1), BigInt(0)},
                "decoded vector " + vec_str(result.decoded_vector) + " != (1,0)");
    out.require(result.norm_drift < 1e-6, "norm drift too large");
}

// ---------------------------------------------------------------------- 2
void criterion_dimensions(Outcome& out) {
    out.require(dimension(9, 3) == 55, "dimension(9,3) != 55");
    out.require(dimension(16, 4) == 969, "dimension(16,4) != 969");
    for (int n = 1; n <= 6; ++n)
        for (std::int64_t k = 0; k <= 12; ++k) {
            BigInt total = 0;
            for (std::int64_t j = 0; j <= k; ++j) total += dimension(j, n);
            out.require(dimension_single_run(k, n) == total,
                        "hockey stick fails at K=" + std::to_string(k) + " N=" + std::to_string(n));
        }
}

// ---------------------------------------------------------------------- 3
void criterion_energy_identity(Outcome& out) {
    int checked = 0;
    int skipped = 0;
    for (int n = 2; n <= 4; ++n) {
        int taken = 0;
        for (int i = 0; taken < 20 && i < 200; ++i) {
            const auto basis = seeded_uniform_basis(0xE0000 + n * 100 + i, n);
            const auto oracle = svp_enumerate(basis);
            const std::int64_t m = oracle.inf_norm_xmin;
            // occasional near-degenerate draws have enormous coefficient
            // boxes; the identity is a desk-scale check, so skip those
            if (dimension(m * (n + 1), n + 1) > FockBasis::kDefaultStateCap / 8) {
                ++skipped;
                continue;
            }
            ++taken;
            FockBasis fock(m * (n + 1), n + 1);
            const OffsetConfig cfg{m, n, true};
            const auto hp = build_problem_diagonal(fock, basis, cfg);
            BigInt min_nonzero = -1;
            for (std::int64_t r = 0; r < fock.size(); ++r) {
                const auto x = fock_to_coeff(fock.state(r), cfg);
                const auto direct = to_lattice_vector(x, basis);
                if (hp.exact_energies[r] != direct.norm_sq) {
                    out.require(false, "energy identity broken at N=" + std::to_string(n) +
                                           " instance " + std::to_string(i));
                    return;
                }
                const bool zero = direct.norm_sq == 0;
                if (!zero && (min_nonzero < 0 || direct.norm_sq < min_nonzero))
                    min_nonzero = direct.norm_sq;
            }
            out.require(min_nonzero == oracle.lambda1_sq,
                        "lowest nonzero class != lambda1^2 at N=" + std::to_string(n) +
                            " instance " + std::to_string(i));
            ++checked;
        }
        out.require(taken == 20, "could not collect 20 instances at N=" + std::to_string(n));
    }
    out.note(std::to_string(checked) + " lattices, exact integer identity" +
             (skipped ? " (" + std::to_string(skipped) + " oversized draws skipped)" : ""));
}

// ---------------------------------------------------------------------- 4
void criterion_ground_state(Outcome& out) {
    int checked = 0;
    double worst = 0.0;
    const auto check = [&](std::int64_t k, int m) {
        FockBasis basis(k, m);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            (Eigen::MatrixXd(build_tunnelling(basis).matrix)));
        const auto psi = initial_ground_state(basis);
        double overlap = 0;
        for (Eigen::Index i = 0; i < psi.size(); ++i)
            overlap += eig.eigenvectors().col(0)[i] * std::real(psi[i]);
        const double infidelity = 1.0 - std::abs(overlap);
        worst = std::max(worst, infidelity);
        out.require(infidelity <= 1e-10, "fidelity below contract at K=" + std::to_string(k) +
                                             " M=" + std::to_string(m));
        ++checked;
    };
    // every small space, plus the largest space per site count
    for (int m = 1; m <= 8; ++m)
        for (std::int64_t k = 0;; ++k) {
            if (dimension(k, m) > 200 || (m == 1 && k > 32)) break;
            check(k, m);
        }
    for (int m = 2; m <= 8; ++m) {
        std::int64_t k = 0;
        while (dimension(k + 1, m) <= 2000) ++k;
        check(k, m);
    }
    out.note(std::to_string(checked) + " spaces, worst infidelity " + format_double(worst));
}

// ---------------------------------------------------------------------- 5
void criterion_unitarity_convergence(Outcome& out) {
    // appendix instance at default and halved step counts
    {
        FockBasis fock(2, 2);
        IntMat rows{{BigInt(1), BigInt(2)}, {BigInt(0), BigInt(-2)}};
        const Basis bad(std::move(rows));
        auto sweep = build_sweep_hamiltonian(fock, bad, OffsetConfig{0, 2, false}, 2.0);
        const auto psi0 = initial_ground_state(fock);
        EvolveOptions fine, coarse;
        fine.steps = default_steps(2.0);
        coarse.steps = fine.steps / 2;
        const auto a = evolve(sweep, psi0, fine);
        const auto b = evolve(sweep, psi0, coarse);
        out.require(a.norm_drift < 1e-6 && b.norm_drift < 1e-6, "appendix norm drift exceeds 1e-6");
        const double diff = (a.final_probabilities - b.final_probabilities).cwiseAbs().maxCoeff();
        out.require(diff < 1e-4, "appendix halving moved probabilities by " + format_double(diff));
        out.note("2-site halving delta " + format_double(diff));
    }
    // one random 3D instance through the single-run pipeline
    {
        const auto basis = seeded_uniform_basis(0xC5, 3);
        RunParameters params;
        params.total_time = 10.0;
        params.gap_anchor = 1.0;
        auto system = make_single_run_system(basis, 4, params, 16);
        const auto psi0 = initial_ground_state(system.fock);
        EvolveOptions fine, coarse;
        fine.steps = default_steps(10.0);
        coarse.steps = fine.steps / 2;
        const auto a = evolve(system.sweep, psi0, fine);
        const auto b = evolve(system.sweep, psi0, coarse);
        out.require(a.valid && b.valid, "3D run flagged invalid");
        out.require(a.norm_drift < 1e-6 && b.norm_drift < 1e-6, "3D norm drift exceeds 1e-6");
        const double diff = (a.final_probabilities - b.final_probabilities).cwiseAbs().maxCoeff();
        out.require(diff < 1e-4, "3D halving moved probabilities by " + format_double(diff));
        out.note("3D (D=969) halving delta " + format_double(diff));
    }
}

// ------------------------------------------------------------------- 6 & 7
std::vector<PayoffCell> shared_payoff_cells() {
    static std::vector<PayoffCell> cells = [] {
        ExperimentConfig cfg;
        cfg.name = "acceptance-payoff";
        cfg.dims = {2};
        cfg.ensemble = 50;
        cfg.t_grid = {0.25, 0.5, 1, 2, 4, 8, 10, 16, 32, 64, 100};
        cfg.m_policy = "paper";
        cfg.seed = 20260808;
        return exp_payoff(cfg);
    }();
    return cells;
}

void criterion_adiabatic_concentration(Outcome& out) {
    const auto cells = shared_payoff_cells();
    double p0_at[3] = {-1, -1, -1};
    int invalid = 0;
    for (const auto& cell : cells) {
        if (cell.sweep_time == 1.0) p0_at[0] = cell.mean_p0;
        if (cell.sweep_time == 10.0) p0_at[1] = cell.mean_p0;
        if (cell.sweep_time == 100.0) p0_at[2] = cell.mean_p0;
        invalid += cell.invalid_runs;
    }
    out.require(p0_at[0] >= 0 && p0_at[1] >= 0 && p0_at[2] >= 0, "grid points missing");
    out.require(p0_at[0] <= p0_at[1] && p0_at[1] <= p0_at[2],
                "mean P(rank 0) not non-decreasing across T = 1, 10, 100");
    out.require(p0_at[2] >= 0.8, "mean P(rank 0) at T=100 is " + format_double(p0_at[2]));
    out.require(invalid == 0, std::to_string(invalid) + " invalid runs");
    out.note("mean P0 = " + format_double(p0_at[0]) + " / " + format_double(p0_at[1]) + " / " +
             format_double(p0_at[2]));
}

void criterion_goldilocks(Outcome& out) {
    const auto cells = shared_payoff_cells();
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i].mean_p1 > cells[argmax].mean_p1) argmax = i;
    out.require(argmax != 0 && argmax + 1 != cells.size(),
                "mean P(lambda1) peaks at a grid endpoint");
    out.require(cells[argmax].mean_p1 > cells.front().mean_p1 &&
                    cells[argmax].mean_p1 > cells.back().mean_p1,
                "interior maximum is not strict");
    out.note("peak " + format_double(cells[argmax].mean_p1) + " at T=" +
             format_double(cells[argmax].sweep_time) + " vs endpoints " +
             format_double(cells.front().mean_p1) + " / " + format_double(cells.back().mean_p1));
}

// ---------------------------------------------------------------------- 8
void criterion_multi_run(Outcome& out) {
    for (int n = 2; n <= 3; ++n) {
        const int instances = 24;
        int success = 0;
        std::int64_t invalid = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : success, invalid)
        for (int i = 0; i < instances; ++i) {
            const auto basis = seeded_uniform_basis(0xAB0000 + n * 1000 + i, n, 8);
            const auto oracle = svp_enumerate(basis);
            RunParameters params;
            params.total_time = 100.0;
            params.gap_anchor = 1.0;
            params.parallel = false;
            try {
                const auto report =
                    multi_run(basis, oracle.inf_norm_xmin,
                              static_cast<int>(n * oracle.inf_norm_xmin), params);
                if (report.best.norm_sq == oracle.lambda1_sq) ++success;
            } catch (const InvalidEvolution&) {
                ++invalid;
            }
        }
        const double rate = static_cast<double>(success) / instances;
        out.require(rate >= 0.9, "N=" + std::to_string(n) + " success rate " + format_double(rate));
        out.require(invalid == 0, "invalid evolutions at N=" + std::to_string(n));
        out.note("N=" + std::to_string(n) + ": " + std::to_string(success) + "/" +
                 std::to_string(instances));
    }
}

// ---------------------------------------------------------------------- 9
void criterion_kgrowth_trends(Outcome& out) {
    ExperimentConfig cfg;
    cfg.name = "acceptance-kgrowth";
    cfg.dims = {3, 4, 5, 6, 7, 8};
    cfg.ensemble = 80;
    cfg.seed = 31337;
    const auto result = exp_kgrowth(cfg);
    out.require(result.hnf_inf_fit.slope > 0,
                "HNF inf-norm slope " + format_double(result.hnf_inf_fit.slope));
    for (const auto& row : result.rows)
        out.require(row.mean_coeff_sum < row.mean_hnf_inf,
                    "mean |sum x_i| >= mean inf-norm at N=" + std::to_string(row.dim));
    out.note("HNF slope " + format_double(result.hnf_inf_fit.slope) + ", coeff-sum slope " +
             format_double(result.coeff_sum_fit.slope));
}

// --------------------------------------------------------------------- 10
void criterion_banding(Outcome& out) {
    const int instances = 100;
    double volume_total = 0;
    std::int64_t extents = 0, extents_le3 = 0;
    int preserved_checks = 0;
#pragma omp parallel for schedule(dynamic) \
    reduction(+ : volume_total, extents, extents_le3, preserved_checks)
    for (int i = 0; i < instances; ++i) {
        Rng rng(0xBA2D0000ULL + i);
        const auto h = random_basis_prime_hnf(30, rng);
        const auto banded = band_diagonalise(h);
        volume_total += banded.volume_factor.convert_to<double>();
        for (int e : banded.eliminated_extents) {
            ++extents;
            if (e <= 3) ++extents_le3;
        }
        if (banded.scalings == 0) {
            if (hnf(banded.basis).rows == h.rows) ++preserved_checks;
            else preserved_checks -= instances; // poison the count
        }
    }
    const double mean_volume = volume_total / instances;
    const double extent_fraction = static_cast<double>(extents_le3) / extents;
    out.require(preserved_checks >= 0, "lattice not preserved despite zero scalings");
    out.require(mean_volume >= 1.5 && mean_volume <= 6.0,
                "mean volume factor " + format_double(mean_volume) + " outside [1.5, 6]");
    out.require(extent_fraction >= 0.9,
                "extent<=3 fraction " + format_double(extent_fraction));
    out.note("mean volume " + format_double(mean_volume) + ", extent<=3 " +
             format_double(extent_fraction) + ", " + std::to_string(preserved_checks) +
             " exact preservations");
}

// --------------------------------------------------------------------- 11
void criterion_qubit_bound(Outcome& out) {
    double worst_ratio = 0;
    for (int c = 1; c <= 2; ++c)
        for (int n = 2; n <= 100; ++n) {
            const auto report = qubit_bound(n, c);
            out.require(report.exact_log2_d <= report.stirling_bound_log2,
                        "bound violated at N=" + std::to_string(n) + " c=" + std::to_string(c));
            worst_ratio = std::max(worst_ratio,
                                   report.stirling_bound_log2 / (n * std::log2(double(n))));
        }
    out.require(worst_ratio <= 8.0, "bound/(N log2 N) reaches " + format_double(worst_ratio));
    out.note("worst bound/(N log2 N) = " + format_double(worst_ratio));
}

} // namespace

int main() {
    std::printf("acceptance suite -- seeded, tolerances pinned in code\n");
    run_criterion(1, "appendix golden run (G, H0, psi0, P(|1,1>), decoded vector)", 1.0,
                  criterion_appendix_golden);
    run_criterion(2, "Hilbert dimensions and hockey-stick identity", 1.0, criterion_dimensions);
    run_criterion(3, "energy mapping equals exact norms, lambda1 reachable", 60.0,
                  criterion_energy_identity);
    run_criterion(4, "condensate formula vs dense diagonalisation", 60.0, criterion_ground_state);
    run_criterion(5, "unitarity and step-halving convergence", 0.0, criterion_unitarity_convergence);
    run_criterion(6, "adiabatic concentration over the 2D ensemble", 600.0,
                  criterion_adiabatic_concentration);
    run_criterion(7, "Goldilocks interior maximum of P(lambda1)", 900.0, criterion_goldilocks);
    run_criterion(8, "Multi-Run recovers lambda1 on oracle-verified lattices", 1200.0,
                  criterion_multi_run);
    run_criterion(9, "coefficient growth trends across dimensions", 300.0, criterion_kgrowth_trends);
    run_criterion(10, "band-diagonalisation preservation and volume statistics", 120.0,
                  criterion_banding);
    run_criterion(11, "qubit-count bound across N and c", 1.0, criterion_qubit_bound);

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
    } else {
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    }
    return g_failures;
}
