#include "qsvp/svp.hpp"

#include <algorithm>
#include <cmath>

namespace qsvp {

std::int64_t estimate_offset(int n, OffsetMode mode, double alpha) {
    if (n < 2) throw std::invalid_argument("estimate_offset: need N >= 2");
    if (mode == OffsetMode::PaperTable) {
        switch (n) {
            case 2: return 3;
            case 3: return 4;
            case 4: return 4;
            default: break; // table miss falls through to the linear ramp
        }
    }
    return std::max<std::int64_t>(3, static_cast<std::int64_t>(std::ceil(alpha * n)));
}

std::int64_t estimate_offset_oracle(const Basis& basis, int dim_cap) {
    return svp_enumerate(basis, dim_cap).inf_norm_xmin;
}

namespace {

EvolveOptions run_options(const RunParameters& params) {
    EvolveOptions opts;
    opts.steps = params.steps;
    opts.parallel = params.parallel;
    return opts;
}

double scaled_bottom_gap(const ProblemDiagonal& hp) {
    double lowest = hp.scaled_energies.minCoeff();
    double second = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < hp.scaled_energies.size(); ++i) {
        const double e = hp.scaled_energies[i];
        if (e > lowest && e < second) second = e;
    }
    return std::isfinite(second) ? second - lowest : 0.0;
}

SweepHamiltonian assemble_sweep(const FockBasis& fock, const Basis& basis, const OffsetConfig& cfg,
                                const RunParameters& params, double total_time) {
    auto hp = build_problem_diagonal(fock, basis, cfg, SpectrumScale{params.scale_target});
    if (params.gap_anchor > 0) apply_gap_anchor(hp, params.gap_anchor);
    return make_sweep(build_tunnelling(fock), std::move(hp), total_time);
}

// Most probable final state among those decoding to a nonzero vector. Runs
// with i >= 1 particles above the offset cannot decode to zero at all; the
// K = N*m sector can, and there the zero vector is the ground state: that
// run is swept at the sub-adiabatic zero_sector_time so the first excited
// states keep measurable weight.
MultiRunCandidate run_one_k(const Basis& basis, std::int64_t m, std::int64_t particles,
                            const RunParameters& params) {
    const int n = basis.dim;
    FockBasis fock(particles, n, params.state_cap);
    const OffsetConfig cfg{m, n, false};
    const bool zero_sector = particles == static_cast<std::int64_t>(n) * m;

    auto hp = build_problem_diagonal(fock, basis, cfg, SpectrumScale{params.scale_target});
    if (params.gap_anchor > 0) apply_gap_anchor(hp, params.gap_anchor);
    double total_time = params.total_time;
    EvolveOptions opts = run_options(params);
    if (zero_sector) {
        const double gap = scaled_bottom_gap(hp);
        if (gap > 0) {
            total_time = params.zero_sector_time / gap;
            opts.steps = 0; // sub-adiabatic sweep picks its own default
        }
    }
    auto sweep = make_sweep(build_tunnelling(fock), std::move(hp), total_time);
    const auto psi0 = initial_ground_state(fock);
    const auto result = evolve(sweep, psi0, opts);
    if (!result.valid)
        throw InvalidEvolution("multi_run: norm drift " + std::to_string(result.norm_drift) +
                               " at K=" + std::to_string(particles));
    MultiRunCandidate candidate;
    candidate.particles = particles;
    candidate.probability = -1.0;
    for (std::int64_t r = 0; r < fock.size(); ++r) {
        if (result.final_probabilities[r] <= candidate.probability) continue;
        auto x = fock_to_coeff(fock.state(r), cfg);
        if (std::all_of(x.begin(), x.end(), [](std::int64_t v) { return v == 0; })) continue;
        candidate.probability = result.final_probabilities[r];
        candidate.coefficients = std::move(x);
    }
    auto vec = to_lattice_vector(candidate.coefficients, basis);
    candidate.vector = std::move(vec.coords);
    candidate.norm_sq = std::move(vec.norm_sq);
    return candidate;
}

} // namespace

MultiRunReport multi_run(const Basis& basis, std::int64_t m, int c, const RunParameters& params) {
    if (c < 1) throw std::invalid_argument("multi_run: need at least one run");
    if (m < 0) throw std::invalid_argument("multi_run: offset must be nonnegative");
    const int n = basis.dim;
    // the K = N*m sector is the only place zero-sum coefficient vectors
    // live, so it is swept as well whenever it holds any particles
    const int first = (static_cast<std::int64_t>(n) * m >= 1) ? 0 : 1;
    MultiRunReport report;
    report.runs = c - first + 1;
    report.per_k.resize(report.runs);

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (params.parallel)
    for (int i = first; i <= c; ++i) {
        try {
            report.per_k[i - first] = run_one_k(basis, m, static_cast<std::int64_t>(n) * m + i, params);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    const auto better = [](const MultiRunCandidate& a, const MultiRunCandidate& b) {
        if (a.norm_sq != b.norm_sq) return a.norm_sq < b.norm_sq;
        return a.vector < b.vector;
    };
    report.best = report.per_k.front();
    for (const auto& candidate : report.per_k)
        if (better(candidate, report.best)) report.best = candidate;
    return report;
}

SingleRunSystem make_single_run_system(const Basis& basis, std::int64_t m,
                                       const RunParameters& params, std::int64_t k_s) {
    const int n = basis.dim;
    FockBasis fock(k_s, n + 1, params.state_cap);
    const OffsetConfig cfg{m, n, true};
    auto sweep = assemble_sweep(fock, basis, cfg, params, params.total_time);
    return SingleRunSystem{std::move(fock), cfg, std::move(sweep)};
}

SingleRunReport single_run(const Basis& basis, std::int64_t m, const RunParameters& params,
                           std::int64_t k_s_override) {
    if (m < 0) throw std::invalid_argument("single_run: offset must be nonnegative");
    const int n = basis.dim;
    const std::int64_t k_s = k_s_override >= 0 ? k_s_override : m * (n + 1);

    auto system = make_single_run_system(basis, m, params, k_s);
    const auto psi0 = initial_ground_state(system.fock);
    const auto result = evolve(system.sweep, psi0, run_options(params));
    if (!result.valid)
        throw InvalidEvolution("single_run: norm drift " + std::to_string(result.norm_drift));

    SingleRunReport report;
    report.m = m;
    report.k_s = k_s;
    report.norm_drift = result.norm_drift;
    report.table = rank_classes(system.fock, basis, system.cfg, result.final_probabilities);

    int nonzero_seen = 0;
    for (const auto& c : report.table.classes) {
        if (c.norm_sq == 0) {
            report.p_zero = c.probability;
            continue;
        }
        if (nonzero_seen == 0) report.p_lambda1 = c.probability;
        if (nonzero_seen == 1) report.p_lambda2 = c.probability;
        if (++nonzero_seen == 2) break;
    }

    // approximation factor of the most probable nonzero class
    const RankClass* best_measured = nullptr;
    for (const auto& c : report.table.classes) {
        if (c.norm_sq == 0) continue;
        if (!best_measured || c.probability > best_measured->probability) best_measured = &c;
    }
    if (best_measured) {
        const double measured = best_measured->norm_sq.convert_to<double>();
        if (n <= 10) {
            const auto oracle = svp_enumerate(basis);
            report.gamma = std::sqrt(measured / oracle.lambda1_sq.convert_to<double>());
            report.gamma_vs_oracle = true;
        } else {
            const auto reduced = lll_reduce(basis);
            BigInt best_row = 0;
            for (const auto& row : reduced.rows) {
                BigInt nsq = 0;
                for (const auto& e : row) nsq += e * e;
                if (best_row == 0 || nsq < best_row) best_row = nsq;
            }
            report.gamma = std::sqrt(measured / best_row.convert_to<double>());
            report.gamma_vs_oracle = false;
        }
    }
    return report;
}

std::vector<Candidate> extract_candidates(const SingleRunReport& report, int top_k,
                                          const Basis& basis, int oracle_cap) {
    std::vector<const RankClass*> nonzero;
    for (const auto& c : report.table.classes)
        if (c.norm_sq != 0 && c.probability > 0.0) nonzero.push_back(&c);
    std::sort(nonzero.begin(), nonzero.end(), [](const RankClass* a, const RankClass* b) {
        if (a->probability != b->probability) return a->probability > b->probability;
        return a->rank < b->rank;
    });
    if (top_k >= 0 && static_cast<int>(nonzero.size()) > top_k) nonzero.resize(top_k);

    double reference = 0.0;
    bool vs_oracle = basis.dim <= oracle_cap;
    if (vs_oracle) {
        reference = svp_enumerate(basis, oracle_cap).lambda1_sq.convert_to<double>();
    } else {
        const auto reduced = lll_reduce(basis);
        BigInt best_row = 0;
        for (const auto& row : reduced.rows) {
            BigInt nsq = 0;
            for (const auto& e : row) nsq += e * e;
            if (best_row == 0 || nsq < best_row) best_row = nsq;
        }
        reference = best_row.convert_to<double>();
    }

    std::vector<Candidate> out;
    out.reserve(nonzero.size());
    for (const auto* c : nonzero) {
        Candidate candidate;
        candidate.vector = c->vectors.front();
        candidate.norm_sq = c->norm_sq;
        candidate.probability = c->probability;
        candidate.gamma = std::sqrt(c->norm_sq.convert_to<double>() / reference);
        candidate.gamma_vs_oracle = vs_oracle;
        out.push_back(std::move(candidate));
    }
    return out;
}

} // namespace qsvp
