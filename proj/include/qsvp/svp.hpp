#pragma once

#include "qsvp/evolution.hpp"

namespace qsvp {

// A run whose norm drift exceeded the tolerance is unusable; callers that
// aggregate ensembles catch this and count the run as invalid.
struct InvalidEvolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OffsetMode { PaperTable, Linear };

// Offset heuristic: the tabulated small-dimension choices, else a linear
// ramp max(3, ceil(alpha*N)).
std::int64_t estimate_offset(int n, OffsetMode mode = OffsetMode::PaperTable, double alpha = 1.0);

// Exact offset from the enumeration oracle: the infinity norm of the
// canonical shortest coefficient vector.
std::int64_t estimate_offset_oracle(const Basis& basis, int dim_cap = 10);

struct RunParameters {
    double total_time = 100.0; // adiabatic default
    std::int64_t steps = 0;    // 0 selects default_steps(T)
    double scale_target = 20.0;
    // > 0: instead of capping the top of the spectrum, scale so the gap
    // between the two lowest distinct problem energies equals this value.
    // Ensemble experiments use 1.0 so instances share comparable dynamics.
    double gap_anchor = 0.0;
    // sweep length of the K = N*m sector in units of its inverse bottom
    // gap: that run targets the first excited state, where an adiabatic
    // sweep is precisely what one does not want
    double zero_sector_time = 2.0;
    bool parallel = true;
    std::int64_t state_cap = FockBasis::kDefaultStateCap;
};

struct MultiRunCandidate {
    std::int64_t particles = 0; // K_i of the run that produced it
    IntVec vector;
    BigInt norm_sq;             // certified by exact recomputation
    double probability = 0.0;
    CoeffVec coefficients;
};

struct MultiRunReport {
    static constexpr int schema_version = 1;
    std::vector<MultiRunCandidate> per_k;
    MultiRunCandidate best;
    int runs = 0;
};

// Sweeps with K_i = N*m + i particles for i = 1..c over the N lattice sites
// (no reservoir); each run contributes its most probable final Fock state.
MultiRunReport multi_run(const Basis& basis, std::int64_t m, int c,
                         const RunParameters& params = {});

struct SingleRunReport {
    static constexpr int schema_version = 1;
    std::int64_t m = 0;
    std::int64_t k_s = 0;
    RankClassTable table;
    double p_zero = 0.0;    // rank-0 class (zero vector) probability
    double p_lambda1 = 0.0; // first nonzero class
    double p_lambda2 = 0.0; // second nonzero class
    double gamma = 0.0;     // approximation factor of the best measured nonzero class
    bool gamma_vs_oracle = false;
    double norm_drift = 0.0;
};

// One sweep over the augmented (reservoir) system with K_S = m(N+1)
// particles; the ground class is the zero vector, lambda_1 sits at rank 1
// whenever m covers the shortest coefficient vector.
SingleRunReport single_run(const Basis& basis, std::int64_t m, const RunParameters& params = {},
                           std::int64_t k_s_override = -1);

struct Candidate {
    IntVec vector;
    BigInt norm_sq;
    double probability = 0.0;
    double gamma = 0.0;
    bool gamma_vs_oracle = false;
};

// Nonzero classes with support, most probable first; gamma against the
// enumeration oracle when the dimension allows it, else against the best
// LLL-reduced row.
std::vector<Candidate> extract_candidates(const SingleRunReport& report, int top_k,
                                          const Basis& basis, int oracle_cap = 10);

// Shared assembly of the reservoir system (also used by the experiments).
struct SingleRunSystem {
    FockBasis fock;
    OffsetConfig cfg;
    SweepHamiltonian sweep;
};

SingleRunSystem make_single_run_system(const Basis& basis, std::int64_t m,
                                       const RunParameters& params, std::int64_t k_s);

} // namespace qsvp
