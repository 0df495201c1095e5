#pragma once

#include "qsvp/banding.hpp"
#include "qsvp/io.hpp"
#include "qsvp/svp.hpp"

#include <filesystem>

namespace qsvp {

// Growth of shortest-vector coefficient statistics with dimension, on HNF
// and LLL-reduced bases of the same random lattices.
struct KGrowthRow {
    int dim = 0;
    double mean_hnf_inf = 0, se_hnf_inf = 0;
    double mean_lll_inf = 0, se_lll_inf = 0;
    double mean_coeff_sum = 0, se_coeff_sum = 0;
};

struct LinearFit {
    double slope = 0, intercept = 0;
};

struct KGrowthResult {
    std::vector<KGrowthRow> rows;
    LinearFit hnf_inf_fit;
    LinearFit lll_inf_fit;
    LinearFit coeff_sum_fit;
};

KGrowthResult exp_kgrowth(const ExperimentConfig& cfg);

// Mean probability of landing in the i-th shortest-vector class.
struct DistributionCell {
    int dim = 0;
    double sweep_time = 0;
    std::vector<double> mean_rank_prob; // ranks 0..max_rank
    double mean_tail = 0;               // mass beyond max_rank
    double mean_p_lambda1 = 0;          // oracle-matched class, 0 when absent
    int invalid_runs = 0;
    int samples = 0;
};

std::vector<DistributionCell> exp_distributions(const ExperimentConfig& cfg, int max_rank = 20);

// P(0), P(lambda1), P(lambda2) versus sweep time: mean and 10th percentile.
struct PayoffCell {
    int dim = 0;
    double sweep_time = 0;
    double mean_p0 = 0, p10_p0 = 0;
    double mean_p1 = 0, p10_p1 = 0; // oracle-matched lambda1 class
    double mean_p2 = 0, p10_p2 = 0; // rank-2 class
    int invalid_runs = 0;
    int samples = 0;
};

std::vector<PayoffCell> exp_payoff(const ExperimentConfig& cfg);

// Trajectory of instantaneous-eigenstate populations and energy gaps for a
// single instance.
struct LevelsResult {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> populations; // lowest-k eigenstate overlaps per time
    std::vector<Eigen::VectorXd> gaps;        // E_i - E_0 per time
};

// With m >= 1 this runs the reservoir system with K_S = m(N+1) particles
// (or k_override). m = 0 runs the plain N-site system and requires an
// explicit particle count.
LevelsResult exp_energy_levels(const Basis& basis, std::int64_t m, double sweep_time, int levels,
                               std::int64_t steps = 0, double gap_anchor = 1.0,
                               std::int64_t k_override = -1);

// Band-diagonalisation statistics over a prime-determinant HNF ensemble.
struct BandingResult {
    int dim = 0;
    int instances = 0;
    BandProfile profile;
    std::vector<std::vector<double>> heat; // mean |entry| per (row, col), diagonal-normalised
    double mean_volume_factor = 0;
    double fraction_extent_le3 = 0;
    int stuck_rows = 0;
    std::vector<BigInt> volume_factors;
};

BandingResult exp_banding(const ExperimentConfig& cfg);

// The worked two-site demonstration: golden values, trajectory, final checks.
struct AppendixCResult {
    IntMat gram_matrix;
    double h0_offdiag_error = 0;   // vs -sqrt(2)
    double psi0_error = 0;         // vs (1/2, sqrt(2)/2, 1/2)
    double p11_final = 0;
    IntVec decoded_vector;
    bool decoded_is_shortest = false;
    std::vector<std::pair<double, Eigen::VectorXd>> trajectory;
    double norm_drift = 0;
};

AppendixCResult exp_appendix_c(double sweep_time = 2.0, std::int64_t steps = 0);

// File writers (CSV always; optional SVG rendering of the same data).
void write_kgrowth(const std::filesystem::path& dir, const KGrowthResult& result, const std::string& format);
void write_distributions(const std::filesystem::path& dir, const std::vector<DistributionCell>& cells,
                         const std::string& format);
void write_payoff(const std::filesystem::path& dir, const std::vector<PayoffCell>& cells,
                  const std::string& format);
void write_levels(const std::filesystem::path& dir, const LevelsResult& result, const std::string& format);
void write_banding(const std::filesystem::path& dir, const BandingResult& result, const std::string& format);
void write_appendix_c(const std::filesystem::path& dir, const AppendixCResult& result,
                      const std::string& format);

} // namespace qsvp
