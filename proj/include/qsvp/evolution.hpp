#pragma once

#include "qsvp/hamiltonian.hpp"

#include <utility>
#include <vector>

namespace qsvp {

using StateVector = Eigen::VectorXcd;

// Condensate of K bosons in the lowest single-particle mode of the open
// chain: the exact ground state of the tunnelling Hamiltonian.
StateVector initial_ground_state(const FockBasis& basis);

Eigen::VectorXd measure_probabilities(const StateVector& psi);

std::int64_t default_steps(double total_time);

struct EvolveOptions {
    std::int64_t steps = 0;     // 0 selects default_steps(T)
    int snapshots = 0;          // > 0 records that many evenly spaced probability snapshots
    int spectrum_levels = 0;    // > 0 additionally records the lowest-k eigenvalues there
    bool store_amplitudes = false; // keep the full state at each snapshot
    double norm_tolerance = 1e-6;
    double krylov_tolerance = 1e-12;
    int krylov_max = 30;
    bool parallel = true;
};

struct EvolutionResult {
    Eigen::VectorXd final_probabilities;
    double norm_drift = 0.0;
    bool valid = true; // false when the norm drift exceeded the tolerance
    std::vector<std::pair<double, Eigen::VectorXd>> trajectory;
    std::vector<std::pair<double, Eigen::VectorXd>> spectrum_track;
    std::vector<std::pair<double, StateVector>> amplitude_trajectory;
};

// Solves i dpsi/dt = H(t) psi (hbar = 1) from t=0 to T with short-step
// Lanczos exponentials evaluated at the midpoint of each step. The state is
// never renormalised; the accumulated drift is reported.
EvolutionResult evolve(const SweepHamiltonian& sweep, const StateVector& psi0,
                       const EvolveOptions& opts = {});

// k smallest eigenvalues of H(t), ascending. Dense solve up to dense_cap,
// Lanczos with full reorthogonalisation above it.
Eigen::VectorXd instantaneous_spectrum(const SweepHamiltonian& sweep, double t, int k,
                                       std::int64_t dense_cap = 2000);

// Fock states grouped into "i-th shortest vector" classes: states decode to
// lattice vectors, v and -v share a class, classes are ordered by squared
// norm with lexicographic tie-breaking.
struct RankClass {
    int rank = 0;
    BigInt norm_sq;
    std::vector<IntVec> vectors;               // realised representatives, closed under sign
    std::vector<std::int64_t> member_indices;  // Fock states in this class
    double probability = 0.0;
};

struct RankClassTable {
    std::vector<RankClass> classes;

    const RankClass* zero_class() const {
        return (!classes.empty() && classes.front().norm_sq == 0) ? &classes.front() : nullptr;
    }
    // lowest nonzero-norm class, if any
    const RankClass* lambda1_class() const {
        for (const auto& c : classes)
            if (c.norm_sq != 0) return &c;
        return nullptr;
    }
};

RankClassTable rank_classes(const FockBasis& basis, const Basis& lattice_basis,
                            const OffsetConfig& cfg, const Eigen::VectorXd& probabilities);

} // namespace qsvp
