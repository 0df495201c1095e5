#pragma once

#include "qsvp/fock.hpp"
#include "qsvp/lattice.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <functional>
#include <iosfwd>

namespace qsvp {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Nearest-neighbour bosonic hopping over an open chain of sites, expressed
// in a fixed-particle-number Fock basis. Symmetric, all nonzeros negative,
// at most 2(M-1) entries per row.
struct TunnellingMatrix {
    std::int64_t dim = 0;
    SparseRowMatrix matrix;
};

TunnellingMatrix build_tunnelling(const FockBasis& basis);

// Basis rows extended by the zero row that backs the particle reservoir.
IntMat augment_basis(const Basis& basis);

// Gram matrix of an arbitrary list of integer rows (the augmented basis is
// rectangular, so this lives outside the square Basis type).
IntMat gram_of_rows(const IntMat& rows);

struct SpectrumScale {
    double target_max = 20.0;
};

// Diagonal problem Hamiltonian: energy of Fock state r is the exact squared
// lattice norm of its decoded coefficient vector.
struct ProblemDiagonal {
    IntVec exact_energies;          // pre-scaling, exact integers
    Eigen::VectorXd scaled_energies;
    double scale_factor = 1.0;
    BigInt constant_shift = 0;      // m^2 sum_ij G'_ij, retained in the energies
};

ProblemDiagonal build_problem_diagonal(const FockBasis& basis, const Basis& lattice_basis,
                                       const OffsetConfig& cfg, const SpectrumScale& scale = {});

// (v_ij, mu_i, constant) such that
//   sum_i v_ii n_i(n_i-1) + sum_{i!=j} v_ij n_i n_j + sum_i mu_i n_i + constant
// equals the problem energy of every Fock state.
struct PhysicalDecomposition {
    Eigen::MatrixXd v;
    Eigen::VectorXd mu;
    double constant = 0;
};

PhysicalDecomposition physical_decomposition(const IntMat& gram_prime, const OffsetConfig& cfg);

// scale_factor = target_max / max(exact); ordering and argmin are preserved.
std::pair<Eigen::VectorXd, double> scale_spectrum(const IntVec& exact_energies, double target_max);

// Rescale so the gap between the two smallest distinct exact energies equals
// `anchor`. This is how ensemble experiments put every instance on a common
// spectrum: the relevant low-energy dynamics become comparable across
// lattices of very different entry sizes. No-op when the spectrum is flat.
void apply_gap_anchor(ProblemDiagonal& hp, double anchor);

// Sweep weights on normalised time s = t/T with f(0)=1, g(0)=0, f(1)=0, g(1)=1.
struct Schedule {
    std::function<double(double)> f;
    std::function<double(double)> g;

    static Schedule linear() {
        return {[](double s) { return 1.0 - s; }, [](double s) { return s; }};
    }
};

struct SweepHamiltonian {
    TunnellingMatrix h0;
    ProblemDiagonal hp;
    double total_time = 1.0;
    Schedule schedule = Schedule::linear();
};

SweepHamiltonian make_sweep(TunnellingMatrix h0, ProblemDiagonal hp, double total_time,
                            Schedule schedule = Schedule::linear());

// Full build for one lattice instance: Fock basis in, H(t) out.
SweepHamiltonian build_sweep_hamiltonian(const FockBasis& basis, const Basis& lattice_basis,
                                         const OffsetConfig& cfg, double total_time,
                                         const SpectrumScale& scale = {},
                                         Schedule schedule = Schedule::linear());

// out = f(t/T) * H0 * in + g(t/T) * diag(scaled energies) * in.
// The OpenMP kernel and the plain serial loop compute identical arithmetic;
// the serial one is the reference the tests compare against.
void sweep_apply_serial(const SweepHamiltonian& sweep, double t, const Eigen::VectorXcd& in,
                        Eigen::VectorXcd& out);
void sweep_apply_omp(const SweepHamiltonian& sweep, double t, const Eigen::VectorXcd& in,
                     Eigen::VectorXcd& out);
void sweep_apply(const SweepHamiltonian& sweep, double t, const Eigen::VectorXcd& in,
                 Eigen::VectorXcd& out, bool parallel = true);

Eigen::MatrixXd sweep_dense(const SweepHamiltonian& sweep, double t);

// coordinate-list dump ("row col value" per line) of H(t)
void dump_coordinate_list(std::ostream& os, const SweepHamiltonian& sweep, double t);

} // namespace qsvp
