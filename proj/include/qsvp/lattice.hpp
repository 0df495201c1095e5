#pragma once

#include "qsvp/numeric.hpp"
#include "qsvp/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qsvp {

// Raised when a request exceeds a configured desk-scale cap (enumeration
// dimension, Hilbert space size, ...). The CLI maps this to exit code 3.
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// N x N integer row basis; row i is the basis vector b_i. Full rank is an
// invariant of every lattice this toolkit touches; operations that would be
// meaningless on a singular matrix detect and reject it.
struct Basis {
    IntMat rows;
    int dim = 0;

    Basis() = default;
    explicit Basis(IntMat r);

    const BigInt& at(int i, int j) const { return rows[i][j]; }
    BigInt& at(int i, int j) { return rows[i][j]; }
};

Basis identity_basis(int n);

// Symmetric positive definite matrix of pairwise row dot products.
struct GramMatrix {
    IntMat entries;
    int dim = 0;
};

// Integer coefficient vector x with v = x . B.
using CoeffVec = std::vector<std::int64_t>;

struct LatticeVector {
    IntVec coords;
    BigInt norm_sq;
};

// Exact rational Gram-Schmidt data: ortho_rows holds B*, mu the projection
// coefficients (mu[i][j] defined for j < i).
struct GramSchmidtData {
    RatMat ortho_rows;
    RatMat mu;
};

struct UnimodularMatrix {
    IntMat entries;
    int dim = 0;
};

// Certified SVP oracle output. `minimizers` is closed under negation; the
// canonical representative (lexicographically smallest minimizer whose
// leading nonzero coordinate is positive) defines the two summary statistics.
struct SvpResult {
    BigInt lambda1_sq;
    std::vector<CoeffVec> minimizers;
    CoeffVec canonical;
    std::int64_t inf_norm_xmin = 0;
    std::int64_t coeff_sum_abs = 0;
};

GramMatrix gram(const Basis& basis);

// ||x . B||^2 evaluated through the Gram matrix, exact.
BigInt norm_sq(const CoeffVec& x, const GramMatrix& gram_matrix);

// v = x . B together with its exact squared norm (direct route, used as the
// independent check against the Gram route).
LatticeVector to_lattice_vector(const CoeffVec& x, const Basis& basis);

BigInt determinant(const Basis& basis);

// Unique upper-triangular Hermite Normal Form basis of the same lattice.
Basis hnf(const Basis& basis);

GramSchmidtData gram_schmidt(const Basis& basis);

Basis lll_reduce(const Basis& basis, const BigRat& delta = BigRat(3, 4));

struct LllResult {
    Basis reduced;
    UnimodularMatrix transform; // reduced = transform . basis
};

LllResult lll_reduce_with_transform(const Basis& basis, const BigRat& delta = BigRat(3, 4));

// Product of `num_ops` elementary row additions (row_i += +-row_j).
UnimodularMatrix random_unimodular(int n, int num_ops, Rng& rng);

Basis scramble(const Basis& basis, const UnimodularMatrix& u);

// Random full-rank basis with i.i.d. entries uniform on [-entry_bound, entry_bound].
Basis random_basis_uniform(int n, Rng& rng, int entry_bound = 10);

// HNF basis with unit pivots except a single prime pivot p in the last row
// and a dense final column drawn uniformly from [0, p).
Basis random_basis_prime_hnf(int n, Rng& rng, std::int64_t p_min = 1000, std::int64_t p_max = 100000);

struct GoodBadPair {
    Basis good;
    Basis bad;
    UnimodularMatrix transform;
    double length_growth = 1.0; // mean row length of bad / mean row length of good
};

// Good basis plus a unimodular scramble of it; num_ops < 0 selects the
// per-dimension default tuned to land near the target length growth.
GoodBadPair random_good_bad_pair(int n, Rng& rng, int num_ops = -1);

int default_scramble_ops(int n);

// Exact shortest-vector oracle: depth-first enumeration over coefficient
// vectors with per-level bounds from the Gram-Schmidt norms of the
// LLL-reduced basis. Certified for dim <= dim_cap.
SvpResult svp_enumerate(const Basis& basis, int dim_cap = 10);

// Exact integer coefficients of a lattice vector; throws std::domain_error
// if v is not in the lattice spanned by basis.
CoeffVec coeff_of_vector(const Basis& basis, const IntVec& v);

} // namespace qsvp
