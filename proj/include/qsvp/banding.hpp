#pragma once

#include "qsvp/lattice.hpp"

#include <vector>

namespace qsvp {

struct BandedBasis {
    Basis basis;
    int bandwidth = 0;        // max over rows of (rightmost nonzero column - row index)
    BigInt volume_factor = 1; // |det out| / |det in| = 2^scalings
    int scalings = 0;         // multiply-by-2 events
    std::vector<int> eliminated_extents; // band extent of each row that was rewritten
    int stuck_rows = 0;       // rows whose far entries could not be cleared
};

struct BandProfile {
    // entry d: mean |entry| at diagonal offset d across the ensemble,
    // normalised by the mean diagonal magnitude (so entry 0 is 1)
    std::vector<double> mean_abs_entry_by_offset;
};

struct BezoutCombo {
    BigInt delta;
    IntVec coeffs; // delta * sum_i coeffs[i]*targets[i] = goal
};

// Iterated extended Euclid in canonical minimal-remainder form.
BezoutCombo bezout_combo(const IntVec& targets, const BigInt& goal);

struct BandingOptions {
    int j_max = 6;              // widest helper window
    int tight_extent = 3;       // prefer a factor-2 scaling over bands wider than this
    int max_scalings_per_row = 3;
    int max_passes_per_row = 4; // refill chasing cap for multi-dense-column inputs
};

// Appendix-style elimination of far off-diagonal entries of an HNF basis via
// gcd row combinations; rows are scaled by 2 when a parity obstruction would
// otherwise force a wide band.
BandedBasis band_diagonalise(const Basis& hnf_basis, const BandingOptions& opts = {});

inline BandedBasis band_diagonalise(const Basis& hnf_basis, int j_max) {
    BandingOptions opts;
    opts.j_max = j_max;
    return band_diagonalise(hnf_basis, opts);
}

BandProfile band_profile(const std::vector<BandedBasis>& ensemble);

} // namespace qsvp
