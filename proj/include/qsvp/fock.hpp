#pragma once

#include "qsvp/lattice.hpp"
#include "qsvp/numeric.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qsvp {

// D = (K+M-1)! / (K! (M-1)!) for K particles in M sites, exact.
BigInt dimension(std::int64_t particles, int sites);

// (K_S+N)! / (K_S! N!) = sum_{K=0}^{K_S} dimension(K, N) (hockey stick).
BigInt dimension_single_run(std::int64_t k_s, int n);

// Ordered enumeration of K-particle occupation vectors over M sites,
// lexicographically descending, with an O(M) rank/unrank bijection built on
// the combinatorial number system. Ordering is platform-stable.
class FockBasis {
  public:
    static constexpr std::int64_t kDefaultStateCap = 2'000'000;

    FockBasis(std::int64_t particles, int sites, std::int64_t state_cap = kDefaultStateCap);

    int sites() const { return sites_; }
    std::int64_t particles() const { return particles_; }
    std::int64_t size() const { return dim_; }

    std::span<const std::uint32_t> state(std::int64_t index) const {
        return {states_.data() + static_cast<std::size_t>(index) * sites_, static_cast<std::size_t>(sites_)};
    }

    std::int64_t rank(std::span<const std::uint32_t> occupancies) const;
    std::vector<std::uint32_t> unrank(std::int64_t index) const;

  private:
    int sites_;
    std::int64_t particles_;
    std::int64_t dim_;
    std::vector<std::uint32_t> states_; // dim x sites, row major
};

// Offset/reservoir bookkeeping: coefficients are occupancies shifted by -m on
// the N lattice sites; the reservoir (site N+1, when present) is discarded.
struct OffsetConfig {
    std::int64_t m = 0;
    int n_lattice_sites = 0;
    bool has_reservoir = false;

    int total_sites() const { return n_lattice_sites + (has_reservoir ? 1 : 0); }
};

CoeffVec fock_to_coeff(std::span<const std::uint32_t> occupancies, const OffsetConfig& cfg);

struct ScalingReport {
    int n = 0;
    int c = 0;
    double exact_log2_d = 0;
    double stirling_bound_log2 = 0;
};

// Hilbert-space size of a Single-Run system with m = c*N, in qubit terms,
// against the closed-form Stirling upper bound.
ScalingReport qubit_bound(int n, int c);

std::string format_state(std::span<const std::uint32_t> occupancies);

} // namespace qsvp
