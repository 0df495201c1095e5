#include "qsvp/fock.hpp"

#include <cmath>
#include <numbers>

namespace qsvp {

BigInt dimension(std::int64_t particles, int sites) {
    if (particles < 0 || sites < 1) throw std::invalid_argument("dimension: need K >= 0, M >= 1");
    return binomial(particles + sites - 1, sites - 1);
}

BigInt dimension_single_run(std::int64_t k_s, int n) {
    if (k_s < 0 || n < 1) throw std::invalid_argument("dimension_single_run: need K_S >= 0, N >= 1");
    return binomial(k_s + n, n);
}

namespace {

// C(a, b) for the small b that appear in rank computations; intermediate
// products are kept in 128 bits
std::uint64_t binom_u64(std::int64_t a, std::int64_t b) {
    if (b < 0 || b > a) return 0;
    if (b > a - b) b = a - b;
    unsigned __int128 result = 1;
    for (std::int64_t i = 1; i <= b; ++i) {
        result = result * static_cast<unsigned __int128>(a - b + i) / static_cast<unsigned __int128>(i);
    }
    return static_cast<std::uint64_t>(result);
}

std::uint64_t states_u64(std::int64_t particles, int sites) { // dimension(), machine sized
    return binom_u64(particles + sites - 1, sites - 1);
}

} // namespace

FockBasis::FockBasis(std::int64_t particles, int sites, std::int64_t state_cap)
    : sites_(sites), particles_(particles) {
    if (sites < 1 || particles < 0) throw std::invalid_argument("FockBasis: need M >= 1, K >= 0");
    const BigInt d = dimension(particles, sites);
    if (d > state_cap)
        throw CapExceeded("FockBasis: " + d.str() + " states exceed the cap of " +
                          std::to_string(state_cap));
    dim_ = d.convert_to<std::int64_t>();
    states_.reserve(static_cast<std::size_t>(dim_) * sites_);

    std::vector<std::uint32_t> state(sites_, 0);
    state[0] = static_cast<std::uint32_t>(particles);
    while (true) {
        states_.insert(states_.end(), state.begin(), state.end());
        // lexicographically next-smaller composition
        int k = sites_ - 2;
        while (k >= 0 && state[k] == 0) --k;
        if (k < 0) break;
        --state[k];
        std::int64_t used = 0;
        for (int i = 0; i <= k; ++i) used += state[i];
        state[k + 1] = static_cast<std::uint32_t>(particles - used);
        for (int i = k + 2; i < sites_; ++i) state[i] = 0;
    }
}

std::int64_t FockBasis::rank(std::span<const std::uint32_t> occupancies) const {
    if (static_cast<int>(occupancies.size()) != sites_)
        throw std::invalid_argument("FockBasis::rank: wrong number of sites");
    std::int64_t remaining = particles_;
    std::int64_t acc = 0;
    for (int i = 0; i < sites_ - 1; ++i) {
        const std::int64_t n_i = occupancies[i];
        const int free_sites = sites_ - i - 1;
        // states whose occupancy at site i exceeds n_i come first
        if (remaining - n_i - 1 >= 0)
            acc += static_cast<std::int64_t>(binom_u64(remaining - n_i - 1 + free_sites, free_sites));
        remaining -= n_i;
    }
    return acc;
}

std::vector<std::uint32_t> FockBasis::unrank(std::int64_t index) const {
    if (index < 0 || index >= dim_) throw std::out_of_range("FockBasis::unrank: index out of range");
    std::vector<std::uint32_t> occ(sites_, 0);
    std::int64_t remaining = particles_;
    std::int64_t r = index;
    for (int i = 0; i < sites_ - 1; ++i) {
        const int free_sites = sites_ - i - 1;
        std::int64_t w = remaining;
        while (true) {
            const auto block = static_cast<std::int64_t>(states_u64(remaining - w, free_sites));
            if (r < block) break;
            r -= block;
            --w;
        }
        occ[i] = static_cast<std::uint32_t>(w);
        remaining -= w;
    }
    occ[sites_ - 1] = static_cast<std::uint32_t>(remaining);
    return occ;
}

CoeffVec fock_to_coeff(std::span<const std::uint32_t> occupancies, const OffsetConfig& cfg) {
    if (static_cast<int>(occupancies.size()) != cfg.total_sites())
        throw std::invalid_argument("fock_to_coeff: occupancy length does not match the configuration");
    CoeffVec x(cfg.n_lattice_sites);
    for (int i = 0; i < cfg.n_lattice_sites; ++i)
        x[i] = static_cast<std::int64_t>(occupancies[i]) - cfg.m;
    return x;
}

ScalingReport qubit_bound(int n, int c) {
    if (n < 2 || c < 1) throw std::invalid_argument("qubit_bound: need N >= 2, c >= 1");
    ScalingReport report;
    report.n = n;
    report.c = c;
    const std::int64_t k_s = static_cast<std::int64_t>(c) * n * n + static_cast<std::int64_t>(c) * n;
    report.exact_log2_d = log2_bigint(dimension_single_run(k_s, n));
    const double inner = std::numbers::e * (static_cast<double>(c) * n + c + 1);
    report.stirling_bound_log2 =
        n * std::log2(inner) - 0.5 * std::log2(2.0 * std::numbers::pi * n);
    return report;
}

std::string format_state(std::span<const std::uint32_t> occupancies) {
    std::string out = "(";
    for (std::size_t i = 0; i < occupancies.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(occupancies[i]);
    }
    out += ")";
    return out;
}

} // namespace qsvp
