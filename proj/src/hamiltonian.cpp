#include "qsvp/hamiltonian.hpp"

#include <cmath>
#include <ostream>
#include <vector>

namespace qsvp {

TunnellingMatrix build_tunnelling(const FockBasis& basis) {
    const std::int64_t d = basis.size();
    const int m = basis.sites();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(d) * 2 * std::max(m - 1, 1));
    std::vector<std::uint32_t> neighbour(m);
    for (std::int64_t r = 0; r < d; ++r) {
        const auto state = basis.state(r);
        for (int site = 0; site + 1 < m; ++site) {
            if (state[site] == 0) continue;
            std::copy(state.begin(), state.end(), neighbour.begin());
            --neighbour[site];
            ++neighbour[site + 1];
            const std::int64_t nb = basis.rank(neighbour);
            const double amplitude =
                -std::sqrt(static_cast<double>(state[site]) * (state[site + 1] + 1.0));
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(nb), amplitude);
            triplets.emplace_back(static_cast<int>(nb), static_cast<int>(r), amplitude);
        }
    }
    TunnellingMatrix h0;
    h0.dim = d;
    h0.matrix.resize(d, d);
    h0.matrix.setFromTriplets(triplets.begin(), triplets.end());
    h0.matrix.makeCompressed();
    return h0;
}

IntMat augment_basis(const Basis& basis) {
    IntMat rows = basis.rows;
    rows.emplace_back(basis.dim, BigInt(0));
    return rows;
}

IntMat gram_of_rows(const IntMat& rows) {
    const std::size_t r = rows.size();
    IntMat g(r, IntVec(r, 0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) {
            BigInt dot = 0;
            for (std::size_t k = 0; k < rows[i].size(); ++k) dot += rows[i][k] * rows[j][k];
            g[i][j] = dot;
            g[j][i] = dot;
        }
    return g;
}

ProblemDiagonal build_problem_diagonal(const FockBasis& basis, const Basis& lattice_basis,
                                       const OffsetConfig& cfg, const SpectrumScale& scale) {
    if (basis.sites() != cfg.total_sites())
        throw std::invalid_argument("build_problem_diagonal: Fock sites do not match the configuration");
    if (cfg.n_lattice_sites != lattice_basis.dim)
        throw std::invalid_argument("build_problem_diagonal: lattice dimension mismatch");

    const auto g = gram(lattice_basis);
    ProblemDiagonal hp;
    hp.exact_energies.resize(basis.size());
    for (std::int64_t r = 0; r < basis.size(); ++r) {
        const auto x = fock_to_coeff(basis.state(r), cfg);
        hp.exact_energies[r] = norm_sq(x, g); // reservoir row is zero, contributes nothing
    }
    BigInt gram_total = 0;
    for (const auto& row : g.entries)
        for (const auto& e : row) gram_total += e;
    hp.constant_shift = BigInt(cfg.m) * BigInt(cfg.m) * gram_total;

    auto [scaled, factor] = scale_spectrum(hp.exact_energies, scale.target_max);
    hp.scaled_energies = std::move(scaled);
    hp.scale_factor = factor;
    return hp;
}

PhysicalDecomposition physical_decomposition(const IntMat& gram_prime, const OffsetConfig& cfg) {
    const int m = static_cast<int>(gram_prime.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
            if (gram_prime[i][j] != gram_prime[j][i])
                throw std::invalid_argument("physical_decomposition: asymmetric interaction matrix");

    PhysicalDecomposition d;
    d.v.resize(m, m);
    d.mu.resize(m);
    BigInt total = 0;
    for (int i = 0; i < m; ++i) {
        BigInt row_sum = 0;
        for (int j = 0; j < m; ++j) {
            d.v(i, j) = gram_prime[i][j].convert_to<double>();
            row_sum += gram_prime[i][j];
            total += gram_prime[i][j];
        }
        // onsite energy reduced by the offset-weighted row sum
        d.mu(i) = BigInt(gram_prime[i][i] - 2 * cfg.m * row_sum).convert_to<double>();
    }
    d.constant = BigInt(BigInt(cfg.m) * BigInt(cfg.m) * total).convert_to<double>();
    return d;
}

std::pair<Eigen::VectorXd, double> scale_spectrum(const IntVec& exact_energies, double target_max) {
    if (exact_energies.empty()) throw std::invalid_argument("scale_spectrum: empty spectrum");
    if (target_max <= 0) throw std::invalid_argument("scale_spectrum: target must be positive");
    BigInt max_energy = 0;
    for (const auto& e : exact_energies)
        if (e > max_energy) max_energy = e;
    if (max_energy == 0) throw std::invalid_argument("scale_spectrum: all-zero spectrum");
    const double factor = target_max / max_energy.convert_to<double>();
    Eigen::VectorXd scaled(static_cast<Eigen::Index>(exact_energies.size()));
    for (Eigen::Index i = 0; i < scaled.size(); ++i)
        scaled[i] = factor * exact_energies[static_cast<std::size_t>(i)].convert_to<double>();
    return {std::move(scaled), factor};
}

void apply_gap_anchor(ProblemDiagonal& hp, double anchor) {
    if (anchor <= 0) throw std::invalid_argument("apply_gap_anchor: anchor must be positive");
    const BigInt* lowest = nullptr;
    for (const auto& e : hp.exact_energies)
        if (!lowest || e < *lowest) lowest = &e;
    const BigInt* second = nullptr;
    for (const auto& e : hp.exact_energies)
        if (e != *lowest && (!second || e < *second)) second = &e;
    if (!lowest || !second) return; // flat spectrum, nothing to anchor
    const double gap = BigInt(*second - *lowest).convert_to<double>();
    const double factor = anchor / gap;
    hp.scale_factor = factor;
    for (Eigen::Index i = 0; i < hp.scaled_energies.size(); ++i)
        hp.scaled_energies[i] = factor * hp.exact_energies[static_cast<std::size_t>(i)].convert_to<double>();
}

SweepHamiltonian make_sweep(TunnellingMatrix h0, ProblemDiagonal hp, double total_time,
                            Schedule schedule) {
    if (total_time <= 0) throw std::invalid_argument("make_sweep: sweep length must be positive");
    if (h0.dim != hp.scaled_energies.size())
        throw std::invalid_argument("make_sweep: operator dimensions do not match");
    if (std::abs(schedule.f(0.0) - 1.0) > 1e-12 || std::abs(schedule.g(0.0)) > 1e-12 ||
        std::abs(schedule.f(1.0)) > 1e-12 || std::abs(schedule.g(1.0) - 1.0) > 1e-12)
        throw std::invalid_argument("make_sweep: schedule must satisfy f(0)=1, g(0)=0, f(1)=0, g(1)=1");
    SweepHamiltonian sweep;
    sweep.h0 = std::move(h0);
    sweep.hp = std::move(hp);
    sweep.total_time = total_time;
    sweep.schedule = std::move(schedule);
    return sweep;
}

SweepHamiltonian build_sweep_hamiltonian(const FockBasis& basis, const Basis& lattice_basis,
                                         const OffsetConfig& cfg, double total_time,
                                         const SpectrumScale& scale, Schedule schedule) {
    return make_sweep(build_tunnelling(basis), build_problem_diagonal(basis, lattice_basis, cfg, scale),
                      total_time, std::move(schedule));
}

namespace {

void check_time(const SweepHamiltonian& sweep, double t) {
    const double slack = 1e-9 * std::max(1.0, sweep.total_time);
    if (t < -slack || t > sweep.total_time + slack)
        throw std::domain_error("sweep_apply: t outside [0, T]");
}

} // namespace

void sweep_apply_serial(const SweepHamiltonian& sweep, double t, const Eigen::VectorXcd& in,
                        Eigen::VectorXcd& out) {
    check_time(sweep, t);
    const double s = t / sweep.total_time;
    const double f = sweep.schedule.f(s);
    const double g = sweep.schedule.g(s);
    const auto& h0 = sweep.h0.matrix;
    out.resize(in.size());
    const auto* values = h0.valuePtr();
    const auto* inner = h0.innerIndexPtr();
    const auto* outer = h0.outerIndexPtr();
    for (Eigen::Index row = 0; row < in.size(); ++row) {
        std::complex<double> acc(0.0, 0.0);
        for (auto k = outer[row]; k < outer[row + 1]; ++k) acc += values[k] * in[inner[k]];
        out[row] = f * acc + g * sweep.hp.scaled_energies[row] * in[row];
    }
}

void sweep_apply_omp(const SweepHamiltonian& sweep, double t, const Eigen::VectorXcd& in,
                     Eigen::VectorXcd& out) {
    check_time(sweep, t);
    const double s = t / sweep.total_time;
    const double f = sweep.schedule.f(s);
    const double g = sweep.schedule.g(s);
    const auto& h0 = sweep.h0.matrix;
    out.resize(in.size());
    const auto* values = h0.valuePtr();
    const auto* inner = h0.innerIndexPtr();
    const auto* outer = h0.outerIndexPtr();
    const Eigen::Index n = in.size();
#pragma omp parallel for schedule(static)
    for (Eigen::Index row = 0; row < n; ++row) {
        std::complex<double> acc(0.0, 0.0);
        for (auto k = outer[row]; k < outer[row + 1]; ++k) acc += values[k] * in[inner[k]];
        out[row] = f * acc + g * sweep.hp.scaled_energies[row] * in[row];
    }
}

void sweep_apply(const SweepHamiltonian& sweep, double t, const Eigen::VectorXcd& in,
                 Eigen::VectorXcd& out, bool parallel) {
    // below the crossover the fork/join overhead dwarfs the row work
    constexpr Eigen::Index kParallelThreshold = 4096;
    if (parallel && in.size() >= kParallelThreshold)
        sweep_apply_omp(sweep, t, in, out);
    else
        sweep_apply_serial(sweep, t, in, out);
}

Eigen::MatrixXd sweep_dense(const SweepHamiltonian& sweep, double t) {
    check_time(sweep, t);
    const double s = t / sweep.total_time;
    Eigen::MatrixXd h = sweep.schedule.f(s) * Eigen::MatrixXd(sweep.h0.matrix);
    h.diagonal() += sweep.schedule.g(s) * sweep.hp.scaled_energies;
    return h;
}

void dump_coordinate_list(std::ostream& os, const SweepHamiltonian& sweep, double t) {
    check_time(sweep, t);
    const double s = t / sweep.total_time;
    const double f = sweep.schedule.f(s);
    const double g = sweep.schedule.g(s);
    char line[96];
    for (Eigen::Index row = 0; row < sweep.h0.dim; ++row) {
        double diag = g * sweep.hp.scaled_energies[row];
        for (SparseRowMatrix::InnerIterator it(sweep.h0.matrix, row); it; ++it) {
            if (it.col() == row) {
                diag += f * it.value();
                continue;
            }
            const double v = f * it.value();
            if (v == 0.0) continue;
            std::snprintf(line, sizeof line, "%lld %lld %.17g\n", static_cast<long long>(row),
                          static_cast<long long>(it.col()), v);
            os << line;
        }
        if (diag != 0.0) {
            std::snprintf(line, sizeof line, "%lld %lld %.17g\n", static_cast<long long>(row),
                          static_cast<long long>(row), diag);
            os << line;
        }
    }
}

} // namespace qsvp
