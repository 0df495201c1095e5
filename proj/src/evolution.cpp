#include "qsvp/evolution.hpp"

#include "qsvp/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace qsvp {

StateVector initial_ground_state(const FockBasis& basis) {
    const int m = basis.sites();
    const std::int64_t k = basis.particles();
    // lowest mode of the open chain, strictly positive
    Eigen::VectorXd mode(m);
    for (int i = 0; i < m; ++i) mode[i] = std::sin((i + 1) * std::numbers::pi / (m + 1));
    mode.normalize();

    StateVector psi(basis.size());
    const double log_k_factorial = std::lgamma(static_cast<double>(k) + 1.0);
    for (std::int64_t r = 0; r < basis.size(); ++r) {
        const auto state = basis.state(r);
        double log_amp = 0.5 * log_k_factorial;
        for (int i = 0; i < m; ++i) {
            log_amp -= 0.5 * std::lgamma(static_cast<double>(state[i]) + 1.0);
            if (state[i] > 0) log_amp += state[i] * std::log(mode[i]);
        }
        psi[r] = std::exp(log_amp);
    }
    psi.normalize();
    return psi;
}

Eigen::VectorXd measure_probabilities(const StateVector& psi) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("measure_probabilities: state is not normalised");
    return psi.cwiseAbs2();
}

std::int64_t default_steps(double total_time) {
    return std::max<std::int64_t>(10000, static_cast<std::int64_t>(std::ceil(500.0 * total_time)));
}

namespace {

// One short-step propagation psi <- exp(-i H dt) psi in the Krylov subspace
// built at fixed H = H(t_mid). Workspace is reused across steps.
class KrylovPropagator {
  public:
    KrylovPropagator(const SweepHamiltonian& sweep, const EvolveOptions& opts)
        : sweep_(sweep), opts_(opts) {
        const auto d = sweep.h0.dim;
        const int cap = static_cast<int>(std::min<std::int64_t>(opts.krylov_max, d));
        v_.assign(cap + 1, StateVector(d));
        w_.resize(d);
        alpha_.resize(cap);
        beta_.resize(cap + 1);
    }

    void step(StateVector& psi, double t_mid, double dt) { step_impl(psi, t_mid, dt, 0); }

  private:
    // exp(-i H dt) = exp(-i H dt/2)^2 at a fixed midpoint Hamiltonian, so a
    // step the subspace cannot resolve is split exactly, not approximated
    void step_impl(StateVector& psi, double t_mid, double dt, int depth) {
        const int cap = static_cast<int>(v_.size()) - 1;
        const double beta0 = psi.norm();
        v_[0] = psi / beta0;
        int m = 0;
        // truncation is bounded by the product of subdiagonals times dt^m/m!;
        // growing until that is tiny avoids an eigensolve per iteration
        double truncation = 1.0;
        bool converged = false;
        for (int j = 0; j < cap; ++j) {
            sweep_apply(sweep_, t_mid, v_[j], w_, opts_.parallel);
            const double alpha = std::real(v_[j].dot(w_));
            w_ -= alpha * v_[j];
            if (j > 0) w_ -= beta_[j] * v_[j - 1];
            // full reorthogonalisation; subspaces stay tiny
            for (int i = 0; i <= j; ++i) w_ -= v_[i].dot(w_) * v_[i];
            alpha_[j] = alpha;
            const double beta = w_.norm();
            beta_[j + 1] = beta;
            m = j + 1;
            if (beta < 1e-14) { // happy breakdown: subspace is invariant
                converged = true;
                break;
            }
            truncation *= beta * dt / m;
            if (m >= 2 && truncation < 0.1 * opts_.krylov_tolerance) {
                converged = true;
                break;
            }
            if (j + 1 < cap) v_[j + 1] = w_ / beta;
        }
        if (!converged && depth < 40) {
            step_impl(psi, t_mid, dt / 2, depth + 1);
            step_impl(psi, t_mid, dt / 2, depth + 1);
            return;
        }
        subspace_exponential(m, dt);
        psi.setZero(v_[0].size());
        for (int j = 0; j < m; ++j) psi += (beta0 * y_[j]) * v_[j];
    }

    // y = exp(-i T_m dt) e1 for the projected tridiagonal
    void subspace_exponential(int m, double dt) {
        diag_.resize(m);
        subdiag_.resize(std::max(m - 1, 0));
        for (int i = 0; i < m; ++i) diag_[i] = alpha_[i];
        for (int i = 0; i + 1 < m; ++i) subdiag_[i] = beta_[i + 1];
        solver_.computeFromTridiagonal(diag_, subdiag_);
        const auto& u = solver_.eigenvectors();
        Eigen::VectorXcd phases(m);
        for (int i = 0; i < m; ++i)
            phases[i] = std::exp(std::complex<double>(0.0, -solver_.eigenvalues()[i] * dt));
        y_ = u * phases.cwiseProduct(u.row(0).transpose().cast<std::complex<double>>());
    }

    const SweepHamiltonian& sweep_;
    const EvolveOptions& opts_;
    std::vector<StateVector> v_;
    StateVector w_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    Eigen::VectorXd diag_, subdiag_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
    Eigen::VectorXcd y_;
};

} // namespace

EvolutionResult evolve(const SweepHamiltonian& sweep, const StateVector& psi0,
                       const EvolveOptions& opts) {
    if (psi0.size() != sweep.h0.dim) throw std::invalid_argument("evolve: state dimension mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("evolve: initial state is not normalised");
    const std::int64_t steps = opts.steps > 0 ? opts.steps : default_steps(sweep.total_time);
    const double dt = sweep.total_time / static_cast<double>(steps);

    std::vector<std::int64_t> snapshot_steps;
    if (opts.snapshots > 0) {
        const int count = std::max(opts.snapshots, 2);
        snapshot_steps.reserve(count);
        for (int i = 0; i < count; ++i) {
            const auto s = static_cast<std::int64_t>(
                std::llround(static_cast<double>(i) * steps / (count - 1)));
            if (snapshot_steps.empty() || snapshot_steps.back() != s) snapshot_steps.push_back(s);
        }
    }

    EvolutionResult result;
    StateVector psi = psi0;
    KrylovPropagator propagator(sweep, opts);

    auto record = [&](std::int64_t step_index) {
        if (snapshot_steps.empty()) return;
        if (!std::binary_search(snapshot_steps.begin(), snapshot_steps.end(), step_index)) return;
        const double t = std::min(step_index * dt, sweep.total_time);
        result.trajectory.emplace_back(t, psi.cwiseAbs2());
        if (opts.spectrum_levels > 0)
            result.spectrum_track.emplace_back(t, instantaneous_spectrum(sweep, t, opts.spectrum_levels));
        if (opts.store_amplitudes) result.amplitude_trajectory.emplace_back(t, psi);
    };

    record(0);
    for (std::int64_t s = 0; s < steps; ++s) {
        propagator.step(psi, (s + 0.5) * dt, dt);
        record(s + 1);
    }

    result.norm_drift = std::abs(psi.norm() - 1.0);
    result.valid = result.norm_drift < opts.norm_tolerance;
    result.final_probabilities = psi.cwiseAbs2();
    return result;
}

Eigen::VectorXd instantaneous_spectrum(const SweepHamiltonian& sweep, double t, int k,
                                       std::int64_t dense_cap) {
    const auto d = sweep.h0.dim;
    if (k < 1 || k > d) throw std::invalid_argument("instantaneous_spectrum: bad level count");
    if (d <= dense_cap) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sweep_dense(sweep, t),
                                                           Eigen::EigenvaluesOnly);
        return eig.eigenvalues().head(k);
    }

    // Lanczos with full reorthogonalisation for the extremal end
    const int m = static_cast<int>(std::min<std::int64_t>(d, std::max(8 * k, 120)));
    std::vector<StateVector> v;
    v.reserve(m + 1);
    Rng rng(0x5eedULL); // fixed seed: deterministic spectra
    StateVector start(d);
    for (Eigen::Index i = 0; i < d; ++i) start[i] = std::complex<double>(rng.uniform01() - 0.5, 0.0);
    start.normalize();
    v.push_back(start);
    std::vector<double> alpha, beta;
    StateVector w(d);
    for (int j = 0; j < m; ++j) {
        sweep_apply(sweep, t, v[j], w, true);
        const double a = std::real(v[j].dot(w));
        alpha.push_back(a);
        w -= a * v[j];
        if (j > 0) w -= beta.back() * v[j - 1];
        for (int i = 0; i <= j; ++i) w -= v[i].dot(w) * v[i];
        const double b = w.norm();
        if (b < 1e-13) break;
        beta.push_back(b);
        if (j + 1 < m) v.push_back(w / b);
    }
    const int dim = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < dim) {
            tri(i, i + 1) = beta[i];
            tri(i + 1, i) = beta[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().head(k);
}

namespace {

IntVec negated(const IntVec& v) {
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
    return out;
}

// sign-canonical key: first nonzero coordinate positive
IntVec canonical_key(const IntVec& v) {
    for (const auto& c : v) {
        if (c > 0) return v;
        if (c < 0) return negated(v);
    }
    return v;
}

} // namespace

RankClassTable rank_classes(const FockBasis& basis, const Basis& lattice_basis,
                            const OffsetConfig& cfg, const Eigen::VectorXd& probabilities) {
    if (probabilities.size() != basis.size())
        throw std::invalid_argument("rank_classes: probability vector length mismatch");
    if (basis.sites() != cfg.total_sites() || cfg.n_lattice_sites != lattice_basis.dim)
        throw std::invalid_argument("rank_classes: configuration mismatch");

    struct Accumulator {
        BigInt norm_sq;
        std::set<IntVec> vectors;
        std::vector<std::int64_t> members;
        double probability = 0.0;
    };
    std::map<IntVec, Accumulator> groups;
    for (std::int64_t r = 0; r < basis.size(); ++r) {
        const auto x = fock_to_coeff(basis.state(r), cfg);
        auto vec = to_lattice_vector(x, lattice_basis);
        auto key = canonical_key(vec.coords);
        auto& acc = groups[std::move(key)];
        acc.norm_sq = vec.norm_sq;
        acc.vectors.insert(std::move(vec.coords));
        acc.members.push_back(r);
        acc.probability += probabilities[r];
    }

    RankClassTable table;
    table.classes.reserve(groups.size());
    for (auto& [key, acc] : groups) {
        RankClass c;
        c.norm_sq = acc.norm_sq;
        c.vectors.assign(acc.vectors.begin(), acc.vectors.end());
        c.member_indices = std::move(acc.members);
        c.probability = acc.probability;
        table.classes.push_back(std::move(c));
    }
    // order by norm, then by the sign-independent lexicographic minimum of
    // the class pair {v, -v}
    auto tie_key = [](const RankClass& c) {
        const auto neg = negated(c.vectors.front());
        return std::min(c.vectors.front(), neg);
    };
    std::sort(table.classes.begin(), table.classes.end(),
              [&](const RankClass& a, const RankClass& b) {
                  if (a.norm_sq != b.norm_sq) return a.norm_sq < b.norm_sq;
                  return tie_key(a) < tie_key(b);
              });
    for (std::size_t i = 0; i < table.classes.size(); ++i)
        table.classes[i].rank = static_cast<int>(i);
    return table;
}

} // namespace qsvp
