#include "doctest.h"

#include "qsvp/evolution.hpp"

#include <Eigen/Eigenvalues>

using namespace qsvp;

namespace {

Basis make_basis(const std::vector<std::vector<long long>>& rows) {
    IntMat m;
    for (const auto& r : rows) {
        IntVec row;
        for (auto v : r) row.emplace_back(v);
        m.push_back(std::move(row));
    }
    return Basis(std::move(m));
}

const Basis kAppendixBad = make_basis({{1, 2}, {0, -2}});

SweepHamiltonian appendix_sweep(double total_time) {
    FockBasis basis(2, 2);
    return build_sweep_hamiltonian(basis, kAppendixBad, OffsetConfig{0, 2, false}, total_time);
}

// reference propagator: dense eigendecomposition of H at the same midpoints
StateVector dense_reference_evolve(const SweepHamiltonian& sweep, StateVector psi,
                                   std::int64_t steps) {
    const double dt = sweep.total_time / static_cast<double>(steps);
    for (std::int64_t s = 0; s < steps; ++s) {
        const Eigen::MatrixXd h = sweep_dense(sweep, (s + 0.5) * dt);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
        Eigen::VectorXcd phases(h.rows());
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            phases[i] = std::exp(std::complex<double>(0, -eig.eigenvalues()[i] * dt));
        psi = eig.eigenvectors().cast<std::complex<double>>() *
              phases.cwiseProduct(eig.eigenvectors().transpose().cast<std::complex<double>>() * psi);
    }
    return psi;
}

} // namespace

TEST_CASE("initial ground state closed form") {
    SUBCASE("two particles on two sites") {
        FockBasis basis(2, 2);
        const auto psi = initial_ground_state(basis);
        CHECK(std::abs(psi[0] - 0.5) < 1e-12);
        CHECK(std::abs(psi[1] - std::sqrt(0.5)) < 1e-12);
        CHECK(std::abs(psi[2] - 0.5) < 1e-12);
    }
    SUBCASE("single particle on two sites") {
        FockBasis basis(1, 2);
        const auto psi = initial_ground_state(basis);
        CHECK(std::abs(psi[0] - std::sqrt(0.5)) < 1e-12);
        CHECK(std::abs(psi[1] - std::sqrt(0.5)) < 1e-12);
    }
    SUBCASE("single site holds everything") {
        FockBasis basis(7, 1);
        const auto psi = initial_ground_state(basis);
        REQUIRE(psi.size() == 1);
        CHECK(std::abs(psi[0] - 1.0) < 1e-15);
    }
}

TEST_CASE("initial ground state matches dense diagonalisation") {
    for (const auto& [k, m] : std::vector<std::pair<std::int64_t, int>>{{9, 3}, {16, 4}, {5, 5}, {3, 6}}) {
        FockBasis basis(k, m);
        const auto h0 = build_tunnelling(basis);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((Eigen::MatrixXd(h0.matrix)));
        const Eigen::VectorXd ground = eig.eigenvectors().col(0);
        const auto psi = initial_ground_state(basis);
        double overlap = 0;
        for (Eigen::Index i = 0; i < psi.size(); ++i) overlap += ground[i] * std::real(psi[i]);
        CHECK(std::abs(overlap) >= 1.0 - 1e-10);
        // and it is an eigenvector with the minimal eigenvalue
        Eigen::VectorXcd h_psi = Eigen::MatrixXd(h0.matrix) * psi;
        CHECK((h_psi - eig.eigenvalues()[0] * psi).norm() < 1e-9);
    }
}

TEST_CASE("measure_probabilities") {
    StateVector basis_state = StateVector::Zero(5);
    basis_state[3] = 1.0;
    const auto p = measure_probabilities(basis_state);
    CHECK(p[3] == doctest::Approx(1.0));
    CHECK(p.sum() == doctest::Approx(1.0));

    FockBasis two_two(2, 2);
    const auto psi0 = initial_ground_state(two_two);
    const auto p0 = measure_probabilities(psi0);
    CHECK(p0[0] == doctest::Approx(0.25));
    CHECK(p0[1] == doctest::Approx(0.5));
    CHECK(p0[2] == doctest::Approx(0.25));

    StateVector uniform = StateVector::Constant(8, std::complex<double>(std::sqrt(1.0 / 8.0), 0));
    for (double v : measure_probabilities(uniform)) CHECK(v == doctest::Approx(0.125));

    StateVector bad = StateVector::Constant(4, std::complex<double>(1.0, 0));
    CHECK_THROWS_AS(measure_probabilities(bad), std::invalid_argument);
}

TEST_CASE("evolution limits") {
    SUBCASE("no time to evolve") {
        auto sweep = appendix_sweep(1e-6);
        const auto psi0 = initial_ground_state(FockBasis(2, 2));
        EvolveOptions opts;
        opts.steps = 1;
        const auto result = evolve(sweep, psi0, opts);
        REQUIRE(result.valid);
        const auto p0 = measure_probabilities(psi0);
        CHECK((result.final_probabilities - p0).cwiseAbs().maxCoeff() < 1e-4);
    }
    SUBCASE("stationary state under a frozen tunnelling sweep") {
        // zero problem diagonal: H(t) = f(t) H0 has time-independent
        // eigenvectors, so the ground state only picks up a phase
        FockBasis basis(2, 2);
        auto h0 = build_tunnelling(basis);
        ProblemDiagonal hp;
        hp.exact_energies.assign(3, BigInt(0));
        hp.scaled_energies = Eigen::VectorXd::Zero(3);
        auto sweep = make_sweep(std::move(h0), std::move(hp), 5.0);
        const auto psi0 = initial_ground_state(basis);
        EvolveOptions opts;
        opts.steps = 2000;
        const auto result = evolve(sweep, psi0, opts);
        REQUIRE(result.valid);
        CHECK((result.final_probabilities - measure_probabilities(psi0)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("appendix run reaches the shortest-vector state") {
    auto sweep = appendix_sweep(2.0);
    const auto psi0 = initial_ground_state(FockBasis(2, 2));
    const auto result = evolve(sweep, psi0);
    REQUIRE(result.valid);
    CHECK(result.norm_drift < 1e-6);
    // converged value for the consistent (20,1,16) diagonal, confirmed by
    // dense-exponential and RK4 references; the matrix printed in the
    // source example (with -8 in the middle) would give 0.8527
    CHECK(result.final_probabilities[1] == doctest::Approx(0.892777).epsilon(1e-3));
    CHECK(result.final_probabilities[1] > 0.85); // |11> decodes to (1,0)

    SUBCASE("halving the step count moves nothing") {
        EvolveOptions half;
        half.steps = default_steps(2.0) / 2;
        const auto coarse = evolve(sweep, psi0, half);
        CHECK((coarse.final_probabilities - result.final_probabilities).cwiseAbs().maxCoeff() < 1e-4);
    }
    SUBCASE("krylov matches a dense-exponential reference at identical midpoints") {
        EvolveOptions opts;
        opts.steps = 1000;
        const auto krylov = evolve(sweep, psi0, opts);
        const auto reference = dense_reference_evolve(sweep, psi0, 1000);
        CHECK((krylov.final_probabilities - reference.cwiseAbs2()).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("serial and parallel kernels produce identical results") {
        EvolveOptions serial_opts;
        serial_opts.steps = 500;
        serial_opts.parallel = false;
        EvolveOptions parallel_opts;
        parallel_opts.steps = 500;
        parallel_opts.parallel = true;
        const auto a = evolve(sweep, psi0, serial_opts);
        const auto b = evolve(sweep, psi0, parallel_opts);
        CHECK((a.final_probabilities - b.final_probabilities).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("trajectory snapshots") {
    auto sweep = appendix_sweep(2.0);
    const auto psi0 = initial_ground_state(FockBasis(2, 2));
    EvolveOptions opts;
    opts.steps = 400;
    opts.snapshots = 21;
    opts.spectrum_levels = 2;
    const auto result = evolve(sweep, psi0, opts);
    REQUIRE(result.trajectory.size() == 21);
    CHECK(result.trajectory.front().first == 0.0);
    CHECK(result.trajectory.back().first == doctest::Approx(2.0));
    for (const auto& [t, probs] : result.trajectory) CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(result.spectrum_track.size() == 21);
    // the instantaneous gap stays positive through the sweep interior
    for (const auto& [t, levels] : result.spectrum_track) {
        if (t > 0.0 && t < 2.0) CHECK(levels[1] - levels[0] > 0.0);
    }
}

TEST_CASE("instantaneous spectrum") {
    auto sweep = appendix_sweep(2.0);
    const auto start = instantaneous_spectrum(sweep, 0.0, 3);
    CHECK(start[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(start[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(start[2] == doctest::Approx(2.0).epsilon(1e-12));

    const auto end = instantaneous_spectrum(sweep, 2.0, 3);
    CHECK(end[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(end[1] == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(end[2] == doctest::Approx(20.0).epsilon(1e-12));

    SUBCASE("lanczos fallback agrees with the dense solver") {
        Rng rng(7);
        FockBasis basis(8, 4); // D = 165
        auto big = build_sweep_hamiltonian(basis, random_basis_uniform(3, rng),
                                           OffsetConfig{2, 3, true}, 1.0);
        const auto dense = instantaneous_spectrum(big, 0.4, 4);
        const auto lanczos = instantaneous_spectrum(big, 0.4, 4, /*dense_cap=*/10);
        for (int i = 0; i < 4; ++i) CHECK(lanczos[i] == doctest::Approx(dense[i]).epsilon(1e-9));
    }
}

TEST_CASE("ground energy is continuous along the sweep") {
    auto sweep = appendix_sweep(2.0);
    double previous = instantaneous_spectrum(sweep, 0.0, 1)[0];
    for (int i = 1; i <= 100; ++i) {
        const double t = 2.0 * i / 100.0;
        const double e0 = instantaneous_spectrum(sweep, t, 1)[0];
        CHECK(std::abs(e0 - previous) < 0.2); // bounded slope, no jumps
        previous = e0;
    }
}

TEST_CASE("rank classes") {
    SUBCASE("appendix grouping without offset") {
        FockBasis basis(2, 2);
        const OffsetConfig cfg{0, 2, false};
        Eigen::VectorXd probs(3);
        probs << 0.2, 0.5, 0.3;
        const auto table = rank_classes(basis, kAppendixBad, cfg, probs);
        REQUIRE(table.classes.size() == 3);
        CHECK(table.classes[0].norm_sq == 1);
        CHECK(table.classes[0].vectors.front() == IntVec{1, 0});
        CHECK(table.classes[0].probability == doctest::Approx(0.5));
        CHECK(table.classes[1].norm_sq == 16);
        CHECK(table.classes[1].vectors.front() == IntVec{0, -4});
        CHECK(table.classes[2].norm_sq == 20);
        CHECK(table.classes[2].vectors.front() == IntVec{2, 4});
        CHECK(table.zero_class() == nullptr);
        CHECK(table.lambda1_class()->rank == 0);
    }
    SUBCASE("single-run space pairs signs and starts at zero") {
        const std::int64_t m = 2;
        FockBasis basis(m * 3, 3);
        const OffsetConfig cfg{m, 2, true};
        const auto psi = initial_ground_state(basis);
        const auto table = rank_classes(basis, kAppendixBad, cfg, measure_probabilities(psi));
        REQUIRE(table.zero_class() != nullptr);
        CHECK(table.classes[0].norm_sq == 0);
        CHECK(table.classes[0].rank == 0);
        double total = 0;
        for (const auto& c : table.classes) {
            total += c.probability;
            // any vector with coefficients within the offset box appears with both signs
            if (c.norm_sq != 0) {
                bool in_box = true;
                for (const auto& coord : c.vectors.front()) (void)coord;
                const auto x = coeff_of_vector(kAppendixBad, c.vectors.front());
                for (auto v : x) in_box = in_box && std::abs(v) <= m;
                std::int64_t coeff_sum = 0;
                for (auto v : x) coeff_sum += v;
                // reachable both ways only if the reservoir can absorb the slack
                if (in_box && std::abs(coeff_sum) <= m) CHECK(c.vectors.size() == 2);
            }
            // member probabilities sum to the class probability by construction
            double member_total = 0;
            for (auto idx : c.member_indices) member_total += measure_probabilities(psi)[idx];
            CHECK(member_total == doctest::Approx(c.probability));
        }
        CHECK(total == doctest::Approx(1.0));
        // lambda1 class matches the oracle
        const auto oracle = svp_enumerate(kAppendixBad);
        CHECK(table.lambda1_class()->norm_sq == oracle.lambda1_sq);
    }
    SUBCASE("norms strictly increase over ranks for distinct classes") {
        FockBasis basis(6, 3);
        const OffsetConfig cfg{2, 2, true};
        Eigen::VectorXd uniform = Eigen::VectorXd::Constant(basis.size(), 1.0 / basis.size());
        const auto table = rank_classes(basis, identity_basis(2), cfg, uniform);
        for (std::size_t i = 1; i < table.classes.size(); ++i)
            CHECK(table.classes[i].norm_sq >= table.classes[i - 1].norm_sq);
    }
}
