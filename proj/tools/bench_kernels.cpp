// Timing comparison of the serial reference kernels against the OpenMP ones:
// raw sweep application and a full short evolution.

#include "qsvp/svp.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>

using namespace qsvp;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

SweepHamiltonian build_system(int n, std::int64_t m, std::uint64_t seed) {
    Rng rng(seed);
    const auto basis = random_basis_uniform(n, rng, 8);
    FockBasis fock(m * (n + 1), n + 1);
    const OffsetConfig cfg{m, n, true};
    auto hp = build_problem_diagonal(fock, basis, cfg);
    apply_gap_anchor(hp, 1.0);
    return make_sweep(build_tunnelling(fock), std::move(hp), 1.0);
}

void bench_matvec(const SweepHamiltonian& sweep, const char* label, int reps) {
    Eigen::VectorXcd in = Eigen::VectorXcd::Random(sweep.h0.dim);
    in.normalize();
    Eigen::VectorXcd out(in.size());

    auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) sweep_apply_serial(sweep, 0.5, in, out);
    const double serial = seconds_since(t0);

    t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) sweep_apply_omp(sweep, 0.5, in, out);
    const double parallel = seconds_since(t0);

    std::printf("%-28s D=%6lld reps=%5d serial %8.3f ms  omp %8.3f ms  speedup %.2fx\n", label,
                static_cast<long long>(sweep.h0.dim), reps, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

void bench_evolution(const SweepHamiltonian& sweep, const char* label, std::int64_t steps) {
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(sweep.h0.dim);
    psi0[0] = 1.0;

    EvolveOptions serial_opts;
    serial_opts.steps = steps;
    serial_opts.parallel = false;
    auto t0 = clock_type::now();
    const auto a = evolve(sweep, psi0, serial_opts);
    const double serial = seconds_since(t0);

    EvolveOptions parallel_opts;
    parallel_opts.steps = steps;
    parallel_opts.parallel = true;
    t0 = clock_type::now();
    const auto b = evolve(sweep, psi0, parallel_opts);
    const double parallel = seconds_since(t0);

    const double diff = (a.final_probabilities - b.final_probabilities).cwiseAbs().maxCoeff();
    std::printf("%-28s D=%6lld steps=%4lld serial %8.3f ms  omp %8.3f ms  speedup %.2fx  |diff| %.1e\n",
                label, static_cast<long long>(sweep.h0.dim), static_cast<long long>(steps),
                serial * 1e3, parallel * 1e3, serial / parallel, diff);
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) omp_set_num_threads(std::atoi(argv[1]));
    std::printf("threads: %d\n", omp_get_max_threads());

    const auto small = build_system(2, 3, 9001);  // D = 55
    const auto medium = build_system(3, 4, 9002); // D = 969
    const auto large = build_system(4, 4, 9003);  // D = 10626

    bench_matvec(small, "sweep apply (2D, m=3)", 20000);
    bench_matvec(medium, "sweep apply (3D, m=4)", 5000);
    bench_matvec(large, "sweep apply (4D, m=4)", 500);

    bench_evolution(small, "evolution (2D, m=3)", 2000);
    bench_evolution(medium, "evolution (3D, m=4)", 500);
    return 0;
}
