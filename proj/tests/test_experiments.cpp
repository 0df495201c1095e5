#include "doctest.h"

#include "qsvp/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

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

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream buffer;
    buffer << is.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("kgrowth statistics") {
    ExperimentConfig cfg;
    cfg.dims = {2, 3, 4};
    cfg.ensemble = 12;
    cfg.seed = 5;
    const auto result = exp_kgrowth(cfg);
    REQUIRE(result.rows.size() == 3);
    for (const auto& row : result.rows) {
        CHECK(row.mean_hnf_inf >= 1.0);
        CHECK(row.mean_lll_inf >= 1.0);
        // LLL bases are never worse than HNF bases here
        CHECK(row.mean_lll_inf <= row.mean_hnf_inf + 1e-9);
    }
    // deterministic reruns
    const auto again = exp_kgrowth(cfg);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        CHECK(result.rows[i].mean_hnf_inf == again.rows[i].mean_hnf_inf);
        CHECK(result.rows[i].mean_coeff_sum == again.rows[i].mean_coeff_sum);
    }
}

TEST_CASE("distribution cells are normalised and concentrate with slower sweeps") {
    ExperimentConfig cfg;
    cfg.dims = {2};
    cfg.ensemble = 6;
    cfg.t_grid = {0.5, 50.0};
    cfg.steps = 4000;
    cfg.seed = 11;
    const auto cells = exp_distributions(cfg, 10);
    REQUIRE(cells.size() == 2);
    for (const auto& cell : cells) {
        CHECK(cell.invalid_runs == 0);
        CHECK(cell.samples == 6);
        double total = cell.mean_tail;
        for (double p : cell.mean_rank_prob) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(cells[1].mean_rank_prob[0] > cells[0].mean_rank_prob[0]);
}

TEST_CASE("payoff cells") {
    ExperimentConfig cfg;
    cfg.dims = {2};
    cfg.ensemble = 6;
    cfg.t_grid = {0.5, 50.0};
    cfg.steps = 4000;
    cfg.seed = 11;
    const auto cells = exp_payoff(cfg);
    REQUIRE(cells.size() == 2);
    for (const auto& cell : cells) {
        CHECK(cell.p10_p0 <= cell.mean_p0 + 1e-12);
        CHECK(cell.mean_p0 >= 0.0);
        CHECK(cell.mean_p1 >= 0.0);
        CHECK(cell.samples == 6);
    }
    CHECK(cells[1].mean_p0 > cells[0].mean_p0); // slower is more adiabatic
}

TEST_CASE("energy level tracking") {
    SUBCASE("appendix system hits the exact final gaps") {
        const auto result = exp_energy_levels(kAppendixBad, 0, 2.0, 3, 2000, /*anchor=*/0.0,
                                              /*k_override=*/2);
        REQUIRE(!result.times.empty());
        const auto& final_gaps = result.gaps.back();
        CHECK(final_gaps[0] == doctest::Approx(0.0));
        CHECK(final_gaps[1] == doctest::Approx(15.0).epsilon(1e-9));
        CHECK(final_gaps[2] == doctest::Approx(19.0).epsilon(1e-9));
        for (std::size_t s = 0; s < result.times.size(); ++s) {
            CHECK(result.gaps[s][0] == 0.0);
            const double t = result.times[s];
            if (t > 0.0 && t < 2.0) CHECK(result.gaps[s][1] > 0.0);
            double total = 0;
            for (Eigen::Index i = 0; i < result.populations[s].size(); ++i) {
                CHECK(result.populations[s][i] >= -1e-12);
                total += result.populations[s][i];
            }
            CHECK(total <= 1.0 + 1e-9);
        }
    }
    SUBCASE("reservoir system with offset") {
        const auto result = exp_energy_levels(kAppendixBad, 2, 0.25, 4, 2000);
        REQUIRE(!result.times.empty());
        CHECK(result.gaps.back()[1] == doctest::Approx(1.0).epsilon(1e-9)); // anchored bottom gap
    }
    SUBCASE("m = 0 needs a particle count") {
        CHECK_THROWS_AS(exp_energy_levels(kAppendixBad, 0, 1.0, 2), std::invalid_argument);
    }
}

TEST_CASE("banding experiment") {
    ExperimentConfig cfg;
    cfg.dims = {12};
    cfg.ensemble = 15;
    cfg.seed = 3;
    const auto result = exp_banding(cfg);
    CHECK(result.instances == 15);
    CHECK(result.profile.mean_abs_entry_by_offset[0] == doctest::Approx(1.0));
    for (const auto& v : result.volume_factors) {
        // powers of two
        BigInt f = v;
        while (f > 1) {
            CHECK(f % 2 == 0);
            f /= 2;
        }
    }
    CHECK(result.mean_volume_factor >= 1.0);
    CHECK(result.fraction_extent_le3 > 0.5);

    ExperimentConfig too_big;
    too_big.dims = {61};
    CHECK_THROWS_AS(exp_banding(too_big), CapExceeded);
}

TEST_CASE("appendix demonstration") {
    const auto result = exp_appendix_c(2.0, 4000);
    CHECK(result.gram_matrix == make_basis({{5, -4}, {-4, 4}}).rows);
    CHECK(result.h0_offdiag_error < 1e-12);
    CHECK(result.psi0_error < 1e-12);
    CHECK(result.p11_final == doctest::Approx(0.892777).epsilon(1e-3));
    CHECK(result.decoded_vector == IntVec{1, 0});
    CHECK(result.decoded_is_shortest);
    CHECK(result.norm_drift < 1e-6);
    REQUIRE(result.trajectory.size() == 200);
}

TEST_CASE("experiment output files are byte-identical across reruns") {
    ExperimentConfig cfg;
    cfg.dims = {2};
    cfg.ensemble = 4;
    cfg.t_grid = {0.5, 5.0};
    cfg.steps = 2000;
    cfg.seed = 77;
    cfg.format = "svg";

    const auto dir_a = std::filesystem::temp_directory_path() / "qsvp_exp_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "qsvp_exp_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);

    write_distributions(dir_a, exp_distributions(cfg, 8), cfg.format);
    write_payoff(dir_a, exp_payoff(cfg), cfg.format);
    write_distributions(dir_b, exp_distributions(cfg, 8), cfg.format);
    write_payoff(dir_b, exp_payoff(cfg), cfg.format);

    for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
        const auto name = entry.path().filename();
        CAPTURE(name.string());
        CHECK(slurp(entry.path()) == slurp(dir_b / name));
        CHECK(!slurp(entry.path()).empty());
    }
    // and the curves CSV exists with a header
    CHECK(slurp(dir_a / "payoff.csv").starts_with("dim,T,mean_p0"));
}
