#include "doctest.h"

#include "qsvp/io.hpp"

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

} // namespace

TEST_CASE("basis text round trip") {
    const auto b = make_basis({{1, 2}, {0, -2}});
    std::stringstream buffer;
    write_basis_text(buffer, b);
    CHECK(buffer.str() == "2\n1 2\n0 -2\n");
    CHECK(read_basis_text(buffer).rows == b.rows);

    // huge entries survive exactly
    IntMat big(2, IntVec(2, 0));
    big[0][0] = BigInt("123456789012345678901234567890");
    big[0][1] = -1;
    big[1][1] = BigInt("99999999999999999999");
    const Basis huge(std::move(big));
    std::stringstream buffer2;
    write_basis_text(buffer2, huge);
    CHECK(read_basis_text(buffer2).rows == huge.rows);
}

TEST_CASE("basis json round trip") {
    const auto b = make_basis({{1, 2}, {0, -2}});
    CHECK(basis_from_json(basis_to_json(b)).rows == b.rows);

    IntMat big(2, IntVec(2, 0));
    big[0][0] = BigInt("-123456789012345678901234567890123");
    big[1][1] = 7;
    big[1][0] = 1;
    const Basis huge(std::move(big));
    CHECK(basis_from_json(basis_to_json(huge)).rows == huge.rows);
}

TEST_CASE("csv formatting is fixed") {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.cell("a").cell("b").cell("c");
    csv.end_row();
    csv.cell(1).cell(0.5).cell(BigInt("12345678901234567890"));
    csv.end_row();
    CHECK(os.str() == "a,b,c\n1,0.5,12345678901234567890\n");
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("experiment config") {
    ExperimentConfig cfg;
    cfg.name = "dist";
    cfg.dims = {2, 3};
    cfg.ensemble = 17;
    cfg.t_grid = {1, 10, 100};
    cfg.m_policy = "oracle";
    cfg.seed = 99;
    cfg.out_dir = "results";
    cfg.format = "json";
    cfg.jobs = 4;

    SUBCASE("round trips through its file format") {
        const auto parsed = ExperimentConfig::parse(cfg.to_string());
        CHECK(parsed.to_string() == cfg.to_string());
        CHECK(parsed.dims == cfg.dims);
        CHECK(parsed.ensemble == 17);
        CHECK(parsed.seed == 99);
        CHECK(parsed.m_policy == "oracle");
    }
    SUBCASE("comments and blank lines are ignored") {
        const auto parsed = ExperimentConfig::parse("# comment\n\n[experiment]\ncount = 3\n");
        CHECK(parsed.ensemble == 3);
    }
    SUBCASE("bad values are rejected") {
        CHECK_THROWS_AS(ExperimentConfig::parse("format = pdf\n"), std::invalid_argument);
        CHECK_THROWS_AS(ExperimentConfig::parse("count = 0\n"), std::invalid_argument);
        CHECK_THROWS_AS(ExperimentConfig::parse("count zero\n"), std::invalid_argument);
    }
    SUBCASE("offset policies") {
        const auto b = make_basis({{1, 2}, {0, -2}});
        cfg.m_policy = "paper";
        CHECK(cfg.offset_for(b) == 3);
        cfg.m_policy = "oracle";
        CHECK(cfg.offset_for(b) == 1);
        cfg.m_policy = "7";
        CHECK(cfg.offset_for(b) == 7);
        cfg.m_policy = "banana";
        CHECK_THROWS_AS(cfg.offset_for(b), std::invalid_argument);
    }
}

TEST_CASE("report json serialisation") {
    SvpResult res;
    res.lambda1_sq = 5;
    res.minimizers = {{1, -1}, {-1, 1}};
    res.canonical = {1, -1};
    res.inf_norm_xmin = 1;
    res.coeff_sum_abs = 0;
    const auto text = svp_result_to_json(res);
    CHECK(text.find("\"lambda1_sq\": \"5\"") != std::string::npos);
    CHECK(text.find("\"schema_version\": 1") != std::string::npos);
}
