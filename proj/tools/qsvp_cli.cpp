#include "qsvp/experiments.hpp"
#include "qsvp/io.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace qsvp;

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitAssertionFailed = 4;

struct CommonFlags {
    std::vector<int> dims;
    int count = -1;
    std::vector<double> t_grid;
    std::string m_policy;
    std::int64_t steps = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = -1;
    std::string out_dir;
    std::string format;
    std::string config_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--dim", flags.dims, "lattice dimensions");
    cmd->add_option("--count", flags.count, "ensemble size");
    cmd->add_option("--T", flags.t_grid, "sweep lengths")->delimiter(',');
    cmd->add_option("--m", flags.m_policy, "offset policy: paper, linear, oracle or a number");
    cmd->add_option("--steps", flags.steps, "integrator steps (0 = default)");
    cmd->add_option("--seed", flags.seed, "random seed")->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--jobs", flags.jobs, "worker threads");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--format", flags.format, "csv, json or svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--config", flags.config_path, "configuration file");
}

// config file first, then explicit flags on top
ExperimentConfig resolve_config(const CommonFlags& flags, const char* name) {
    ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = ExperimentConfig::load(flags.config_path);
    cfg.name = name;
    if (!flags.dims.empty()) cfg.dims = flags.dims;
    if (flags.count > 0) cfg.ensemble = flags.count;
    if (!flags.t_grid.empty()) cfg.t_grid = flags.t_grid;
    if (!flags.m_policy.empty()) cfg.m_policy = flags.m_policy;
    if (flags.steps >= 0) cfg.steps = flags.steps;
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.jobs >= 0) cfg.jobs = flags.jobs;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.format.empty()) cfg.format = flags.format;
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
    return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    os << text << "\n";
}

RunParameters run_parameters_from(const ExperimentConfig& cfg, double sweep_time) {
    RunParameters params;
    params.total_time = sweep_time;
    params.steps = cfg.steps;
    params.scale_target = cfg.scale_target;
    params.gap_anchor = cfg.gap_anchor;
    return params;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice shortest-vector sweeps over Bose-Hubbard Fock spaces"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string basis_path;
    std::string gen_mode = "uniform";
    int entry_bound = 10;
    int scramble_ops = -1;
    int run_count = -1;
    int levels = 5;
    double single_t = 2.0;

    auto* gen = app.add_subcommand("gen", "generate random lattice bases");
    add_common(gen, flags);
    gen->add_option("--mode", gen_mode, "uniform, prime-hnf or good-bad")
        ->check(CLI::IsMember({"uniform", "prime-hnf", "good-bad"}));
    gen->add_option("--entry-bound", entry_bound, "uniform entry bound");
    gen->add_option("--ops", scramble_ops, "scramble operations for good-bad pairs");

    auto* oracle = app.add_subcommand("oracle", "exact shortest-vector enumeration");
    add_common(oracle, flags);
    oracle->add_option("--basis", basis_path, "basis file")->required();

    auto* single = app.add_subcommand("single-run", "one reservoir sweep on a basis");
    add_common(single, flags);
    single->add_option("--basis", basis_path, "basis file")->required();

    auto* multi = app.add_subcommand("multi-run", "per-particle-number sweeps on a basis");
    add_common(multi, flags);
    multi->add_option("--basis", basis_path, "basis file")->required();
    multi->add_option("--c", run_count, "number of incremental runs");

    auto* kgrowth = app.add_subcommand("kgrowth", "coefficient growth statistics");
    add_common(kgrowth, flags);

    auto* dist = app.add_subcommand("dist", "rank-class probability distributions");
    add_common(dist, flags);

    auto* payoff = app.add_subcommand("payoff", "P(0), P(lambda1), P(lambda2) versus sweep time");
    add_common(payoff, flags);

    auto* band = app.add_subcommand("band", "band-diagonalisation ensemble statistics");
    add_common(band, flags);

    auto* level_cmd = app.add_subcommand("levels", "instantaneous spectrum and populations");
    add_common(level_cmd, flags);
    level_cmd->add_option("--basis", basis_path, "basis file")->required();
    level_cmd->add_option("--k", levels, "number of levels to track");

    auto* example = app.add_subcommand("example-2d", "the worked two-site demonstration");
    add_common(example, flags);
    example->add_option("--example-T", single_t, "sweep length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        if (gen->parsed()) {
            auto cfg = resolve_config(flags, "gen");
            std::filesystem::create_directories(cfg.out_dir);
            Rng base(cfg.seed);
            const int dim = cfg.dims.front();
            const char* ext = cfg.format == "json" ? "json" : "txt";
            for (int i = 0; i < cfg.ensemble; ++i) {
                Rng rng = base.fork(i);
                char name[64];
                if (gen_mode == "uniform") {
                    std::snprintf(name, sizeof name, "basis_%04d.%s", i, ext);
                    save_basis(std::filesystem::path(cfg.out_dir) / name,
                               random_basis_uniform(dim, rng, entry_bound));
                } else if (gen_mode == "prime-hnf") {
                    std::snprintf(name, sizeof name, "basis_%04d.%s", i, ext);
                    save_basis(std::filesystem::path(cfg.out_dir) / name,
                               random_basis_prime_hnf(dim, rng));
                } else {
                    const auto pair = random_good_bad_pair(dim, rng, scramble_ops);
                    std::snprintf(name, sizeof name, "good_%04d.%s", i, ext);
                    save_basis(std::filesystem::path(cfg.out_dir) / name, pair.good);
                    std::snprintf(name, sizeof name, "bad_%04d.%s", i, ext);
                    save_basis(std::filesystem::path(cfg.out_dir) / name, pair.bad);
                }
            }
            std::cout << "wrote " << cfg.ensemble << " " << gen_mode << " instance(s) to "
                      << cfg.out_dir << "\n";
        } else if (oracle->parsed()) {
            auto cfg = resolve_config(flags, "oracle");
            const auto basis = load_basis(basis_path);
            emit(svp_result_to_json(svp_enumerate(basis)), "");
        } else if (single->parsed()) {
            auto cfg = resolve_config(flags, "single-run");
            const auto basis = load_basis(basis_path);
            const auto m = cfg.offset_for(basis);
            const double t = flags.t_grid.empty() ? 100.0 : flags.t_grid.front();
            const auto report = single_run(basis, m, run_parameters_from(cfg, t));
            emit(single_run_report_to_json(report), "");
        } else if (multi->parsed()) {
            auto cfg = resolve_config(flags, "multi-run");
            const auto basis = load_basis(basis_path);
            const auto m = cfg.offset_for(basis);
            const int c = run_count > 0 ? run_count : static_cast<int>(std::max<std::int64_t>(m, 1));
            const double t = flags.t_grid.empty() ? 100.0 : flags.t_grid.front();
            const auto report = multi_run(basis, m, c, run_parameters_from(cfg, t));
            emit(multi_run_report_to_json(report), "");
        } else if (kgrowth->parsed()) {
            auto cfg = resolve_config(flags, "kgrowth");
            if (flags.dims.empty() && flags.config_path.empty()) cfg.dims = {3, 4, 5, 6, 7, 8};
            write_kgrowth(cfg.out_dir, exp_kgrowth(cfg), cfg.format);
            std::cout << "kgrowth tables written to " << cfg.out_dir << "\n";
        } else if (dist->parsed()) {
            auto cfg = resolve_config(flags, "dist");
            write_distributions(cfg.out_dir, exp_distributions(cfg), cfg.format);
            std::cout << "distribution tables written to " << cfg.out_dir << "\n";
        } else if (payoff->parsed()) {
            auto cfg = resolve_config(flags, "payoff");
            write_payoff(cfg.out_dir, exp_payoff(cfg), cfg.format);
            std::cout << "payoff tables written to " << cfg.out_dir << "\n";
        } else if (band->parsed()) {
            auto cfg = resolve_config(flags, "band");
            if (flags.dims.empty() && flags.config_path.empty()) cfg.dims = {30};
            if (flags.count <= 0 && flags.config_path.empty()) cfg.ensemble = 100;
            write_banding(cfg.out_dir, exp_banding(cfg), cfg.format);
            std::cout << "banding tables written to " << cfg.out_dir << "\n";
        } else if (level_cmd->parsed()) {
            auto cfg = resolve_config(flags, "levels");
            const auto basis = load_basis(basis_path);
            const auto m = cfg.offset_for(basis);
            const double t = flags.t_grid.empty() ? 0.25 : flags.t_grid.front();
            const auto result = exp_energy_levels(basis, m, t, levels, cfg.steps, cfg.gap_anchor);
            write_levels(cfg.out_dir, result, cfg.format);
            std::cout << "level tables written to " << cfg.out_dir << "\n";
        } else if (example->parsed()) {
            auto cfg = resolve_config(flags, "example-2d");
            const auto result = exp_appendix_c(single_t, cfg.steps);
            write_appendix_c(cfg.out_dir, result, cfg.format);
            std::cout << "two-site demonstration written to " << cfg.out_dir << "\n";
            std::cout << "final P(|1,1>) = " << format_double(result.p11_final) << ", decoded vector (";
            for (std::size_t i = 0; i < result.decoded_vector.size(); ++i)
                std::cout << (i ? "," : "") << result.decoded_vector[i].str();
            std::cout << ")\n";
            const bool pass = result.p11_final > 0.9 && result.decoded_vector == IntVec{1, 0} &&
                              result.h0_offdiag_error < 1e-12 && result.psi0_error < 1e-12;
            if (!pass) {
                std::cerr << "assertion failed: expected P(|1,1>) > 0.9 with decoded vector (1,0)\n";
                return kExitAssertionFailed;
            }
        }
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kExitCapExceeded;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
