#include "qsvp/experiments.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <optional>
#include <cmath>
#include <fstream>

namespace qsvp {

namespace {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit fit;
    const double denom = n * sxx - sx * sx;
    if (denom != 0) {
        fit.slope = (n * sxy - sx * sy) / denom;
        fit.intercept = (sy - fit.slope * sx) / n;
    }
    return fit;
}

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& samples) {
    MeanSe out;
    if (samples.empty()) return out;
    for (double v : samples) out.mean += v;
    out.mean /= static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double var = 0;
        for (double v : samples) var += (v - out.mean) * (v - out.mean);
        var /= static_cast<double>(samples.size() - 1);
        out.se = std::sqrt(var / static_cast<double>(samples.size()));
    }
    return out;
}

double percentile_nearest_rank(std::vector<double> samples, double p) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(samples.size())));
    return samples[std::max<std::size_t>(rank, 1) - 1];
}

// deterministic member stream: one sub-generator per (dimension, index)
Rng member_rng(const ExperimentConfig& cfg, int dim, int index) {
    Rng base(cfg.seed);
    return base.fork(static_cast<std::uint64_t>(dim) * 1000003ULL + static_cast<std::uint64_t>(index));
}

std::vector<Basis> seeded_bad_bases(const ExperimentConfig& cfg, int dim) {
    std::vector<Basis> bases;
    bases.reserve(cfg.ensemble);
    for (int i = 0; i < cfg.ensemble; ++i) {
        Rng rng = member_rng(cfg, dim, i);
        bases.push_back(random_good_bad_pair(dim, rng).bad);
    }
    return bases;
}

RunParameters run_parameters(const ExperimentConfig& cfg, double sweep_time) {
    RunParameters params;
    params.total_time = sweep_time;
    params.steps = cfg.steps;
    params.scale_target = cfg.scale_target;
    params.gap_anchor = cfg.gap_anchor;
    params.parallel = false; // members are dispatched in parallel instead
    return params;
}

} // namespace

KGrowthResult exp_kgrowth(const ExperimentConfig& cfg) {
    KGrowthResult result;
    std::vector<double> dims_x, hnf_y, lll_y, sum_y;
    for (int dim : cfg.dims) {
        std::vector<double> hnf_inf(cfg.ensemble), lll_inf(cfg.ensemble), coeff_sum(cfg.ensemble);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cfg.ensemble; ++i) {
            Rng rng = member_rng(cfg, dim, i);
            const auto basis = random_basis_uniform(dim, rng);
            const auto on_hnf = svp_enumerate(hnf(basis));
            const auto on_lll = svp_enumerate(lll_reduce(basis));
            hnf_inf[i] = static_cast<double>(on_hnf.inf_norm_xmin);
            lll_inf[i] = static_cast<double>(on_lll.inf_norm_xmin);
            coeff_sum[i] = static_cast<double>(on_hnf.coeff_sum_abs);
        }
        KGrowthRow row;
        row.dim = dim;
        const auto h = mean_se(hnf_inf);
        const auto l = mean_se(lll_inf);
        const auto s = mean_se(coeff_sum);
        row.mean_hnf_inf = h.mean;
        row.se_hnf_inf = h.se;
        row.mean_lll_inf = l.mean;
        row.se_lll_inf = l.se;
        row.mean_coeff_sum = s.mean;
        row.se_coeff_sum = s.se;
        result.rows.push_back(row);
        dims_x.push_back(dim);
        hnf_y.push_back(h.mean);
        lll_y.push_back(l.mean);
        sum_y.push_back(s.mean);
    }
    result.hnf_inf_fit = fit_line(dims_x, hnf_y);
    result.lll_inf_fit = fit_line(dims_x, lll_y);
    result.coeff_sum_fit = fit_line(dims_x, sum_y);
    return result;
}

namespace {

struct InstanceOutcome {
    bool valid = false;
    std::vector<double> rank_prob; // per rank, truncated
    double tail = 0;
    double p_lambda1 = 0; // oracle-matched
    double p0 = 0;
    double p2 = 0; // rank-2 class
};

InstanceOutcome run_instance(const Basis& basis, std::int64_t m, const RunParameters& params,
                             const BigInt& lambda1_sq, int max_rank) {
    InstanceOutcome out;
    try {
        const auto report = single_run(basis, m, params);
        out.valid = true;
        out.rank_prob.assign(max_rank + 1, 0.0);
        double covered = 0;
        for (const auto& c : report.table.classes) {
            if (c.rank <= max_rank) {
                out.rank_prob[c.rank] = c.probability;
                covered += c.probability;
            }
            if (c.norm_sq == lambda1_sq) out.p_lambda1 += c.probability;
            if (c.norm_sq == 0) out.p0 = c.probability;
            if (c.rank == 2) out.p2 = c.probability;
        }
        out.tail = std::max(0.0, 1.0 - covered);
    } catch (const InvalidEvolution&) {
        out.valid = false;
    }
    return out;
}

} // namespace

std::vector<DistributionCell> exp_distributions(const ExperimentConfig& cfg, int max_rank) {
    std::vector<DistributionCell> cells;
    for (int dim : cfg.dims) {
        const auto bases = seeded_bad_bases(cfg, dim);
        std::vector<BigInt> lambda(cfg.ensemble);
        for (int i = 0; i < cfg.ensemble; ++i) lambda[i] = svp_enumerate(bases[i]).lambda1_sq;
        std::vector<std::int64_t> offsets(cfg.ensemble);
        for (int i = 0; i < cfg.ensemble; ++i) offsets[i] = cfg.offset_for(bases[i]);

        for (double t : cfg.t_grid) {
            std::vector<InstanceOutcome> outcomes(cfg.ensemble);
            const auto params = run_parameters(cfg, t);
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i < cfg.ensemble; ++i)
                outcomes[i] = run_instance(bases[i], offsets[i], params, lambda[i], max_rank);

            DistributionCell cell;
            cell.dim = dim;
            cell.sweep_time = t;
            cell.mean_rank_prob.assign(max_rank + 1, 0.0);
            for (const auto& o : outcomes) {
                if (!o.valid) {
                    ++cell.invalid_runs;
                    continue;
                }
                ++cell.samples;
                for (int r = 0; r <= max_rank; ++r) cell.mean_rank_prob[r] += o.rank_prob[r];
                cell.mean_tail += o.tail;
                cell.mean_p_lambda1 += o.p_lambda1;
            }
            if (cell.samples > 0) {
                for (auto& v : cell.mean_rank_prob) v /= cell.samples;
                cell.mean_tail /= cell.samples;
                cell.mean_p_lambda1 /= cell.samples;
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::vector<PayoffCell> exp_payoff(const ExperimentConfig& cfg) {
    std::vector<PayoffCell> cells;
    for (int dim : cfg.dims) {
        const auto bases = seeded_bad_bases(cfg, dim);
        std::vector<BigInt> lambda(cfg.ensemble);
        for (int i = 0; i < cfg.ensemble; ++i) lambda[i] = svp_enumerate(bases[i]).lambda1_sq;
        std::vector<std::int64_t> offsets(cfg.ensemble);
        for (int i = 0; i < cfg.ensemble; ++i) offsets[i] = cfg.offset_for(bases[i]);

        for (double t : cfg.t_grid) {
            std::vector<InstanceOutcome> outcomes(cfg.ensemble);
            const auto params = run_parameters(cfg, t);
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i < cfg.ensemble; ++i)
                outcomes[i] = run_instance(bases[i], offsets[i], params, lambda[i], 2);

            PayoffCell cell;
            cell.dim = dim;
            cell.sweep_time = t;
            std::vector<double> p0, p1, p2;
            for (const auto& o : outcomes) {
                if (!o.valid) {
                    ++cell.invalid_runs;
                    continue;
                }
                p0.push_back(o.p0);
                p1.push_back(o.p_lambda1);
                p2.push_back(o.p2);
            }
            cell.samples = static_cast<int>(p0.size());
            cell.mean_p0 = mean_se(p0).mean;
            cell.mean_p1 = mean_se(p1).mean;
            cell.mean_p2 = mean_se(p2).mean;
            cell.p10_p0 = percentile_nearest_rank(p0, 0.10);
            cell.p10_p1 = percentile_nearest_rank(p1, 0.10);
            cell.p10_p2 = percentile_nearest_rank(p2, 0.10);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

LevelsResult exp_energy_levels(const Basis& basis, std::int64_t m, double sweep_time, int levels,
                               std::int64_t steps, double gap_anchor, std::int64_t k_override) {
    RunParameters params;
    params.total_time = sweep_time;
    params.steps = steps;
    params.gap_anchor = gap_anchor;

    std::optional<FockBasis> fock;
    std::optional<SweepHamiltonian> sweep;
    if (m >= 1) {
        auto system =
            make_single_run_system(basis, m, params, k_override >= 0 ? k_override : m * (basis.dim + 1));
        fock.emplace(std::move(system.fock));
        sweep.emplace(std::move(system.sweep));
    } else {
        if (k_override < 1)
            throw std::invalid_argument("exp_energy_levels: m = 0 needs an explicit particle count");
        fock.emplace(k_override, basis.dim);
        const OffsetConfig cfg{0, basis.dim, false};
        auto hp = build_problem_diagonal(*fock, basis, cfg, SpectrumScale{params.scale_target});
        if (gap_anchor > 0) apply_gap_anchor(hp, gap_anchor);
        sweep.emplace(make_sweep(build_tunnelling(*fock), std::move(hp), sweep_time));
    }
    if (fock->size() > 2000)
        throw CapExceeded("exp_energy_levels: dense spectral tracking capped at D=2000");

    EvolveOptions opts;
    opts.steps = steps;
    opts.snapshots = 200;
    opts.store_amplitudes = true;
    const auto psi0 = initial_ground_state(*fock);
    const auto result = evolve(*sweep, psi0, opts);
    if (!result.valid)
        throw InvalidEvolution("exp_energy_levels: norm drift " + std::to_string(result.norm_drift));

    LevelsResult out;
    const int k = std::min<int>(levels, static_cast<int>(fock->size()));
    for (const auto& [t, psi] : result.amplitude_trajectory) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sweep_dense(*sweep, t));
        Eigen::VectorXd population(k), gap(k);
        for (int i = 0; i < k; ++i) {
            const auto mode = eig.eigenvectors().col(i).cast<std::complex<double>>();
            population[i] = std::norm(mode.dot(psi));
            gap[i] = eig.eigenvalues()[i] - eig.eigenvalues()[0];
        }
        out.times.push_back(t);
        out.populations.push_back(std::move(population));
        out.gaps.push_back(std::move(gap));
    }
    return out;
}

BandingResult exp_banding(const ExperimentConfig& cfg) {
    BandingResult result;
    result.dim = cfg.dims.front();
    result.instances = cfg.ensemble;
    if (result.dim > 60) throw CapExceeded("exp_banding: dimensions above 60 are out of scope");

    std::vector<BandedBasis> ensemble(cfg.ensemble);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.ensemble; ++i) {
        Rng rng = member_rng(cfg, result.dim, i);
        ensemble[i] = band_diagonalise(random_basis_prime_hnf(result.dim, rng));
    }

    result.profile = band_profile(ensemble);
    const int n = result.dim;
    result.heat.assign(n, std::vector<double>(n, 0.0));
    double diag_total = 0;
    for (const auto& banded : ensemble) {
        for (int i = 0; i < n; ++i) {
            diag_total += abs(banded.basis.rows[i][i]).convert_to<double>();
            for (int j = 0; j < n; ++j)
                result.heat[i][j] += abs(banded.basis.rows[i][j]).convert_to<double>();
        }
    }
    const double diag_mean = diag_total / (static_cast<double>(cfg.ensemble) * n);
    for (auto& row : result.heat)
        for (auto& v : row) v /= static_cast<double>(cfg.ensemble) * diag_mean;

    double volume_total = 0;
    std::int64_t extents = 0, extents_le3 = 0;
    for (const auto& banded : ensemble) {
        result.volume_factors.push_back(banded.volume_factor);
        volume_total += banded.volume_factor.convert_to<double>();
        result.stuck_rows += banded.stuck_rows;
        for (int e : banded.eliminated_extents) {
            ++extents;
            if (e <= 3) ++extents_le3;
        }
    }
    result.mean_volume_factor = volume_total / cfg.ensemble;
    result.fraction_extent_le3 = extents ? static_cast<double>(extents_le3) / extents : 1.0;
    return result;
}

AppendixCResult exp_appendix_c(double sweep_time, std::int64_t steps) {
    IntMat rows{{BigInt(1), BigInt(2)}, {BigInt(0), BigInt(-2)}};
    const Basis bad(std::move(rows));
    AppendixCResult out;
    out.gram_matrix = gram(bad).entries;

    FockBasis fock(2, 2);
    const OffsetConfig cfg{0, 2, false};
    auto sweep = build_sweep_hamiltonian(fock, bad, cfg, sweep_time);

    const double s2 = std::sqrt(2.0);
    const Eigen::MatrixXd h0(sweep.h0.matrix);
    out.h0_offdiag_error = std::max({std::abs(h0(0, 1) + s2), std::abs(h0(1, 2) + s2),
                                     std::abs(h0(0, 0)), std::abs(h0(0, 2))});

    const auto psi0 = initial_ground_state(fock);
    out.psi0_error = std::max({std::abs(psi0[0] - 0.5), std::abs(psi0[1] - s2 / 2.0),
                               std::abs(psi0[2] - 0.5)});

    EvolveOptions opts;
    opts.steps = steps;
    opts.snapshots = 200;
    const auto result = evolve(sweep, psi0, opts);
    out.norm_drift = result.norm_drift;
    out.trajectory = result.trajectory;
    out.p11_final = result.final_probabilities[1];

    Eigen::Index argmax = 0;
    result.final_probabilities.maxCoeff(&argmax);
    const auto x = fock_to_coeff(fock.state(argmax), cfg);
    out.decoded_vector = to_lattice_vector(x, bad).coords;
    out.decoded_is_shortest =
        to_lattice_vector(x, bad).norm_sq == svp_enumerate(bad).lambda1_sq;
    return out;
}

// ---------------------------------------------------------------------------
// file output

namespace {

std::ofstream open_file(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

std::string svg_header(int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

constexpr const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// minimal polyline chart; x may be log-scaled by the caller
std::string svg_line_chart(const std::string& title,
                           const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
                           bool log_x) {
    const int w = 640, h = 420, ml = 60, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (auto [x, y] : pts) {
            const double xv = log_x ? std::log10(x) : x;
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            ymax = std::max(ymax, y);
        }
    if (ymax <= 0) ymax = 1.0;
    if (xmax <= xmin) xmax = xmin + 1.0;
    ymax *= 1.05;
    auto px = [&](double x) {
        const double xv = log_x ? std::log10(x) : x;
        return ml + (xv - xmin) / (xmax - xmin) * (w - ml - mr);
    };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::string svg = svg_header(w, h);
    svg += "<text x=\"" + std::to_string(w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           title + "</text>\n";
    svg += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(h - mb) + "\" x2=\"" +
           std::to_string(w - mr) + "\" y2=\"" + std::to_string(h - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) + "\" x2=\"" +
           std::to_string(ml) + "\" y2=\"" + std::to_string(h - mb) + "\" stroke=\"black\"/>\n";
    int color = 0;
    int legend_y = mt;
    for (const auto& [name, pts] : series) {
        std::string path;
        for (const auto& [x, y] : pts)
            path += (path.empty() ? "M" : " L") + format_double(px(x)) + " " + format_double(py(y));
        svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + kSeriesColors[color % 6] +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + std::to_string(w - mr - 150) + "\" y=\"" + std::to_string(legend_y) +
               "\" font-size=\"12\" fill=\"" + kSeriesColors[color % 6] + "\">" + name + "</text>\n";
        legend_y += 16;
        ++color;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

void write_kgrowth(const std::filesystem::path& dir, const KGrowthResult& result,
                   const std::string& format) {
    {
        auto os = open_file(dir, "kgrowth.csv");
        CsvWriter csv(os);
        csv.cell("dim").cell("mean_hnf_inf").cell("se_hnf_inf").cell("mean_lll_inf").cell("se_lll_inf")
            .cell("mean_coeff_sum").cell("se_coeff_sum");
        csv.end_row();
        for (const auto& row : result.rows) {
            csv.cell(row.dim).cell(row.mean_hnf_inf).cell(row.se_hnf_inf).cell(row.mean_lll_inf)
                .cell(row.se_lll_inf).cell(row.mean_coeff_sum).cell(row.se_coeff_sum);
            csv.end_row();
        }
    }
    {
        auto os = open_file(dir, "kgrowth_fits.csv");
        CsvWriter csv(os);
        csv.cell("series").cell("slope").cell("intercept");
        csv.end_row();
        csv.cell("hnf_inf").cell(result.hnf_inf_fit.slope).cell(result.hnf_inf_fit.intercept);
        csv.end_row();
        csv.cell("lll_inf").cell(result.lll_inf_fit.slope).cell(result.lll_inf_fit.intercept);
        csv.end_row();
        csv.cell("coeff_sum").cell(result.coeff_sum_fit.slope).cell(result.coeff_sum_fit.intercept);
        csv.end_row();
    }
    if (format == "svg") {
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series(3);
        series[0].first = "HNF inf-norm";
        series[1].first = "LLL inf-norm";
        series[2].first = "|sum x_i|";
        for (const auto& row : result.rows) {
            series[0].second.emplace_back(row.dim, row.mean_hnf_inf);
            series[1].second.emplace_back(row.dim, row.mean_lll_inf);
            series[2].second.emplace_back(row.dim, row.mean_coeff_sum);
        }
        auto os = open_file(dir, "kgrowth.svg");
        os << svg_line_chart("shortest-vector coefficient growth", series, false);
    }
}

void write_distributions(const std::filesystem::path& dir, const std::vector<DistributionCell>& cells,
                         const std::string& format) {
    auto os = open_file(dir, "distributions.csv");
    CsvWriter csv(os);
    csv.cell("dim").cell("T").cell("rank").cell("mean_prob").cell("is_lambda1_rank")
        .cell("invalid_runs").cell("samples");
    csv.end_row();
    for (const auto& cell : cells) {
        for (std::size_t r = 0; r < cell.mean_rank_prob.size(); ++r) {
            csv.cell(cell.dim).cell(cell.sweep_time).cell(static_cast<std::int64_t>(r))
                .cell(cell.mean_rank_prob[r]).cell(r == 1 ? 1 : 0).cell(cell.invalid_runs)
                .cell(cell.samples);
            csv.end_row();
        }
        csv.cell(cell.dim).cell(cell.sweep_time).cell("tail").cell(cell.mean_tail).cell(0)
            .cell(cell.invalid_runs).cell(cell.samples);
        csv.end_row();
        csv.cell(cell.dim).cell(cell.sweep_time).cell("lambda1_class").cell(cell.mean_p_lambda1)
            .cell(1).cell(cell.invalid_runs).cell(cell.samples);
        csv.end_row();
    }
    if (format == "svg") {
        for (const auto& cell : cells) {
            const int w = 640, h = 420, ml = 50, mb = 40;
            double ymax = 1e-9;
            for (double v : cell.mean_rank_prob) ymax = std::max(ymax, v);
            std::string svg = svg_header(w, h);
            const double bar_w = static_cast<double>(w - ml - 20) / cell.mean_rank_prob.size();
            for (std::size_t r = 0; r < cell.mean_rank_prob.size(); ++r) {
                const double bh = cell.mean_rank_prob[r] / (1.05 * ymax) * (h - mb - 50);
                svg += "<rect x=\"" + format_double(ml + r * bar_w) + "\" y=\"" +
                       format_double(h - mb - bh) + "\" width=\"" + format_double(bar_w * 0.8) +
                       "\" height=\"" + format_double(bh) + "\" fill=\"" +
                       (r == 1 ? "#d62728" : "#1f77b4") + "\"/>\n";
            }
            svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">rank distribution N=" +
                   std::to_string(cell.dim) + " T=" + format_double(cell.sweep_time) + "</text>\n</svg>\n";
            auto os2 = open_file(dir, "dist_d" + std::to_string(cell.dim) + "_T" +
                                          format_double(cell.sweep_time) + ".svg");
            os2 << svg;
        }
    }
}

void write_payoff(const std::filesystem::path& dir, const std::vector<PayoffCell>& cells,
                  const std::string& format) {
    auto os = open_file(dir, "payoff.csv");
    CsvWriter csv(os);
    csv.cell("dim").cell("T").cell("mean_p0").cell("p10_p0").cell("mean_p_lambda1").cell("p10_p_lambda1")
        .cell("mean_p_lambda2").cell("p10_p_lambda2").cell("invalid_runs").cell("samples");
    csv.end_row();
    for (const auto& cell : cells) {
        csv.cell(cell.dim).cell(cell.sweep_time).cell(cell.mean_p0).cell(cell.p10_p0).cell(cell.mean_p1)
            .cell(cell.p10_p1).cell(cell.mean_p2).cell(cell.p10_p2).cell(cell.invalid_runs)
            .cell(cell.samples);
        csv.end_row();
    }
    if (format == "svg") {
        std::map<int, std::vector<const PayoffCell*>> by_dim;
        for (const auto& cell : cells) by_dim[cell.dim].push_back(&cell);
        for (const auto& [dim, list] : by_dim) {
            std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series(3);
            series[0].first = "P(0)";
            series[1].first = "P(lambda1)";
            series[2].first = "P(lambda2)";
            for (const auto* cell : list) {
                series[0].second.emplace_back(cell->sweep_time, cell->mean_p0);
                series[1].second.emplace_back(cell->sweep_time, cell->mean_p1);
                series[2].second.emplace_back(cell->sweep_time, cell->mean_p2);
            }
            auto os2 = open_file(dir, "payoff_d" + std::to_string(dim) + ".svg");
            os2 << svg_line_chart("payoff curves N=" + std::to_string(dim), series, true);
        }
    }
}

void write_levels(const std::filesystem::path& dir, const LevelsResult& result,
                  const std::string& format) {
    {
        auto os = open_file(dir, "levels_populations.csv");
        CsvWriter csv(os);
        csv.cell("t").cell("index_or_rank").cell("value");
        csv.end_row();
        for (std::size_t s = 0; s < result.times.size(); ++s)
            for (Eigen::Index i = 0; i < result.populations[s].size(); ++i) {
                csv.cell(result.times[s]).cell(static_cast<std::int64_t>(i)).cell(result.populations[s][i]);
                csv.end_row();
            }
    }
    {
        auto os = open_file(dir, "levels_gaps.csv");
        CsvWriter csv(os);
        csv.cell("t").cell("index_or_rank").cell("value");
        csv.end_row();
        for (std::size_t s = 0; s < result.times.size(); ++s)
            for (Eigen::Index i = 0; i < result.gaps[s].size(); ++i) {
                csv.cell(result.times[s]).cell(static_cast<std::int64_t>(i)).cell(result.gaps[s][i]);
                csv.end_row();
            }
    }
    if (format == "svg" && !result.times.empty()) {
        const auto k = result.populations.front().size();
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> pop(k), gap(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            pop[i].first = "level " + std::to_string(i);
            gap[i].first = "dE_" + std::to_string(i);
            for (std::size_t s = 0; s < result.times.size(); ++s) {
                pop[i].second.emplace_back(result.times[s], result.populations[s][i]);
                gap[i].second.emplace_back(result.times[s], result.gaps[s][i]);
            }
        }
        open_file(dir, "levels_populations.svg") << svg_line_chart("eigenstate populations", pop, false);
        open_file(dir, "levels_gaps.svg") << svg_line_chart("energy differentials", gap, false);
    }
}

void write_banding(const std::filesystem::path& dir, const BandingResult& result,
                   const std::string& format) {
    {
        auto os = open_file(dir, "banding_profile.csv");
        CsvWriter csv(os);
        csv.cell("offset").cell("mean_abs_entry");
        csv.end_row();
        for (std::size_t d = 0; d < result.profile.mean_abs_entry_by_offset.size(); ++d) {
            csv.cell(static_cast<std::int64_t>(d)).cell(result.profile.mean_abs_entry_by_offset[d]);
            csv.end_row();
        }
    }
    {
        auto os = open_file(dir, "banding_heat.csv");
        CsvWriter csv(os);
        csv.cell("row").cell("col").cell("mean_abs_entry");
        csv.end_row();
        for (std::size_t i = 0; i < result.heat.size(); ++i)
            for (std::size_t j = 0; j < result.heat[i].size(); ++j) {
                csv.cell(static_cast<std::int64_t>(i)).cell(static_cast<std::int64_t>(j)).cell(result.heat[i][j]);
                csv.end_row();
            }
    }
    {
        auto os = open_file(dir, "banding_stats.csv");
        CsvWriter csv(os);
        csv.cell("instance").cell("volume_factor");
        csv.end_row();
        for (std::size_t i = 0; i < result.volume_factors.size(); ++i) {
            csv.cell(static_cast<std::int64_t>(i)).cell(result.volume_factors[i]);
            csv.end_row();
        }
        csv.cell("mean").cell(result.mean_volume_factor);
        csv.end_row();
        csv.cell("fraction_extent_le3").cell(result.fraction_extent_le3);
        csv.end_row();
        csv.cell("stuck_rows").cell(static_cast<std::int64_t>(result.stuck_rows));
        csv.end_row();
    }
    if (format == "svg") {
        const int n = result.dim;
        const int cellpx = std::max(4, 360 / n);
        const int w = n * cellpx + 80, h = n * cellpx + 60;
        std::string svg = svg_header(w, h);
        double vmax = 1e-12;
        for (const auto& row : result.heat)
            for (double v : row) vmax = std::max(vmax, v);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = result.heat[i][j];
                const double intensity = v <= 0 ? 0.0 : std::log1p(v / vmax * 100.0) / std::log1p(100.0);
                const int shade = 255 - static_cast<int>(intensity * 255);
                svg += "<rect x=\"" + std::to_string(40 + j * cellpx) + "\" y=\"" +
                       std::to_string(40 + i * cellpx) + "\" width=\"" + std::to_string(cellpx) +
                       "\" height=\"" + std::to_string(cellpx) + "\" fill=\"rgb(" + std::to_string(shade) +
                       "," + std::to_string(shade) + ",255)\"/>\n";
            }
        svg += "</svg>\n";
        open_file(dir, "banding_heat.svg") << svg;
    }
}

void write_appendix_c(const std::filesystem::path& dir, const AppendixCResult& result,
                      const std::string& format) {
    {
        auto os = open_file(dir, "appendix_c_trajectory.csv");
        CsvWriter csv(os);
        csv.cell("t").cell("index_or_rank").cell("value");
        csv.end_row();
        for (const auto& [t, probs] : result.trajectory)
            for (Eigen::Index i = 0; i < probs.size(); ++i) {
                csv.cell(t).cell(static_cast<std::int64_t>(i)).cell(probs[i]);
                csv.end_row();
            }
    }
    {
        auto os = open_file(dir, "appendix_c_report.csv");
        CsvWriter csv(os);
        csv.cell("quantity").cell("value");
        csv.end_row();
        csv.cell("gram_00").cell(result.gram_matrix[0][0]);
        csv.end_row();
        csv.cell("gram_01").cell(result.gram_matrix[0][1]);
        csv.end_row();
        csv.cell("gram_11").cell(result.gram_matrix[1][1]);
        csv.end_row();
        csv.cell("h0_offdiag_error").cell(result.h0_offdiag_error);
        csv.end_row();
        csv.cell("psi0_error").cell(result.psi0_error);
        csv.end_row();
        csv.cell("p11_final").cell(result.p11_final);
        csv.end_row();
        csv.cell("norm_drift").cell(result.norm_drift);
        csv.end_row();
        std::string vec;
        for (std::size_t i = 0; i < result.decoded_vector.size(); ++i)
            vec += (i ? " " : "") + result.decoded_vector[i].str();
        csv.cell("decoded_vector").cell(vec);
        csv.end_row();
        csv.cell("decoded_is_shortest").cell(static_cast<std::int64_t>(result.decoded_is_shortest ? 1 : 0));
        csv.end_row();
    }
    if (format == "svg" && !result.trajectory.empty()) {
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series(3);
        series[0].first = "|2,0>";
        series[1].first = "|1,1>";
        series[2].first = "|0,2>";
        for (const auto& [t, probs] : result.trajectory)
            for (int i = 0; i < 3; ++i) series[i].second.emplace_back(t, probs[i]);
        open_file(dir, "appendix_c.svg") << svg_line_chart("two-site demonstration", series, false);
    }
}

} // namespace qsvp
