#include "qsvp/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace qsvp {

using nlohmann::json;

void write_basis_text(std::ostream& os, const Basis& basis) {
    os << basis.dim << "\n";
    for (const auto& row : basis.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ' ';
            os << row[i].str();
        }
        os << "\n";
    }
}

Basis read_basis_text(std::istream& is) {
    int n = 0;
    if (!(is >> n) || n < 1) throw std::invalid_argument("basis text: bad dimension line");
    IntMat rows(n, IntVec(n));
    for (auto& row : rows)
        for (auto& entry : row) {
            std::string token;
            if (!(is >> token)) throw std::invalid_argument("basis text: not enough entries");
            entry = BigInt(token);
        }
    return Basis(std::move(rows));
}

std::string basis_to_json(const Basis& basis) {
    json j;
    j["dim"] = basis.dim;
    json rows = json::array();
    for (const auto& row : basis.rows) {
        json r = json::array();
        for (const auto& e : row) r.push_back(e.str());
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

Basis basis_from_json(const std::string& text) {
    const json j = json::parse(text);
    const int n = j.at("dim").get<int>();
    IntMat rows;
    for (const auto& row : j.at("rows")) {
        IntVec r;
        for (const auto& e : row)
            r.emplace_back(e.is_string() ? BigInt(e.get<std::string>())
                                         : BigInt(e.get<std::int64_t>()));
        rows.push_back(std::move(r));
    }
    if (static_cast<int>(rows.size()) != n) throw std::invalid_argument("basis json: row count mismatch");
    return Basis(std::move(rows));
}

void save_basis(const std::filesystem::path& path, const Basis& basis) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_basis: cannot open " + path.string());
    if (path.extension() == ".json")
        os << basis_to_json(basis) << "\n";
    else
        write_basis_text(os, basis);
}

Basis load_basis(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_basis: cannot open " + path.string());
    if (path.extension() == ".json") {
        std::stringstream buffer;
        buffer << is.rdbuf();
        return basis_from_json(buffer.str());
    }
    return read_basis_text(is);
}

namespace {

json vector_to_json(const IntVec& v) {
    json out = json::array();
    for (const auto& e : v) out.push_back(e.str());
    return out;
}

json coeffs_to_json(const CoeffVec& v) {
    json out = json::array();
    for (auto e : v) out.push_back(e);
    return out;
}

} // namespace

std::string svp_result_to_json(const SvpResult& result) {
    json j;
    j["schema_version"] = 1;
    j["lambda1_sq"] = result.lambda1_sq.str();
    j["inf_norm_xmin"] = result.inf_norm_xmin;
    j["coeff_sum_abs"] = result.coeff_sum_abs;
    j["canonical"] = coeffs_to_json(result.canonical);
    json mins = json::array();
    for (const auto& x : result.minimizers) mins.push_back(coeffs_to_json(x));
    j["minimizers"] = std::move(mins);
    return j.dump(2);
}

std::string multi_run_report_to_json(const MultiRunReport& report) {
    json j;
    j["schema_version"] = MultiRunReport::schema_version;
    j["runs"] = report.runs;
    auto candidate = [](const MultiRunCandidate& c) {
        json out;
        out["particles"] = c.particles;
        out["vector"] = vector_to_json(c.vector);
        out["norm_sq"] = c.norm_sq.str();
        out["probability"] = c.probability;
        out["coefficients"] = coeffs_to_json(c.coefficients);
        return out;
    };
    json per_k = json::array();
    for (const auto& c : report.per_k) per_k.push_back(candidate(c));
    j["per_k"] = std::move(per_k);
    j["best"] = candidate(report.best);
    return j.dump(2);
}

std::string single_run_report_to_json(const SingleRunReport& report) {
    json j;
    j["schema_version"] = SingleRunReport::schema_version;
    j["m"] = report.m;
    j["k_s"] = report.k_s;
    j["p_zero"] = report.p_zero;
    j["p_lambda1"] = report.p_lambda1;
    j["p_lambda2"] = report.p_lambda2;
    j["gamma"] = report.gamma;
    j["gamma_vs_oracle"] = report.gamma_vs_oracle;
    j["norm_drift"] = report.norm_drift;
    json classes = json::array();
    for (const auto& c : report.table.classes) {
        json jc;
        jc["rank"] = c.rank;
        jc["norm_sq"] = c.norm_sq.str();
        jc["probability"] = c.probability;
        json vecs = json::array();
        for (const auto& v : c.vectors) vecs.push_back(vector_to_json(v));
        jc["vectors"] = std::move(vecs);
        jc["members"] = c.member_indices;
        classes.push_back(std::move(jc));
    }
    j["classes"] = std::move(classes);
    return j.dump(2);
}

std::string candidates_to_json(const std::vector<Candidate>& candidates) {
    json j = json::array();
    for (const auto& c : candidates) {
        json jc;
        jc["vector"] = vector_to_json(c.vector);
        jc["norm_sq"] = c.norm_sq.str();
        jc["probability"] = c.probability;
        jc["gamma"] = c.gamma;
        jc["gamma_vs_oracle"] = c.gamma_vs_oracle;
        j.push_back(std::move(jc));
    }
    return j.dump(2);
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (row_open_) os_ << ',';
    os_ << text;
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::cell(std::int64_t value) { return cell(std::string_view(std::to_string(value))); }

CsvWriter& CsvWriter::cell(const BigInt& value) { return cell(std::string_view(value.str())); }

void CsvWriter::end_row() {
    os_ << '\n';
    row_open_ = false;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream stream(s);
    std::string token;
    while (std::getline(stream, token, sep)) {
        token = trim(token);
        if (!token.empty()) out.push_back(token);
    }
    return out;
}

} // namespace

std::string ExperimentConfig::to_string() const {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "name = " << name << "\n";
    os << "dims = ";
    for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
    os << "\n";
    os << "count = " << ensemble << "\n";
    os << "T = ";
    for (std::size_t i = 0; i < t_grid.size(); ++i) os << (i ? "," : "") << format_double(t_grid[i]);
    os << "\n";
    os << "m = " << m_policy << "\n";
    os << "steps = " << steps << "\n";
    os << "scale_target = " << format_double(scale_target) << "\n";
    os << "gap_anchor = " << format_double(gap_anchor) << "\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out_dir << "\n";
    os << "format = " << format << "\n";
    os << "jobs = " << jobs << "\n";
    return os.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream stream(text);
    std::string line;
    std::string section;
    std::map<std::string, std::string> values;
    while (std::getline(stream, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto get = [&](const char* key) -> const std::string* {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    };
    try {
        if (const auto* v = get("name")) cfg.name = *v;
        if (const auto* v = get("dims")) {
            cfg.dims.clear();
            for (const auto& token : split(*v, ',')) cfg.dims.push_back(std::stoi(token));
        }
        if (const auto* v = get("count")) cfg.ensemble = std::stoi(*v);
        if (const auto* v = get("T")) {
            cfg.t_grid.clear();
            for (const auto& token : split(*v, ',')) cfg.t_grid.push_back(std::stod(token));
        }
        if (const auto* v = get("m")) cfg.m_policy = *v;
        if (const auto* v = get("steps")) cfg.steps = std::stoll(*v);
        if (const auto* v = get("scale_target")) cfg.scale_target = std::stod(*v);
        if (const auto* v = get("gap_anchor")) cfg.gap_anchor = std::stod(*v);
        if (const auto* v = get("seed")) cfg.seed = std::stoull(*v);
        if (const auto* v = get("out")) cfg.out_dir = *v;
        if (const auto* v = get("format")) cfg.format = *v;
        if (const auto* v = get("jobs")) cfg.jobs = std::stoi(*v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed value");
    }
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "svg")
        throw std::invalid_argument("config: format must be csv, json or svg");
    if (cfg.ensemble < 1) throw std::invalid_argument("config: count must be positive");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path.string());
    std::stringstream buffer;
    buffer << is.rdbuf();
    return parse(buffer.str());
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("config: cannot write " + path.string());
    os << to_string();
}

std::int64_t ExperimentConfig::offset_for(const Basis& basis) const {
    if (m_policy == "paper") return estimate_offset(basis.dim, OffsetMode::PaperTable);
    if (m_policy == "linear") return estimate_offset(basis.dim, OffsetMode::Linear);
    if (m_policy == "oracle") return estimate_offset_oracle(basis);
    try {
        return std::stoll(m_policy);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: m must be paper, linear, oracle or a number");
    }
}

} // namespace qsvp
