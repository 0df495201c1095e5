#pragma once

#include "qsvp/lattice.hpp"
#include "qsvp/svp.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qsvp {

// Plain-text basis format: first line N, then N rows of N integers.
void write_basis_text(std::ostream& os, const Basis& basis);
Basis read_basis_text(std::istream& is);

// JSON equivalent; entries are serialised as strings so arbitrary-precision
// values round-trip bit-exactly.
std::string basis_to_json(const Basis& basis);
Basis basis_from_json(const std::string& text);

// Chooses text or JSON by extension (.txt / .json).
void save_basis(const std::filesystem::path& path, const Basis& basis);
Basis load_basis(const std::filesystem::path& path);

std::string svp_result_to_json(const SvpResult& result);
std::string multi_run_report_to_json(const MultiRunReport& report);
std::string single_run_report_to_json(const SingleRunReport& report);
std::string candidates_to_json(const std::vector<Candidate>& candidates);

// Deterministic CSV emission: fixed "%.12g" float formatting, so identical
// data produces byte-identical files.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
    CsvWriter& cell(double value);
    CsvWriter& cell(std::int64_t value);
    CsvWriter& cell(int value) { return cell(static_cast<std::int64_t>(value)); }
    CsvWriter& cell(const BigInt& value);
    void end_row();

  private:
    std::ostream& os_;
    bool row_open_ = false;
};

// Flat sectioned key-value configuration ("[experiment]\nkey = value").
struct ExperimentConfig {
    std::string name;
    std::vector<int> dims{2};
    int ensemble = 50;
    std::vector<double> t_grid{0.25, 0.5, 1, 2, 4, 8, 16, 32, 64, 100};
    std::string m_policy = "paper"; // "paper", "linear", "oracle" or a number
    std::int64_t steps = 0;
    double scale_target = 20.0;
    double gap_anchor = 1.0;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv"; // csv, json or svg
    int jobs = 0;               // 0 keeps the OpenMP default

    std::string to_string() const;
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    // offset for one lattice instance under the configured policy
    std::int64_t offset_for(const Basis& basis) const;
};

std::string format_double(double value); // the shared "%.12g" rendering

} // namespace qsvp
