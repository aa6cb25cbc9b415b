#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wropt/grid.hpp"
#include "wropt/model.hpp"
#include "wropt/newton.hpp"
#include "wropt/wrm.hpp"

namespace wropt {

/// Malformed configuration text or value; carries the 1-based line when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

enum class Method { monolithic, wrm_preconditioned, wrm_only };

const char* to_string(Method method);
Method parse_method(const std::string& text);

struct RunConfig {
    std::string test{"1"};  ///< "1", "2" or "zero" (f = 0, y0 = 0)
    std::vector<double> eps{1e-1};
    std::vector<int> overlap_cells{1};
    std::vector<double> robin_p{1e2};
    Method method{Method::monolithic};
    std::uint64_t seed{0};
    int nx{161};
    int nt{21};
    std::string out{"out"};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses `key=value` lines (`#` starts a comment). Lists are comma separated.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);
/// Applies one key=value assignment (used for CLI overrides).
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value, int line = 0);
std::string serialize_config(const RunConfig& config);

struct TestCase {
    ProblemSpec spec;
    GridSpec grid;
};

/// Test 1: f = 20, c_u = 30, c_y(t) = 10(1-t)+3; Test 2: f = 18, c_u = 15,
/// c_y(t) = 2(1-t)+3; both with T = 1 and y0 = 5 sin(pi x).
TestCase builtin_test_case(int id, int nx = 161, int nt = 21, double eps = 1e-1);
/// Built-in case by name ("1", "2", "zero").
TestCase named_test_case(const std::string& name, int nx, int nt, double eps);

/// Outcome of one solve.
struct RunRecord {
    int overlap_cells{0};
    double robin_p{0.0};
    double eps{0.0};
    Method method{Method::monolithic};
    IterationReport report;
    double seconds{0.0};
    std::string failure;
    KktPoint solution;  ///< whole-domain (glued for the subdomain methods)
};

/// Runs one (method, L, p, eps) combination without touching the disk.
RunRecord run_single(const RunConfig& config, double eps, int overlap_cells, double robin_p,
                     const SolverConfig& solver = {});

inline constexpr const char* kReportHeader = "L_cells,p,eps,method,outer,inner_max,inner_min,converged,seconds";
inline constexpr const char* kFieldsHeader = "t,x,y,q,u,w";

std::string report_row(const RunRecord& record);
void write_report_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
void write_fields_csv(const std::filesystem::path& path, const KktPoint& solution, const ProblemSpec& spec,
                      const GridSpec& grid);

/// Exit status: 0 converged, 2 not converged.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitConfigError = 3;

/// Single solve; every list in `config` must hold exactly one value.
/// Writes report.csv and fields.csv into config.out.
struct CaseResult {
    RunRecord record;
    int exit_code{kExitConverged};
};
CaseResult run_case(const RunConfig& config, const SolverConfig& solver = {});

/// Table of outer(innerMax-innerMin) cells, one row per (L, p), one column
/// per eps, with a final monolithic baseline row.
struct SweepTable {
    std::vector<double> eps;
    std::vector<std::pair<int, double>> rows;        ///< (L cells, p)
    std::vector<std::vector<RunRecord>> cells;       ///< [row][eps]
    std::vector<RunRecord> baseline;                 ///< [eps]
    int cap{200};

    [[nodiscard]] std::string cell_text(const RunRecord& record, const char* dash) const;
    [[nodiscard]] std::string baseline_text(const RunRecord& record) const;
    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] std::string to_markdown() const;
};

/// Runs the full sweep; with `write` set, emits table.csv, table.md and
/// report.csv into config.out.
SweepTable sweep_table(const RunConfig& config, const SolverConfig& solver = {}, bool write = true);

}  // namespace wropt
