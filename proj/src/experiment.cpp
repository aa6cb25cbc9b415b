#include "wropt/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wropt/errors.hpp"

namespace wropt {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) items.push_back(trim(item));
    return items;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key, int line) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError("invalid value '" + text + "' for key '" + key + "'", line);
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& value, const std::string& key, int line) {
    std::vector<T> out;
    for (const auto& item : split_list(value)) out.push_back(parse_number<T>(item, key, line));
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'", line);
    return out;
}

std::string format_number(double v) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) out += ',';
        if constexpr (std::is_floating_point_v<T>) out += format_number(values[k]);
        else out += std::to_string(values[k]);
    }
    return out;
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::monolithic: return "monolithic";
        case Method::wrm_preconditioned: return "wrm-preconditioned";
        case Method::wrm_only: return "wrm-only";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    if (text == "monolithic") return Method::monolithic;
    if (text == "wrm-preconditioned") return Method::wrm_preconditioned;
    if (text == "wrm-only") return Method::wrm_only;
    throw ConfigError("unknown method '" + text + "'");
}

void apply_config_value(RunConfig& config, const std::string& key, const std::string& value, int line) {
    if (key == "test") {
        if (value != "1" && value != "2" && value != "zero") throw ConfigError("unknown test case '" + value + "'", line);
        config.test = value;
    } else if (key == "eps") {
        config.eps = parse_list<double>(value, key, line);
    } else if (key == "overlap_cells") {
        config.overlap_cells = parse_list<int>(value, key, line);
    } else if (key == "robin_p") {
        config.robin_p = parse_list<double>(value, key, line);
    } else if (key == "method") {
        try {
            config.method = parse_method(value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), line);
        }
    } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(value, key, line);
    } else if (key == "nx") {
        config.nx = parse_number<int>(value, key, line);
    } else if (key == "nt") {
        config.nt = parse_number<int>(value, key, line);
    } else if (key == "out") {
        if (value.empty()) throw ConfigError("empty output directory", line);
        config.out = value;
    } else {
        throw ConfigError("unknown key '" + key + "'", line);
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::stringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + content + "'", line);
        apply_config_value(config, trim(content.substr(0, eq)), trim(content.substr(eq + 1)), line);
    }
    return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "test=" << c.test << '\n'
        << "eps=" << join(c.eps) << '\n'
        << "overlap_cells=" << join(c.overlap_cells) << '\n'
        << "robin_p=" << join(c.robin_p) << '\n'
        << "method=" << to_string(c.method) << '\n'
        << "seed=" << c.seed << '\n'
        << "nx=" << c.nx << '\n'
        << "nt=" << c.nt << '\n'
        << "out=" << c.out << '\n';
    return out.str();
}

TestCase builtin_test_case(int id, int nx, int nt, double eps) {
    if (id != 1 && id != 2) throw ParameterError("unknown built-in test case " + std::to_string(id));
    TestCase tc;
    tc.grid = GridSpec{nx, nt, -1.0, 1.0, 1.0};
    tc.grid.validate();
    const GridSpec& g = tc.grid;
    ProblemSpec& s = tc.spec;
    s.T = 1.0;
    s.eps = eps;
    s.c_u = id == 1 ? 30.0 : 15.0;
    s.f = Field(FieldTag::of(g), id == 1 ? 20.0 : 18.0);
    s.y0.resize(nx);
    for (int i = 0; i < nx; ++i) s.y0[i] = 5.0 * std::sin(std::numbers::pi * g.x(i));
    s.y0.front() = 0.0;
    s.y0.back() = 0.0;
    s.c_y.resize(nt);
    for (int m = 0; m < nt; ++m) {
        const double t = g.t(m);
        s.c_y[m] = id == 1 ? 10.0 * (1.0 - t) + 3.0 : 2.0 * (1.0 - t) + 3.0;
    }
    return tc;
}

TestCase named_test_case(const std::string& name, int nx, int nt, double eps) {
    if (name == "1") return builtin_test_case(1, nx, nt, eps);
    if (name == "2") return builtin_test_case(2, nx, nt, eps);
    if (name == "zero") {
        TestCase tc = builtin_test_case(1, nx, nt, eps);
        std::fill(tc.spec.y0.begin(), tc.spec.y0.end(), 0.0);
        tc.spec.f = Field(FieldTag::of(tc.grid), 0.0);
        return tc;
    }
    throw ConfigError("unknown test case '" + name + "'");
}

RunRecord run_single(const RunConfig& config, double eps, int overlap_cells, double robin_p,
                     const SolverConfig& solver_in) {
    const TestCase tc = named_test_case(config.test, config.nx, config.nt, eps);
    SolverConfig solver = solver_in;
    solver.rng_seed = config.seed;

    RunRecord record;
    record.eps = eps;
    record.method = config.method;
    const auto start = std::chrono::steady_clock::now();
    if (config.method == Method::monolithic) {
        NewtonResult r = semismooth_newton_solve(tc.spec, tc.grid, solver);
        record.report = std::move(r.report);
        record.solution = std::move(r.point);
    } else {
        record.overlap_cells = overlap_cells;
        record.robin_p = robin_p;
        const Decomposition decomp = build_decomposition(tc.grid, overlap_cells, robin_p);
        PreconditionedResult r = config.method == Method::wrm_preconditioned
                                     ? preconditioned_newton_solve(tc.spec, decomp, solver)
                                     : wrm_iterate(tc.spec, decomp, solver);
        record.report = std::move(r.report);
        record.failure = std::move(r.failure);
        record.solution = glue_pair(r.states, decomp);
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

std::string report_row(const RunRecord& r) {
    std::ostringstream out;
    out << r.overlap_cells << ',' << format_number(r.robin_p) << ',' << format_number(r.eps) << ','
        << to_string(r.method) << ',' << r.report.outer_count << ',' << r.report.inner_max() << ','
        << r.report.inner_min() << ',' << (r.report.converged ? 1 : 0) << ',' << r.seconds;
    return out.str();
}

void write_report_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path);
    out << kReportHeader << '\n';
    for (const auto& r : records) out << report_row(r) << '\n';
}

void write_fields_csv(const std::filesystem::path& path, const KktPoint& solution, const ProblemSpec& spec,
                      const GridSpec& grid) {
    const Controls controls = recover_controls(solution.y, solution.q, spec);
    std::ofstream out(path);
    out << kFieldsHeader << '\n';
    for (int m = 0; m < grid.nt; ++m) {
        for (int i = 0; i < grid.nx; ++i) {
            out << format_number(grid.t(m)) << ',' << format_number(grid.x(i)) << ','
                << format_number(solution.y(m, i)) << ',' << format_number(solution.q(m, i)) << ','
                << format_number(controls.u(m, i)) << ',' << format_number(controls.w(m, i)) << '\n';
        }
    }
}

CaseResult run_case(const RunConfig& config, const SolverConfig& solver) {
    if (config.eps.size() != 1 || config.overlap_cells.size() != 1 || config.robin_p.size() != 1) {
        throw ConfigError("solve expects exactly one value for eps, overlap_cells and robin_p");
    }
    CaseResult result;
    result.record = run_single(config, config.eps[0], config.overlap_cells[0], config.robin_p[0], solver);
    const std::filesystem::path dir(config.out);
    std::filesystem::create_directories(dir);
    write_report_csv(dir / "report.csv", {result.record});
    const TestCase tc = named_test_case(config.test, config.nx, config.nt, config.eps[0]);
    write_fields_csv(dir / "fields.csv", result.record.solution, tc.spec, tc.grid);
    result.exit_code = result.record.report.converged ? kExitConverged : kExitNotConverged;
    return result;
}

std::string SweepTable::cell_text(const RunRecord& r, const char* dash) const {
    const int outer = r.report.converged ? r.report.outer_count : cap;
    return std::to_string(outer) + "(" + std::to_string(r.report.inner_max()) + dash +
           std::to_string(r.report.inner_min()) + ")";
}

std::string SweepTable::baseline_text(const RunRecord& r) const {
    return std::to_string(r.report.converged ? r.report.outer_count : cap);
}

namespace {

std::string overlap_label(int cells) { return cells == 1 ? "Δx" : std::to_string(cells) + "Δx"; }

}  // namespace

std::string SweepTable::to_csv() const {
    std::ostringstream out;
    out << "L_cells,p";
    for (double e : eps) out << ',' << format_number(e);
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << rows[r].first << ',' << format_number(rows[r].second);
        for (const auto& cell : cells[r]) out << ',' << cell_text(cell, "-");
        out << '\n';
    }
    out << "Sem. New.,";
    for (const auto& b : baseline) out << ',' << baseline_text(b);
    out << '\n';
    return out.str();
}

std::string SweepTable::to_markdown() const {
    std::ostringstream out;
    out << "| L | p \\ eps |";
    for (double e : eps) out << ' ' << format_number(e) << " |";
    out << "\n|---|---|";
    for (std::size_t k = 0; k < eps.size(); ++k) out << "---|";
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << "| " << overlap_label(rows[r].first) << " | " << format_number(rows[r].second) << " |";
        for (const auto& cell : cells[r]) out << ' ' << cell_text(cell, "–") << " |";
        out << '\n';
    }
    out << "| Sem. New. | |";
    for (const auto& b : baseline) out << ' ' << baseline_text(b) << " |";
    out << '\n';
    return out.str();
}

SweepTable sweep_table(const RunConfig& config, const SolverConfig& solver, bool write) {
    if (config.eps.empty() || config.overlap_cells.empty() || config.robin_p.empty()) {
        throw ConfigError("sweep axes must be non-empty");
    }
    SweepTable table;
    table.eps = config.eps;
    table.cap = solver.max_outer;
    RunConfig cell_config = config;
    cell_config.method = config.method == Method::wrm_only ? Method::wrm_only : Method::wrm_preconditioned;
    RunConfig base_config = config;
    base_config.method = Method::monolithic;

    std::vector<RunRecord> all;
    for (int k : config.overlap_cells) {
        for (double p : config.robin_p) {
            table.rows.emplace_back(k, p);
            std::vector<RunRecord> row;
            for (double e : config.eps) {
                row.push_back(run_single(cell_config, e, k, p, solver));
                all.push_back(row.back());
                all.back().solution = {};
            }
            table.cells.push_back(std::move(row));
        }
    }
    for (double e : config.eps) {
        table.baseline.push_back(run_single(base_config, e, 0, 0.0, solver));
        all.push_back(table.baseline.back());
        all.back().solution = {};
    }
    if (write) {
        const std::filesystem::path dir(config.out);
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "table.csv") << table.to_csv();
        std::ofstream(dir / "table.md") << table.to_markdown();
        write_report_csv(dir / "report.csv", all);
    }
    return table;
}

}  // namespace wropt
