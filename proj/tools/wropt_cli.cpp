// Command-line driver: single solves, (L, p, eps) sweeps and case dumps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "wropt/errors.hpp"
#include "wropt/experiment.hpp"

namespace {

struct Overrides {
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> values;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option_function<std::string>(
        "--config", [&o](const std::string& v) { o.config_path = v; }, "key=value configuration file");
    for (const char* key : {"test", "eps", "overlap_cells", "robin_p", "method", "seed", "nx", "nt", "out"}) {
        std::string flag = std::string("--") + key;
        cmd->add_option_function<std::string>(
            flag, [&o, key](const std::string& v) { o.values.emplace_back(key, v); },
            std::string("override '") + key + "'");
    }
}

wropt::RunConfig resolve(const Overrides& o) {
    wropt::RunConfig config = o.config_path ? wropt::parse_config(*o.config_path) : wropt::RunConfig{};
    for (const auto& [key, value] : o.values) wropt::apply_config_value(config, key, value);
    return config;
}

int dump_case(const wropt::RunConfig& config) {
    const wropt::TestCase tc = wropt::named_test_case(config.test, config.nx, config.nt, config.eps.front());
    const std::filesystem::path dir(config.out);
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "case.csv");
    out << "t,x,f,c_y,y0\n";
    for (int m = 0; m < tc.grid.nt; ++m) {
        for (int i = 0; i < tc.grid.nx; ++i) {
            out << tc.grid.t(m) << ',' << tc.grid.x(i) << ',' << tc.spec.f(m, i) << ',' << tc.spec.c_y[m] << ','
                << (m == 0 ? tc.spec.y0[i] : 0.0) << '\n';
        }
    }
    std::cout << "test=" << config.test << " T=" << tc.spec.T << " c_u=" << tc.spec.c_u
              << " c_y(0)=" << tc.spec.c_y.front() << " c_y(T)=" << tc.spec.c_y.back() << " nx=" << tc.grid.nx
              << " nt=" << tc.grid.nt << " dx=" << tc.grid.dx() << " dt=" << tc.grid.dt() << '\n';
    return wropt::kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semismooth Newton and WRM-preconditioned Newton for state-constrained economic control"};
    app.require_subcommand(1);
    Overrides solve_o, sweep_o, dump_o;
    auto* solve = app.add_subcommand("solve", "run one method on one (L, p, eps) and write report.csv/fields.csv");
    auto* sweep = app.add_subcommand("sweep", "run the (L, p) x eps table plus the monolithic baseline row");
    auto* dump = app.add_subcommand("dump-case", "write the problem data of a test case to case.csv");
    add_config_flags(solve, solve_o);
    add_config_flags(sweep, sweep_o);
    add_config_flags(dump, dump_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : wropt::kExitConfigError;
    }

    try {
        if (*solve) {
            const auto result = wropt::run_case(resolve(solve_o));
            std::cout << wropt::kReportHeader << '\n' << wropt::report_row(result.record) << '\n';
            if (!result.record.failure.empty()) std::cerr << result.record.failure << '\n';
            return result.exit_code;
        }
        if (*sweep) {
            const auto config = resolve(sweep_o);
            const auto table = wropt::sweep_table(config);
            std::cout << table.to_markdown();
            return wropt::kExitConverged;
        }
        return dump_case(resolve(dump_o));
    } catch (const wropt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return wropt::kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return wropt::kExitConfigError;
    }
}
