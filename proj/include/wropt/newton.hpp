#pragma once

#include <cstdint>
#include <vector>

#include "wropt/gmres.hpp"
#include "wropt/kkt.hpp"

namespace wropt {

struct SolverConfig {
    double tol{1e-6};  ///< outer tolerance on the discrete L2 residual norm
    int max_outer{200};
    GmresOptions gmres{1e-8, 500};
    double sub_tol{1e-10};  ///< subdomain (local) Newton tolerance
    int sub_max{50};
    GmresOptions sub_gmres{1e-10, 500};
    /// Backtracking on the residual norm in the monolithic solver; the
    /// undamped iteration cycles between active sets for small eps.
    bool line_search{true};
    /// Same backtracking on |F_P| in the preconditioned solver. Off by
    /// default: the outer iteration then takes full steps.
    bool outer_line_search{false};
    std::uint64_t rng_seed{0};
};

/// Outer iteration count, GMRES count per outer step, and residual norms
/// (entry 0 is the initial residual).
struct IterationReport {
    int outer_count{0};
    std::vector<int> inner_counts;
    bool converged{false};
    std::vector<double> residual_history;
    bool stopped_at_roundoff{false};

    [[nodiscard]] int inner_max() const;
    [[nodiscard]] int inner_min() const;
};

struct NewtonOptions {
    double tol{1e-6};
    int max_iter{200};
    GmresOptions gmres{};
    /// Also stop once the residual is within 10 eps_mach of
    /// kkt_residual_scale, the attainable floor for large Robin or penalty rows.
    bool accept_roundoff_floor{false};
    /// Backtrack t = 1, 1/2, ... on |F(z + t d)| (monotone residual decrease).
    bool line_search{false};
};

struct NewtonResult {
    KktPoint point;
    IterationReport report;
};

/// Semismooth Newton on one window: masks frozen at the iterate, J d = -F
/// by preconditioned GMRES, full or backtracked step.
NewtonResult newton_solve(const LocalProblem& problem, KktPoint initial, const NewtonOptions& options);

/// q0 ~ U[-c_u, c_u] on the free adjoint unknowns; y0 the forward solve
/// with source P(q0) + f. Deterministic in the seed.
KktPoint random_feasible_guess(const ProblemSpec& spec, const GridSpec& grid, std::uint64_t rng_seed);

/// Monolithic semismooth Newton from random_feasible_guess(config.rng_seed).
NewtonResult semismooth_newton_solve(const ProblemSpec& spec, const GridSpec& grid, const SolverConfig& config);
NewtonResult semismooth_newton_solve(const ProblemSpec& spec, const GridSpec& grid, const SolverConfig& config,
                                     KktPoint initial);

}  // namespace wropt
