#include "wropt/newton.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "wropt/heat.hpp"

namespace wropt {

namespace {
constexpr int kMaxHalvings = 30;
// Observed floors sit near 0.13 eps_mach times the residual scale.
constexpr double kFloorFactor = 10.0;
}  // namespace

int IterationReport::inner_max() const {
    return inner_counts.empty() ? 0 : *std::max_element(inner_counts.begin(), inner_counts.end());
}

int IterationReport::inner_min() const {
    return inner_counts.empty() ? 0 : *std::min_element(inner_counts.begin(), inner_counts.end());
}

NewtonResult newton_solve(const LocalProblem& problem, KktPoint initial, const NewtonOptions& options) {
    const Window& w = problem.window;
    NewtonResult result{std::move(initial), {}};
    KktPoint& z = result.point;
    IterationReport& report = result.report;

    auto residual = kkt_residual(problem, z);
    double norm = discrete_l2(residual, w.grid);
    report.residual_history.push_back(norm);
    while (norm > options.tol && report.outer_count < options.max_iter) {
        const Masks masks = masks_at(problem, z);
        for (double& r : residual) r = -r;
        const GmresResult step = solve_linearized(problem, masks, residual, options.gmres);
        report.inner_counts.push_back(step.iterations);
        const KktPoint d = unpack(w, step.solution);
        const double previous = norm;
        if (options.line_search) {
            double t = 1.0;
            KktPoint trial;
            for (int halving = 0;; ++halving) {
                trial = z;
                trial.y += t * d.y;
                trial.q += t * d.q;
                residual = kkt_residual(problem, trial);
                norm = discrete_l2(residual, w.grid);
                if (norm < (1.0 - 1e-4 * t) * previous || halving == kMaxHalvings) break;
                t *= 0.5;
            }
            z = std::move(trial);
        } else {
            z.y += d.y;
            z.q += d.q;
            residual = kkt_residual(problem, z);
            norm = discrete_l2(residual, w.grid);
        }
        ++report.outer_count;

        report.residual_history.push_back(norm);
        if (options.accept_roundoff_floor && norm > options.tol &&
            norm <= kFloorFactor * std::numeric_limits<double>::epsilon() * kkt_residual_scale(problem, z)) {
            report.stopped_at_roundoff = true;
            break;
        }
    }
    report.converged =
        (norm <= options.tol || report.stopped_at_roundoff) && z.y.all_finite() && z.q.all_finite();
    return result;
}

KktPoint random_feasible_guess(const ProblemSpec& spec, const GridSpec& grid, std::uint64_t rng_seed) {
    spec.validate(grid);
    const Window w = Window::whole(grid);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uniform(-spec.c_u, spec.c_u);

    Field q(FieldTag::of(grid));
    for (int m = 0; m < grid.nt - 1; ++m) {
        for (int i = w.lo(); i <= w.hi(); ++i) q(m, i) = uniform(rng);
    }
    Field source = spec.f;
    for (int m = 0; m < grid.nt; ++m) {
        for (int i = 0; i < grid.nx; ++i) source(m, i) += clamp_control(q(m, i), spec.c_u);
    }
    Field y = forward_heat_solve(w, source, spec.y0);
    return KktPoint{std::move(y), std::move(q)};
}

NewtonResult semismooth_newton_solve(const ProblemSpec& spec, const GridSpec& grid, const SolverConfig& config) {
    return semismooth_newton_solve(spec, grid, config, random_feasible_guess(spec, grid, config.rng_seed));
}

NewtonResult semismooth_newton_solve(const ProblemSpec& spec, const GridSpec& grid, const SolverConfig& config,
                                     KktPoint initial) {
    const LocalProblem problem = make_local_problem(spec, Window::whole(grid));
    return newton_solve(problem, std::move(initial), NewtonOptions{config.tol, config.max_outer, config.gmres, false, config.line_search});
}

}  // namespace wropt
