#include "wropt/wrm.hpp"

#include <algorithm>
#include <string>

#include "wropt/errors.hpp"
#include "wropt/heat.hpp"

namespace wropt {

namespace {

constexpr int kMaxHalvings = 30;

void require_receiver(int j) {
    if (j != 1 && j != 2) throw ParameterError("subdomain index must be 1 or 2, got " + std::to_string(j));
}

/// Fixes the non-free entries of a start point: initial slice, terminal
/// adjoint slice and physical Dirichlet node.
KktPoint normalized_start(const LocalProblem& problem, const KktPoint* start) {
    const Window& w = problem.window;
    const FieldTag tag = FieldTag::of(w);
    KktPoint z{Field(tag), Field(tag)};
    if (start != nullptr) {
        if (!(start->y.tag() == tag) || !(start->q.tag() == tag)) {
            throw DimensionError("warm start does not live on the subdomain window");
        }
        z = *start;
    }
    const int nt = w.grid.nt;
    std::copy(problem.y0.begin(), problem.y0.end(), z.y.row(0).begin());
    std::fill(z.q.row(nt - 1).begin(), z.q.row(nt - 1).end(), 0.0);
    const int dirichlet = w.robin == RobinSide::right ? 0 : w.count - 1;
    for (int m = 1; m < nt; ++m) z.y(m, dirichlet) = 0.0;
    for (int m = 0; m < nt; ++m) z.q(m, dirichlet) = 0.0;
    return z;
}

NewtonOptions local_options(const SolverConfig& config) {
    return NewtonOptions{config.sub_tol, config.sub_max, config.sub_gmres, true, true};
}

/// Right-hand side of the linearized subdomain system: Robin rows carry the
/// direction traces, every other row is zero.
std::vector<double> robin_rhs(const Window& w, const TraceData& traces) {
    const FieldTag tag = FieldTag::of(w);
    Field ry(tag), rq(tag);
    const int node = w.robin == RobinSide::left ? 0 : w.count - 1;
    for (int m = 1; m < w.grid.nt; ++m) ry(m, node) = traces.g_y[m];
    for (int m = 0; m < w.grid.nt - 1; ++m) rq(m, node) = traces.g_q[m];
    return pack(w, ry, rq);
}

/// Linearized maps DS_1, DS_2 with masks frozen at the images.
class LinearizedMaps {
public:
    LinearizedMaps(const StatePair& images, const ProblemSpec& spec, const Decomposition& decomp,
                   const SolverConfig& config)
        : decomp_(decomp), config_(config) {
        for (int j = 1; j <= 2; ++j) {
            problems_[j - 1] = make_local_problem(spec, decomp.window(j));
            masks_[j - 1] = masks_at(problems_[j - 1], images[j - 1]);
        }
    }

    KktPoint apply(int j, const TraceData& direction_traces) const {
        const LocalProblem& problem = problems_[j - 1];
        const auto rhs = robin_rhs(problem.window, direction_traces);
        const GmresResult solve = solve_linearized(problem, masks_[j - 1], rhs, config_.sub_gmres);
        if (!solve.converged) {
            throw SolverFailure("linearized subdomain solve " + std::to_string(j) + " did not converge");
        }
        return unpack(problem.window, solve.solution);
    }

    std::vector<double> dfp(std::span<const double> direction) const {
        const StatePair d = unpack_pair(direction, decomp_);
        StatePair lin;
        for (int j = 1; j <= 2; ++j) lin[j - 1] = apply(j, interface_traces(d[2 - j], decomp_, j));
        std::vector<double> out = pack_pair(lin, decomp_);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = direction[k] - out[k];
        return out;
    }

private:
    const Decomposition& decomp_;
    const SolverConfig& config_;
    std::array<LocalProblem, 2> problems_;
    std::array<Masks, 2> masks_;
};

}  // namespace

TraceData interface_traces(const KktPoint& donor, const Decomposition& decomp, int receiver_j) {
    require_receiver(receiver_j);
    const int nt = decomp.grid.nt;
    TraceData t{std::vector<double>(nt), std::vector<double>(nt)};
    for (int m = 0; m < nt; ++m) {
        t.g_y[m] = robin_trace(donor.y, decomp, receiver_j, m);
        t.g_q[m] = robin_trace(donor.q, decomp, receiver_j, m);
    }
    return t;
}

StatePair restrict_pair(const KktPoint& global, const Decomposition& decomp) {
    StatePair pair;
    for (int j = 1; j <= 2; ++j) {
        const Window w = decomp.window(j);
        pair[j - 1] = KktPoint{restrict_to(global.y, w), restrict_to(global.q, w)};
    }
    return pair;
}

KktPoint glue_pair(const StatePair& pair, const Decomposition& decomp) {
    const GridSpec& g = decomp.grid;
    const int mid = (g.nx - 1) / 2;
    KktPoint out{Field(FieldTag::of(g)), Field(FieldTag::of(g))};
    for (int m = 0; m < g.nt; ++m) {
        for (int i = 0; i < g.nx; ++i) {
            const KktPoint& src = i <= mid ? pair[0] : pair[1];
            out.y(m, i) = src.y.at_global(m, i);
            out.q(m, i) = src.q.at_global(m, i);
        }
    }
    return out;
}

KktPoint subdomain_solve(int j, const TraceData& traces, const ProblemSpec& spec, const Decomposition& decomp,
                         const SolverConfig& config, const KktPoint* warm_start) {
    require_receiver(j);
    const LocalProblem problem = make_local_problem(spec, decomp.window(j), traces.g_y, traces.g_q);
    const NewtonOptions options = local_options(config);
    NewtonResult result = newton_solve(problem, normalized_start(problem, warm_start), options);
    if (!result.report.converged && warm_start != nullptr) {
        // Retry from the zero start before giving up.
        result = newton_solve(problem, normalized_start(problem, nullptr), options);
    }
    if (!result.report.converged) {
        const double last = result.report.residual_history.back();
        throw SolverFailure("subdomain " + std::to_string(j) + " Newton stopped after " +
                            std::to_string(result.report.outer_count) + " iterations, residual " +
                            std::to_string(last));
    }
    return std::move(result.point);
}

SweepResult wrm_sweep(const StatePair& pair, const ProblemSpec& spec, const Decomposition& decomp,
                      const SolverConfig& config) {
    SweepResult out;
    for (int j = 1; j <= 2; ++j) {
        out.traces[j - 1] = interface_traces(pair[2 - j], decomp, j);
        out.states[j - 1] = subdomain_solve(j, out.traces[j - 1], spec, decomp, config, &pair[j - 1]);
    }
    return out;
}

std::vector<double> pack_pair(const StatePair& pair, const Decomposition& decomp) {
    std::vector<double> out = pack(decomp.window(1), pair[0].y, pair[0].q);
    const std::vector<double> second = pack(decomp.window(2), pair[1].y, pair[1].q);
    out.insert(out.end(), second.begin(), second.end());
    return out;
}

StatePair unpack_pair(std::span<const double> stacked, const Decomposition& decomp) {
    const Window w1 = decomp.window(1), w2 = decomp.window(2);
    if (stacked.size() != w1.stacked_size() + w2.stacked_size()) throw DimensionError("unpack_pair: size");
    return StatePair{unpack(w1, stacked.first(w1.stacked_size())), unpack(w2, stacked.subspan(w1.stacked_size()))};
}

std::vector<double> preconditioned_residual(const StatePair& pair, const StatePair& images,
                                            const Decomposition& decomp) {
    std::vector<double> out = pack_pair(pair, decomp);
    const std::vector<double> img = pack_pair(images, decomp);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= img[k];
    return out;
}

std::vector<double> preconditioned_residual(const StatePair& pair, const ProblemSpec& spec,
                                            const Decomposition& decomp, const SolverConfig& config) {
    return preconditioned_residual(pair, wrm_sweep(pair, spec, decomp, config).states, decomp);
}

KktPoint linearized_subdomain_solve(int j, const KktPoint& base, const TraceData& direction_traces,
                                    const ProblemSpec& spec, const Decomposition& decomp,
                                    const SolverConfig& config) {
    require_receiver(j);
    StatePair images;
    images[j - 1] = base;
    images[2 - j] = base;  // placeholder; only map j is used
    const Window other = decomp.window(3 - j);
    images[2 - j] = KktPoint{Field(FieldTag::of(other)), Field(FieldTag::of(other))};
    return LinearizedMaps(images, spec, decomp, config).apply(j, direction_traces);
}

std::vector<double> dFp_apply(const StatePair& images, std::span<const double> direction,
                              const ProblemSpec& spec, const Decomposition& decomp, const SolverConfig& config) {
    return LinearizedMaps(images, spec, decomp, config).dfp(direction);
}

PreconditionedResult preconditioned_newton_solve(const ProblemSpec& spec, const Decomposition& decomp,
                                                 const SolverConfig& config) {
    return preconditioned_newton_solve(spec, decomp, config,
                                       restrict_pair(random_feasible_guess(spec, decomp.grid, config.rng_seed), decomp));
}

PreconditionedResult preconditioned_newton_solve(const ProblemSpec& spec, const Decomposition& decomp,
                                                 const SolverConfig& config, StatePair initial) {
    spec.validate(decomp.grid);
    PreconditionedResult result{std::move(initial), {}, {}};
    StatePair& z = result.states;
    IterationReport& report = result.report;
    const GridSpec& grid = decomp.grid;

    try {
        StatePair images = wrm_sweep(z, spec, decomp, config).states;
        std::vector<double> residual = preconditioned_residual(z, images, decomp);
        double norm = discrete_l2(residual, grid);
        report.residual_history.push_back(norm);

        while (norm >= config.tol && report.outer_count < config.max_outer) {
            const LinearizedMaps maps(images, spec, decomp, config);
            const LinearOperator op{residual.size(), [&](std::span<const double> x, std::span<double> out) {
                                        const auto y = maps.dfp(x);
                                        std::copy(y.begin(), y.end(), out.begin());
                                    }};
            for (double& r : residual) r = -r;
            const GmresResult step = gmres(op, residual, config.gmres);
            report.inner_counts.push_back(step.iterations);
            const StatePair d = unpack_pair(step.solution, decomp);
            const double previous = norm;
            double t = 1.0;
            for (int halving = 0;; ++halving) {
                StatePair trial = z;
                for (int j = 0; j < 2; ++j) {
                    trial[j].y += t * d[j].y;
                    trial[j].q += t * d[j].q;
                }
                const bool last = !config.outer_line_search || halving == kMaxHalvings;
                try {
                    StatePair trial_images = wrm_sweep(trial, spec, decomp, config).states;
                    std::vector<double> trial_residual = preconditioned_residual(trial, trial_images, decomp);
                    const double trial_norm = discrete_l2(trial_residual, grid);
                    if (last || trial_norm < (1.0 - 1e-4 * t) * previous) {
                        z = std::move(trial);
                        images = std::move(trial_images);
                        residual = std::move(trial_residual);
                        norm = trial_norm;
                        break;
                    }
                } catch (const SolverFailure&) {
                    if (last) throw;
                }
                t *= 0.5;
            }
            ++report.outer_count;
            report.residual_history.push_back(norm);
        }
        report.converged = norm < config.tol;
    } catch (const SolverFailure& e) {
        report.converged = false;
        result.failure = e.what();
    }
    return result;
}

PreconditionedResult wrm_iterate(const ProblemSpec& spec, const Decomposition& decomp, const SolverConfig& config) {
    spec.validate(decomp.grid);
    PreconditionedResult result{restrict_pair(random_feasible_guess(spec, decomp.grid, config.rng_seed), decomp),
                                {},
                                {}};
    IterationReport& report = result.report;
    try {
        while (report.outer_count < config.max_outer) {
            StatePair next = wrm_sweep(result.states, spec, decomp, config).states;
            const double change = discrete_l2(preconditioned_residual(result.states, next, decomp), decomp.grid);
            result.states = std::move(next);
            ++report.outer_count;
            report.inner_counts.push_back(0);
            report.residual_history.push_back(change);
            if (change < config.tol) {
                report.converged = true;
                break;
            }
        }
    } catch (const SolverFailure& e) {
        result.failure = e.what();
    }
    return result;
}

}  // namespace wropt
