#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "wropt/grid.hpp"
#include "wropt/kkt.hpp"
#include "wropt/model.hpp"
#include "wropt/newton.hpp"

namespace wropt {

/// Robin data for one subdomain's interface rows, nt samples each.
struct TraceData {
    std::vector<double> g_y;
    std::vector<double> g_q;
};

/// States of subdomains 1 and 2, each on its own window (index j - 1).
using StatePair = std::array<KktPoint, 2>;

/// Robin traces of a donor state (living on subdomain 3 - receiver_j) at
/// receiver_j's interface, for every time level.
TraceData interface_traces(const KktPoint& donor, const Decomposition& decomp, int receiver_j);

/// Restriction of a whole-domain state to both subdomain windows.
StatePair restrict_pair(const KktPoint& global, const Decomposition& decomp);

/// Whole-domain field glued from the two subdomain states: nodes with
/// x <= 0 come from subdomain 1, nodes with x > 0 from subdomain 2.
KktPoint glue_pair(const StatePair& pair, const Decomposition& decomp);

/// The solution map S_j: the coupled nonlinear subdomain system with Robin
/// rows equal to `traces`, solved by local semismooth Newton started from
/// `warm_start` (or from zero). Throws SolverFailure if it does not converge.
KktPoint subdomain_solve(int j, const TraceData& traces, const ProblemSpec& spec, const Decomposition& decomp,
                         const SolverConfig& config, const KktPoint* warm_start = nullptr);

/// One parallel WRM step: (S_1(traces of pair[1]), S_2(traces of pair[0])).
struct SweepResult {
    StatePair states;
    std::array<TraceData, 2> traces;  ///< traces consumed by subdomain 1 and 2
};
SweepResult wrm_sweep(const StatePair& pair, const ProblemSpec& spec, const Decomposition& decomp,
                      const SolverConfig& config);

/// Stacked (z^1 - S_1(z^2), z^2 - S_2(z^1)) over the free unknowns of both windows.
std::vector<double> preconditioned_residual(const StatePair& pair, const ProblemSpec& spec,
                                            const Decomposition& decomp, const SolverConfig& config);
/// Same, from precomputed images S_j.
std::vector<double> preconditioned_residual(const StatePair& pair, const StatePair& images,
                                            const Decomposition& decomp);

/// DS_j applied to a direction: the linear coupled system with masks frozen
/// at `base` (a state on window j), zero source/initial/terminal data and
/// Robin rows equal to `direction_traces`.
KktPoint linearized_subdomain_solve(int j, const KktPoint& base, const TraceData& direction_traces,
                                    const ProblemSpec& spec, const Decomposition& decomp,
                                    const SolverConfig& config);

/// DF_P(d1, d2) = (d1 - DS_1(d2), d2 - DS_2(d1)) with masks taken from the
/// images S_j of the current pair. `direction` is stacked like F_P.
std::vector<double> dFp_apply(const StatePair& images, std::span<const double> direction,
                              const ProblemSpec& spec, const Decomposition& decomp, const SolverConfig& config);

/// Stacking helpers for pairs (window 1 unknowns, then window 2 unknowns).
std::vector<double> pack_pair(const StatePair& pair, const Decomposition& decomp);
StatePair unpack_pair(std::span<const double> stacked, const Decomposition& decomp);

struct PreconditionedResult {
    StatePair states;
    IterationReport report;
    std::string failure;  ///< empty unless a subdomain solve failed
};

/// WRM-preconditioned generalized Newton.
PreconditionedResult preconditioned_newton_solve(const ProblemSpec& spec, const Decomposition& decomp,
                                                 const SolverConfig& config);
PreconditionedResult preconditioned_newton_solve(const ProblemSpec& spec, const Decomposition& decomp,
                                                 const SolverConfig& config, StatePair initial);

/// Plain WRM iteration until the change between sweeps is below config.tol.
/// inner_counts records the larger local Newton count of each sweep.
PreconditionedResult wrm_iterate(const ProblemSpec& spec, const Decomposition& decomp, const SolverConfig& config);

}  // namespace wropt
