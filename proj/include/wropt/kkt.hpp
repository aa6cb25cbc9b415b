#pragma once

#include <span>
#include <vector>

#include "wropt/gmres.hpp"
#include "wropt/grid.hpp"
#include "wropt/model.hpp"

namespace wropt {

/// State/adjoint pair on one window. y(0,.) holds the initial state and
/// q(nt-1,.) = 0; the free unknowns are y at m >= 1 and q at m <= nt-2 on
/// the window's unknown nodes.
struct KktPoint {
    Field y;
    Field q;
};

/// Optimality system restricted to a window: problem data sampled on the
/// window plus Robin data for the interface rows (empty on the full domain).
struct LocalProblem {
    Window window;
    Field f;
    std::vector<double> y0;
    std::vector<double> c_y;
    double c_u{1.0};
    double eps{0.1};
    std::vector<double> g_y;
    std::vector<double> g_q;
};

LocalProblem make_local_problem(const ProblemSpec& spec, const Window& window, std::vector<double> g_y = {},
                                std::vector<double> g_q = {});

/// Characteristic functions chi_I(q) and chi_A(y) frozen at a point.
struct Masks {
    Field inactive;
    Field active;
};

Masks masks_at(const LocalProblem& problem, const KktPoint& point);

/// Stacks (y-part, q-part) of a pair of window fields over the free unknowns.
std::vector<double> pack(const Window& window, const Field& y_part, const Field& q_part);
/// Inverse of pack; entries outside the free unknowns are zero.
KktPoint unpack(const Window& window, std::span<const double> stacked);

/// Discrete L2 norm sqrt(dt dx) |v|_2.
double discrete_l2(std::span<const double> v, const GridSpec& grid);

/// Pointwise residual rows as fields: forward rows at m = 1..nt-1 in `.y`,
/// adjoint rows for level m-1 = 0..nt-2 in `.q`. Interface nodes carry
/// R(v) - g, physical Dirichlet nodes and fixed levels are zero.
KktPoint kkt_residual_fields(const LocalProblem& problem, const KktPoint& point);

/// Stacked KKT residual F(y, q).
std::vector<double> kkt_residual(const LocalProblem& problem, const KktPoint& point);
std::vector<double> kkt_residual(const KktPoint& point, const ProblemSpec& spec, const GridSpec& grid);

/// Discrete L2 norm of the residual rows with every term replaced by its
/// absolute value; eps_mach times this bounds the attainable residual.
double kkt_residual_scale(const LocalProblem& problem, const KktPoint& point);

/// Generalized Jacobian of F with P' -> chi_I and (Q^eps)' -> chi_A/eps^2.
std::vector<double> generalized_jacobian_apply(const LocalProblem& problem, const Masks& masks,
                                               std::span<const double> direction);
std::vector<double> generalized_jacobian_apply(const KktPoint& point, const KktPoint& direction,
                                               const ProblemSpec& spec, const GridSpec& grid);

/// Inverse of the uncoupled forward/adjoint implicit-Euler operators applied
/// to a stacked row vector (block heat solves, zero initial/terminal data).
std::vector<double> heat_block_solve(const Window& window, std::span<const double> rows);

/// Solves J(masks) x = rhs with GMRES on the heat-block-preconditioned
/// system, so the Krylov operator is identity minus the mask couplings.
GmresResult solve_linearized(const LocalProblem& problem, const Masks& masks, std::span<const double> rhs,
                             const GmresOptions& options);

}  // namespace wropt
