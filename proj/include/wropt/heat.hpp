#pragma once

#include <span>
#include <vector>

#include "wropt/grid.hpp"
#include "wropt/model.hpp"

namespace wropt {

/// Robin operator R(v) = v_x +/- p v at an interface node, using the
/// interface value and its single interior-side neighbour. The same
/// one-sided stencil serves as donor trace and as receiver boundary row.
///   right interface: (v_iface - v_inner)/dx + p v_iface
///   left interface:  (v_inner - v_iface)/dx - p v_iface
inline double robin_stencil(RobinSide side, double dx, double p, double v_iface, double v_inner) {
    return side == RobinSide::right ? (v_iface - v_inner) / dx + p * v_iface
                                    : (v_inner - v_iface) / dx - p * v_iface;
}

/// Factored implicit-Euler step matrix (1/dt - Laplacian_h) on the unknown
/// nodes of a window, with Robin rows where the window has an interface.
class StepMatrix {
public:
    explicit StepMatrix(const Window& window);

    /// In-place solve; `rhs` has one entry per unknown node (lo..hi).
    void solve(std::span<double> rhs) const;

private:
    std::vector<double> sub_;
    std::vector<double> inv_pivot_;
    std::vector<double> sup_mod_;
};

/// Marches the forward equation in time. `rows` holds, for m >= 1, the
/// source at PDE nodes and the boundary datum at the Robin node; row 0 is
/// unused. Returns v with v(0,.) = initial, Dirichlet nodes zero for m >= 1.
Field march_forward(const Window& window, const Field& rows, std::span<const double> initial);

/// Marches the adjoint equation backward: for m = nt-1..1,
/// (v^m - v^{m-1})/dt + Laplacian_h v^{m-1} = rows(m-1,.) at PDE nodes and
/// R(v^{m-1}) = rows(m-1, robin node). v(nt-1,.) = terminal.
Field march_backward(const Window& window, const Field& rows, std::span<const double> terminal);

/// Implicit Euler for y_t - y_xx = source with y(0) = y0 (window.count
/// samples) and, on a subdomain window, R(y)(t_m) = robin_data[m].
Field forward_heat_solve(const Window& window, const Field& source, std::span<const double> y0,
                         std::span<const double> robin_data = {});

/// Backward implicit Euler for q_t + q_xx = source with q(T) = 0 and, on a
/// subdomain window, R(q)(t_m) = robin_data[m].
Field backward_adjoint_solve(const Window& window, const Field& source, std::span<const double> robin_data = {});

/// Robin trace, at time step m, of a field living on the donor subdomain
/// 3 - receiver_j, evaluated at receiver_j's interface node.
double robin_trace(const Field& field, const Decomposition& decomp, int receiver_j, int m);

}  // namespace wropt
