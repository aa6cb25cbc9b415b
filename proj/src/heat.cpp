#include "wropt/heat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "wropt/errors.hpp"

namespace wropt {

StepMatrix::StepMatrix(const Window& window) {
    const int n = window.unknowns_per_step();
    const double dx = window.grid.dx();
    const double idx2 = 1.0 / (dx * dx);
    const double diag_pde = 1.0 / window.grid.dt() + 2.0 * idx2;

    std::vector<double> sub(n, -idx2), diag(n, diag_pde), sup(n, -idx2);
    if (window.robin == RobinSide::right) {
        sub[n - 1] = -1.0 / dx;
        diag[n - 1] = 1.0 / dx + window.robin_p;
    } else if (window.robin == RobinSide::left) {
        diag[0] = -1.0 / dx - window.robin_p;
        sup[0] = 1.0 / dx;
    }
    sub[0] = 0.0;
    sup[n - 1] = 0.0;

    // Thomas factorization, kept for repeated solves.
    sub_ = sub;
    inv_pivot_.resize(n);
    sup_mod_.resize(n);
    double pivot = diag[0];
    for (int k = 0; k < n; ++k) {
        if (k > 0) pivot = diag[k] - sub[k] * sup_mod_[k - 1];
        assert(std::abs(pivot) > 0.0);
        inv_pivot_[k] = 1.0 / pivot;
        sup_mod_[k] = sup[k] * inv_pivot_[k];
    }
}

void StepMatrix::solve(std::span<double> rhs) const {
    const std::size_t n = inv_pivot_.size();
    assert(rhs.size() == n);
    rhs[0] *= inv_pivot_[0];
    for (std::size_t k = 1; k < n; ++k) rhs[k] = (rhs[k] - sub_[k] * rhs[k - 1]) * inv_pivot_[k];
    for (std::size_t k = n - 1; k-- > 0;) rhs[k] -= sup_mod_[k] * rhs[k + 1];
}

namespace {

void require_window_field(const Window& window, const Field& f, const char* what) {
    if (!(f.tag() == FieldTag::of(window))) throw DimensionError(std::string(what) + ": field/window mismatch");
}

}  // namespace

Field march_forward(const Window& window, const Field& rows, std::span<const double> initial) {
    require_window_field(window, rows, "march_forward");
    if (static_cast<int>(initial.size()) != window.count) throw DimensionError("march_forward: initial slice size");
    const StepMatrix step(window);
    const int lo = window.lo(), hi = window.hi();
    const double inv_dt = 1.0 / window.grid.dt();
    Field v(rows.tag());
    std::copy(initial.begin(), initial.end(), v.row(0).begin());
    std::vector<double> rhs(window.unknowns_per_step());
    for (int m = 1; m < v.nt(); ++m) {
        for (int i = lo; i <= hi; ++i) {
            rhs[i - lo] = window.is_robin_node(i) ? rows(m, i) : rows(m, i) + inv_dt * v(m - 1, i);
        }
        step.solve(rhs);
        for (int i = lo; i <= hi; ++i) v(m, i) = rhs[i - lo];
    }
    return v;
}

Field march_backward(const Window& window, const Field& rows, std::span<const double> terminal) {
    require_window_field(window, rows, "march_backward");
    if (static_cast<int>(terminal.size()) != window.count) throw DimensionError("march_backward: terminal slice size");
    const StepMatrix step(window);
    const int lo = window.lo(), hi = window.hi();
    const double inv_dt = 1.0 / window.grid.dt();
    Field v(rows.tag());
    const int last = v.nt() - 1;
    std::copy(terminal.begin(), terminal.end(), v.row(last).begin());
    std::vector<double> rhs(window.unknowns_per_step());
    for (int m = last; m >= 1; --m) {
        // (1/dt - Lap) v^{m-1} = v^m/dt - rows^{m-1}
        for (int i = lo; i <= hi; ++i) {
            rhs[i - lo] = window.is_robin_node(i) ? rows(m - 1, i) : inv_dt * v(m, i) - rows(m - 1, i);
        }
        step.solve(rhs);
        for (int i = lo; i <= hi; ++i) v(m - 1, i) = rhs[i - lo];
    }
    return v;
}

namespace {

Field with_robin_rows(const Window& window, Field rows, std::span<const double> robin_data) {
    if (window.robin == RobinSide::none) {
        if (!robin_data.empty()) throw DimensionError("Robin data given for a window without interface");
        return rows;
    }
    if (static_cast<int>(robin_data.size()) != window.grid.nt) {
        throw DimensionError("Robin data must have nt samples");
    }
    const int node = window.robin == RobinSide::left ? 0 : window.count - 1;
    for (int m = 0; m < rows.nt(); ++m) rows(m, node) = robin_data[m];
    return rows;
}

}  // namespace

Field forward_heat_solve(const Window& window, const Field& source, std::span<const double> y0,
                         std::span<const double> robin_data) {
    require_window_field(window, source, "forward_heat_solve");
    return march_forward(window, with_robin_rows(window, source, robin_data), y0);
}

Field backward_adjoint_solve(const Window& window, const Field& source, std::span<const double> robin_data) {
    require_window_field(window, source, "backward_adjoint_solve");
    const std::vector<double> zero(window.count, 0.0);
    return march_backward(window, with_robin_rows(window, source, robin_data), zero);
}

double robin_trace(const Field& field, const Decomposition& decomp, int receiver_j, int m) {
    int iface = 0, inner = 0;
    RobinSide side{};
    if (receiver_j == 1) {
        iface = decomp.iface_plus;
        inner = iface - 1;
        side = RobinSide::right;
    } else if (receiver_j == 2) {
        iface = decomp.iface_minus;
        inner = iface + 1;
        side = RobinSide::left;
    } else {
        throw ParameterError("receiver subdomain must be 1 or 2");
    }
    const int lo = std::min(iface, inner), hi = std::max(iface, inner);
    if (lo < field.first() || hi > field.first() + field.count() - 1) {
        throw DecompositionError("robin_trace: stencil nodes " + std::to_string(lo) + ".." + std::to_string(hi) +
                                 " outside the donor window");
    }
    if (m < 0 || m >= field.nt()) throw DimensionError("robin_trace: time step out of range");
    return robin_stencil(side, decomp.grid.dx(), decomp.robin_p, field.at_global(m, iface),
                         field.at_global(m, inner));
}

}  // namespace wropt
