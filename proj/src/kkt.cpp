#include "wropt/kkt.hpp"

#include <cmath>
#include <numeric>

#include "wropt/errors.hpp"
#include "wropt/heat.hpp"

namespace wropt {

LocalProblem make_local_problem(const ProblemSpec& spec, const Window& window, std::vector<double> g_y,
                                std::vector<double> g_q) {
    spec.validate(window.grid);
    LocalProblem p;
    p.window = window;
    p.f = restrict_to(spec.f, window);
    p.y0.assign(spec.y0.begin() + window.first, spec.y0.begin() + window.first + window.count);
    p.c_y = spec.c_y;
    p.c_u = spec.c_u;
    p.eps = spec.eps;
    const bool robin = window.robin != RobinSide::none;
    const auto nt = static_cast<std::size_t>(window.grid.nt);
    if (robin) {
        if (g_y.empty()) g_y.assign(nt, 0.0);
        if (g_q.empty()) g_q.assign(nt, 0.0);
        if (g_y.size() != nt || g_q.size() != nt) throw DimensionError("Robin data must have nt samples");
    } else if (!g_y.empty() || !g_q.empty()) {
        throw DimensionError("Robin data given for a window without interface");
    }
    p.g_y = std::move(g_y);
    p.g_q = std::move(g_q);
    return p;
}

Masks masks_at(const LocalProblem& problem, const KktPoint& point) {
    return Masks{inactive_control_mask(point.q, problem.c_u), active_state_mask(point.y, problem.c_y)};
}

std::vector<double> pack(const Window& window, const Field& y_part, const Field& q_part) {
    const FieldTag tag = FieldTag::of(window);
    if (!(y_part.tag() == tag) || !(q_part.tag() == tag)) throw DimensionError("pack: field/window mismatch");
    const int lo = window.lo(), hi = window.hi(), nt = window.grid.nt;
    std::vector<double> out;
    out.reserve(window.stacked_size());
    for (int m = 1; m < nt; ++m) {
        for (int i = lo; i <= hi; ++i) out.push_back(y_part(m, i));
    }
    for (int m = 0; m < nt - 1; ++m) {
        for (int i = lo; i <= hi; ++i) out.push_back(q_part(m, i));
    }
    return out;
}

KktPoint unpack(const Window& window, std::span<const double> stacked) {
    if (stacked.size() != window.stacked_size()) throw DimensionError("unpack: stacked vector size");
    const FieldTag tag = FieldTag::of(window);
    KktPoint out{Field(tag), Field(tag)};
    const int lo = window.lo(), hi = window.hi(), nt = window.grid.nt;
    std::size_t k = 0;
    for (int m = 1; m < nt; ++m) {
        for (int i = lo; i <= hi; ++i) out.y(m, i) = stacked[k++];
    }
    for (int m = 0; m < nt - 1; ++m) {
        for (int i = lo; i <= hi; ++i) out.q(m, i) = stacked[k++];
    }
    return out;
}

double discrete_l2(std::span<const double> v, const GridSpec& grid) {
    return std::sqrt(grid.dt() * grid.dx() * std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

namespace {

double laplacian(std::span<const double> row, int i, double idx2) {
    return (row[i - 1] - 2.0 * row[i] + row[i + 1]) * idx2;
}

double robin_row(const Window& w, std::span<const double> row) {
    const double dx = w.grid.dx();
    if (w.robin == RobinSide::right) {
        return robin_stencil(RobinSide::right, dx, w.robin_p, row[w.count - 1], row[w.count - 2]);
    }
    return robin_stencil(RobinSide::left, dx, w.robin_p, row[0], row[1]);
}

void require_point(const LocalProblem& problem, const KktPoint& point) {
    const FieldTag tag = FieldTag::of(problem.window);
    if (!(point.y.tag() == tag) || !(point.q.tag() == tag)) throw DimensionError("KKT point does not match window");
}

}  // namespace

KktPoint kkt_residual_fields(const LocalProblem& problem, const KktPoint& point) {
    require_point(problem, point);
    const Window& w = problem.window;
    const int lo = w.lo(), hi = w.hi(), nt = w.grid.nt;
    const double inv_dt = 1.0 / w.grid.dt();
    const double idx2 = 1.0 / (w.grid.dx() * w.grid.dx());
    KktPoint r{Field(point.y.tag()), Field(point.y.tag())};

    for (int m = 1; m < nt; ++m) {
        const auto y_now = point.y.row(m);
        const auto y_old = point.y.row(m - 1);
        for (int i = lo; i <= hi; ++i) {
            if (w.is_robin_node(i)) {
                r.y(m, i) = robin_row(w, y_now) - problem.g_y[m];
            } else {
                r.y(m, i) = (y_now[i] - y_old[i]) * inv_dt - laplacian(y_now, i, idx2) -
                            clamp_control(point.q(m, i), problem.c_u) - problem.f(m, i);
            }
        }
    }
    for (int m = nt - 1; m >= 1; --m) {
        const auto q_now = point.q.row(m);
        const auto q_old = point.q.row(m - 1);
        for (int i = lo; i <= hi; ++i) {
            if (w.is_robin_node(i)) {
                r.q(m - 1, i) = robin_row(w, q_old) - problem.g_q[m - 1];
            } else {
                r.q(m - 1, i) = (q_now[i] - q_old[i]) * inv_dt + laplacian(q_old, i, idx2) -
                                state_penalty(point.y(m - 1, i), problem.c_y[m - 1], problem.eps);
            }
        }
    }
    return r;
}

std::vector<double> kkt_residual(const LocalProblem& problem, const KktPoint& point) {
    const KktPoint r = kkt_residual_fields(problem, point);
    return pack(problem.window, r.y, r.q);
}

double kkt_residual_scale(const LocalProblem& problem, const KktPoint& point) {
    require_point(problem, point);
    const Window& w = problem.window;
    const int lo = w.lo(), hi = w.hi(), nt = w.grid.nt;
    const double inv_dt = 1.0 / w.grid.dt(), dx = w.grid.dx();
    const double idx2 = 1.0 / (dx * dx);
    const auto magnitude = [&](std::span<const double> row, int i) {
        if (w.is_robin_node(i)) {
            const int inner = i == 0 ? 1 : i - 1;
            return (std::abs(row[i]) + std::abs(row[inner])) / dx + w.robin_p * std::abs(row[i]);
        }
        return (std::abs(row[i - 1]) + 2.0 * std::abs(row[i]) + std::abs(row[i + 1])) * idx2;
    };
    double sum = 0.0;
    for (int m = 1; m < nt; ++m) {
        for (int i = lo; i <= hi; ++i) {
            double a = magnitude(point.y.row(m), i);
            if (w.is_robin_node(i)) {
                a += std::abs(problem.g_y[m]);
            } else {
                a += (std::abs(point.y(m, i)) + std::abs(point.y(m - 1, i))) * inv_dt +
                     std::abs(clamp_control(point.q(m, i), problem.c_u)) + std::abs(problem.f(m, i));
            }
            sum += a * a;
        }
    }
    for (int m = nt - 1; m >= 1; --m) {
        for (int i = lo; i <= hi; ++i) {
            double a = magnitude(point.q.row(m - 1), i);
            if (w.is_robin_node(i)) {
                a += std::abs(problem.g_q[m - 1]);
            } else {
                a += (std::abs(point.q(m, i)) + std::abs(point.q(m - 1, i))) * inv_dt +
                     std::abs(state_penalty(point.y(m - 1, i), problem.c_y[m - 1], problem.eps));
            }
            sum += a * a;
        }
    }
    return std::sqrt(w.grid.dt() * w.grid.dx() * sum);
}

std::vector<double> kkt_residual(const KktPoint& point, const ProblemSpec& spec, const GridSpec& grid) {
    return kkt_residual(make_local_problem(spec, Window::whole(grid)), point);
}

std::vector<double> generalized_jacobian_apply(const LocalProblem& problem, const Masks& masks,
                                               std::span<const double> direction) {
    const Window& w = problem.window;
    const KktPoint d = unpack(w, direction);
    const int lo = w.lo(), hi = w.hi(), nt = w.grid.nt;
    const double inv_dt = 1.0 / w.grid.dt();
    const double idx2 = 1.0 / (w.grid.dx() * w.grid.dx());
    const double inv_eps2 = 1.0 / (problem.eps * problem.eps);
    KktPoint r{Field(d.y.tag()), Field(d.y.tag())};

    for (int m = 1; m < nt; ++m) {
        const auto y_now = d.y.row(m);
        const auto y_old = d.y.row(m - 1);
        for (int i = lo; i <= hi; ++i) {
            r.y(m, i) = w.is_robin_node(i) ? robin_row(w, y_now)
                                           : (y_now[i] - y_old[i]) * inv_dt - laplacian(y_now, i, idx2) -
                                                 masks.inactive(m, i) * d.q(m, i);
        }
    }
    for (int m = nt - 1; m >= 1; --m) {
        const auto q_now = d.q.row(m);
        const auto q_old = d.q.row(m - 1);
        for (int i = lo; i <= hi; ++i) {
            r.q(m - 1, i) = w.is_robin_node(i) ? robin_row(w, q_old)
                                               : (q_now[i] - q_old[i]) * inv_dt + laplacian(q_old, i, idx2) -
                                                     masks.active(m - 1, i) * inv_eps2 * d.y(m - 1, i);
        }
    }
    return pack(w, r.y, r.q);
}

std::vector<double> generalized_jacobian_apply(const KktPoint& point, const KktPoint& direction,
                                               const ProblemSpec& spec, const GridSpec& grid) {
    const LocalProblem problem = make_local_problem(spec, Window::whole(grid));
    require_point(problem, point);
    return generalized_jacobian_apply(problem, masks_at(problem, point),
                                      pack(problem.window, direction.y, direction.q));
}

std::vector<double> heat_block_solve(const Window& window, std::span<const double> rows) {
    const KktPoint r = unpack(window, rows);
    const std::vector<double> zero(window.count, 0.0);
    const Field y = march_forward(window, r.y, zero);
    const Field q = march_backward(window, r.q, zero);
    return pack(window, y, q);
}

GmresResult solve_linearized(const LocalProblem& problem, const Masks& masks, std::span<const double> rhs,
                             const GmresOptions& options) {
    const Window& w = problem.window;
    LinearOperator op{w.stacked_size(), [&](std::span<const double> x, std::span<double> out) {
                          const auto jx = generalized_jacobian_apply(problem, masks, x);
                          const auto px = heat_block_solve(w, jx);
                          std::copy(px.begin(), px.end(), out.begin());
                      }};
    const auto prhs = heat_block_solve(w, rhs);
    return gmres(op, prhs, options);
}

}  // namespace wropt
