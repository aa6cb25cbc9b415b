#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "wropt/errors.hpp"
#include "wropt/heat.hpp"

using namespace wropt;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec grid_of(int nx, int nt) { return GridSpec{nx, nt, -1.0, 1.0, 1.0}; }

Field sample(const GridSpec& g, const std::function<double(double, double)>& fn) {
    Field out(FieldTag::of(g));
    for (int m = 0; m < g.nt; ++m)
        for (int i = 0; i < g.nx; ++i) out(m, i) = fn(g.t(m), g.x(i));
    return out;
}

double max_error(const Field& a, const Field& b) {
    double e = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) e = std::max(e, std::abs(a.values()[k] - b.values()[k]));
    return e;
}

// y = exp(-t/2) sin(pi x) + t x (1 - x^2)/2 has y = 0 at x = +-1.
double y_exact(double t, double x) { return std::exp(-0.5 * t) * std::sin(kPi * x) + 0.5 * t * x * (1 - x * x); }
double y_source(double t, double x) {
    const double yt = -0.5 * std::exp(-0.5 * t) * std::sin(kPi * x) + 0.5 * x * (1 - x * x);
    const double yxx = -kPi * kPi * std::exp(-0.5 * t) * std::sin(kPi * x) - 3.0 * t * x;
    return yt - yxx;
}

// q = cos(pi t / 2) sin(pi x) (1 + x/2) vanishes at t = 1 and x = +-1.
double q_exact(double t, double x) { return std::cos(kPi * t / 2) * std::sin(kPi * x) * (1 + 0.5 * x); }
double q_source(double t, double x) {
    const double s = std::sin(kPi * x), c = std::cos(kPi * x);
    const double qt = -kPi / 2 * std::sin(kPi * t / 2) * s * (1 + 0.5 * x);
    const double qxx = std::cos(kPi * t / 2) * (-kPi * kPi * s * (1 + 0.5 * x) + kPi * c);
    return qt + qxx;
}

double forward_error(int nx, int nt) {
    const GridSpec g = grid_of(nx, nt);
    const Field exact = sample(g, y_exact);
    const Field y = forward_heat_solve(Window::whole(g), sample(g, y_source), exact.row(0));
    return max_error(y, exact);
}

double backward_error(int nx, int nt) {
    const GridSpec g = grid_of(nx, nt);
    return max_error(backward_adjoint_solve(Window::whole(g), sample(g, q_source)), sample(g, q_exact));
}

std::vector<double> rates(const std::vector<double>& errors) {
    std::vector<double> r;
    for (std::size_t k = 1; k < errors.size(); ++k) r.push_back(std::log2(errors[k - 1] / errors[k]));
    return r;
}

}  // namespace

TEST(Decomposition, DefaultGridOverlapOneCell) {
    const Decomposition d = build_decomposition(grid_of(161, 21), 1, 100.0);
    EXPECT_EQ(d.iface_plus, 81);
    EXPECT_EQ(d.iface_minus, 79);
    EXPECT_NEAR(d.overlap(), 0.0125, 1e-15);
    const Window w1 = d.window(1), w2 = d.window(2);
    EXPECT_EQ(w1.first, 0);
    EXPECT_EQ(w1.count, 82);
    EXPECT_EQ(w1.robin, RobinSide::right);
    EXPECT_EQ(w2.first, 79);
    EXPECT_EQ(w2.count, 82);
    EXPECT_EQ(w2.robin, RobinSide::left);
    EXPECT_EQ(w1.unknowns_per_step(), 81);
}

TEST(Decomposition, FourCellOverlapWindowsAreSymmetric) {
    const Decomposition d = build_decomposition(grid_of(161, 21), 4, 1.0);
    EXPECT_EQ(d.window(1).count, 85);
    EXPECT_EQ(d.window(2).count, 85);
    EXPECT_NEAR(d.overlap(), 0.05, 1e-15);
}

TEST(Decomposition, RejectsBadParameters) {
    EXPECT_THROW(build_decomposition(grid_of(161, 21), 0, 1.0), ParameterError);
    EXPECT_THROW(build_decomposition(grid_of(161, 21), 40, 1.0), ParameterError);
    EXPECT_THROW(build_decomposition(grid_of(161, 21), 1, 0.0), ParameterError);
    EXPECT_THROW(build_decomposition(grid_of(161, 21), 1, -3.0), ParameterError);
    EXPECT_THROW(build_decomposition(grid_of(160, 21), 1, 1.0), ParameterError);
}

TEST(ForwardHeat, TemporalOrderAtLeastOne) {
    std::vector<double> e;
    for (int nt : {11, 21, 41}) e.push_back(forward_error(1601, nt));
    for (double r : rates(e)) EXPECT_GE(r, 0.9);
}

TEST(ForwardHeat, SpatialOrderAtLeastTwo) {
    std::vector<double> e;
    for (int nx : {11, 21, 41}) e.push_back(forward_error(nx, 20001));
    for (double r : rates(e)) EXPECT_GE(r, 1.9);
}

TEST(BackwardAdjoint, TemporalOrderAtLeastOne) {
    std::vector<double> e;
    for (int nt : {11, 21, 41}) e.push_back(backward_error(1601, nt));
    for (double r : rates(e)) EXPECT_GE(r, 0.9);
}

TEST(BackwardAdjoint, SpatialOrderAtLeastTwo) {
    std::vector<double> e;
    for (int nx : {11, 21, 41}) e.push_back(backward_error(nx, 20001));
    for (double r : rates(e)) EXPECT_GE(r, 1.9);
}

TEST(BackwardAdjoint, IsForwardSolveWithTimeReversed) {
    const GridSpec g = grid_of(41, 17);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field src(FieldTag::of(g));
    for (double& v : src.values()) v = u(rng);
    // q_t + q_xx = s backward equals y_t - y_xx = -s(T - t) forward with
    // the source shifted to the upper level of each step.
    Field reversed(FieldTag::of(g));
    for (int m = 1; m < g.nt; ++m)
        for (int i = 0; i < g.nx; ++i) reversed(m, i) = -src(g.nt - 1 - m, i);
    const std::vector<double> zero(g.nx, 0.0);
    const Field q = backward_adjoint_solve(Window::whole(g), src);
    const Field y = forward_heat_solve(Window::whole(g), reversed, zero);
    for (int m = 0; m < g.nt; ++m)
        for (int i = 0; i < g.nx; ++i) EXPECT_NEAR(q(m, i), y(g.nt - 1 - m, i), 1e-12);
}

TEST(ForwardHeat, IsLinear) {
    const GridSpec g = grid_of(33, 9);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field a(FieldTag::of(g)), b(FieldTag::of(g));
    for (double& v : a.values()) v = u(rng);
    for (double& v : b.values()) v = u(rng);
    std::vector<double> ya(g.nx, 0.0), yb(g.nx, 0.0);
    for (int i = 1; i < g.nx - 1; ++i) ya[i] = u(rng), yb[i] = u(rng);
    std::vector<double> ysum(g.nx);
    for (int i = 0; i < g.nx; ++i) ysum[i] = 2.0 * ya[i] - 3.0 * yb[i];
    const Window w = Window::whole(g);
    const Field lhs = forward_heat_solve(w, 2.0 * a - 3.0 * b, ysum);
    const Field rhs = 2.0 * forward_heat_solve(w, a, ya) - 3.0 * forward_heat_solve(w, b, yb);
    EXPECT_LE(max_error(lhs, rhs), 1e-12);
}

TEST(ForwardHeat, DiscreteSteadyStateIsPreserved) {
    // v = (1 - x^2)/2 has -v_xx = 1 exactly under the 3-point Laplacian.
    const GridSpec g = grid_of(21, 11);
    const Field v = sample(g, [](double, double x) { return 0.5 * (1 - x * x); });
    const Field y = forward_heat_solve(Window::whole(g), Field(FieldTag::of(g), 1.0), v.row(0));
    EXPECT_LE(max_error(y, v), 1e-12);
}

TEST(ForwardHeat, RejectsMismatchedSource) {
    const GridSpec g = grid_of(21, 11);
    const std::vector<double> y0(21, 0.0);
    EXPECT_THROW(forward_heat_solve(Window::whole(g), Field(FieldTag::of(grid_of(23, 11))), y0), DimensionError);
}

TEST(RobinTrace, StencilOnLinearField) {
    const GridSpec g = grid_of(161, 21);
    const Decomposition d = build_decomposition(g, 1, 100.0);
    // v = 2 + 3x on both windows.
    const auto linear = [&](const Window& w) {
        Field f(FieldTag::of(w));
        for (int m = 0; m < g.nt; ++m)
            for (int i = 0; i < w.count; ++i) f(m, i) = 2.0 + 3.0 * g.x(w.first + i);
        return f;
    };
    const double L = d.overlap();
    // Receiver 1 gets v_x + p v at x = +L from subdomain 2's field.
    EXPECT_NEAR(robin_trace(linear(d.window(2)), d, 1, 4), 3.0 + 100.0 * (2.0 + 3.0 * L), 1e-9);
    // Receiver 2 gets v_x - p v at x = -L from subdomain 1's field.
    EXPECT_NEAR(robin_trace(linear(d.window(1)), d, 2, 4), 3.0 - 100.0 * (2.0 - 3.0 * L), 1e-9);
}

TEST(RobinTrace, StencilOutsideDonorThrows) {
    const GridSpec g = grid_of(161, 21);
    const Decomposition d = build_decomposition(g, 1, 1.0);
    // A field on subdomain 1's own window cannot supply subdomain 1's trace at x = +L + dx.
    const Window narrow{g, 0, 81, RobinSide::right, 1.0};
    EXPECT_THROW(robin_trace(Field(FieldTag::of(narrow)), d, 1, 0), DecompositionError);
    EXPECT_THROW(robin_trace(Field(FieldTag::of(d.window(2))), d, 3, 0), ParameterError);
}

TEST(RobinTrace, SubdomainSolveReproducesDonorData) {
    // Solving on window 1 with the Robin data of a whole-domain solution
    // reproduces that solution: the receiver row uses the same stencil.
    const GridSpec g = grid_of(161, 21);
    for (double p : {1e-2, 1.0, 1e2}) {
        const Decomposition d = build_decomposition(g, 2, p);
        const Field src = sample(g, y_source);
        const Field exact_y0 = sample(g, y_exact);
        const Field whole = forward_heat_solve(Window::whole(g), src, exact_y0.row(0));
        const Window w1 = d.window(1);
        std::vector<double> data(g.nt);
        for (int m = 0; m < g.nt; ++m) data[m] = robin_trace(restrict_to(whole, d.window(2)), d, 1, m);
        const Field local = forward_heat_solve(w1, restrict_to(src, w1), restrict_to(exact_y0, w1).row(0), data);
        EXPECT_LE(max_error(local, restrict_to(whole, w1)), 1e-10) << "p=" << p;
    }
}
