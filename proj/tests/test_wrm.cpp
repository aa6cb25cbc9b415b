#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wropt/errors.hpp"
#include "wropt/experiment.hpp"
#include "wropt/heat.hpp"
#include "wropt/wrm.hpp"

using namespace wropt;

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double max_abs_diff(const Field& a, const Field& b) {
    double e = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) e = std::max(e, std::abs(a.values()[k] - b.values()[k]));
    return e;
}

KktPoint monolithic(const TestCase& tc) {
    SolverConfig cfg;
    cfg.tol = 1e-11;
    cfg.gmres.tol_rel = 1e-12;
    const NewtonResult r = semismooth_newton_solve(tc.spec, tc.grid, cfg);
    EXPECT_TRUE(r.report.converged);
    return r.point;
}

}  // namespace

TEST(SubdomainSolve, ZeroDataGivesZero) {
    const TestCase tc = named_test_case("zero", 41, 11, 1e-1);
    const Decomposition d = build_decomposition(tc.grid, 1, 1.0);
    const TraceData zero{std::vector<double>(11, 0.0), std::vector<double>(11, 0.0)};
    for (int j : {1, 2}) {
        const KktPoint z = subdomain_solve(j, zero, tc.spec, d, SolverConfig{});
        for (double v : z.y.values()) EXPECT_EQ(v, 0.0);
        for (double v : z.q.values()) EXPECT_EQ(v, 0.0);
    }
}

TEST(SubdomainSolve, ReproducesMonolithicSolutionFromItsTraces) {
    const TestCase tc = builtin_test_case(1, 41, 11, 1e-1);
    const KktPoint whole = monolithic(tc);
    for (double p : {1e-2, 1.0, 1e2}) {
        const Decomposition d = build_decomposition(tc.grid, 2, p);
        const StatePair pair = restrict_pair(whole, d);
        for (int j : {1, 2}) {
            const KktPoint z = subdomain_solve(j, interface_traces(pair[2 - j], d, j), tc.spec, d, SolverConfig{});
            EXPECT_LE(max_abs_diff(z.y, pair[j - 1].y), 1e-8) << "p=" << p << " j=" << j;
            EXPECT_LE(max_abs_diff(z.q, pair[j - 1].q), 1e-8) << "p=" << p << " j=" << j;
        }
        EXPECT_LE(discrete_l2(preconditioned_residual(pair, tc.spec, d, SolverConfig{}), tc.grid), 1e-8);
    }
}

TEST(SubdomainSolve, RejectsBadIndex) {
    const TestCase tc = named_test_case("zero", 41, 11, 1e-1);
    const Decomposition d = build_decomposition(tc.grid, 1, 1.0);
    const TraceData zero{std::vector<double>(11, 0.0), std::vector<double>(11, 0.0)};
    EXPECT_THROW(subdomain_solve(3, zero, tc.spec, d, SolverConfig{}), ParameterError);
}

TEST(Pairs, RestrictThenGlueIsIdentity) {
    const TestCase tc = builtin_test_case(2, 41, 11, 1e-1);
    const KktPoint z = random_feasible_guess(tc.spec, tc.grid, 1);
    const Decomposition d = build_decomposition(tc.grid, 4, 1.0);
    const KktPoint back = glue_pair(restrict_pair(z, d), d);
    EXPECT_EQ(max_abs_diff(back.y, z.y), 0.0);
    EXPECT_EQ(max_abs_diff(back.q, z.q), 0.0);
    const StatePair pair = restrict_pair(z, d);
    EXPECT_EQ(unpack_pair(pack_pair(pair, d), d)[1].q.values().size(), pair[1].q.values().size());
    EXPECT_EQ(pack_pair(unpack_pair(pack_pair(pair, d), d), d), pack_pair(pair, d));
}

TEST(LinearizedSubdomainSolve, ZeroTracesAndLinearity) {
    const TestCase tc = builtin_test_case(1, 41, 11, 1e-2);
    const Decomposition d = build_decomposition(tc.grid, 1, 1e2);
    const StatePair base = restrict_pair(random_feasible_guess(tc.spec, tc.grid, 2), d);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TraceData a{std::vector<double>(11), std::vector<double>(11)}, b = a, zero = a, comb = a;
    for (int m = 0; m < 11; ++m) {
        a.g_y[m] = u(rng), a.g_q[m] = u(rng), b.g_y[m] = u(rng), b.g_q[m] = u(rng);
        comb.g_y[m] = 2 * a.g_y[m] - 3 * b.g_y[m];
        comb.g_q[m] = 2 * a.g_q[m] - 3 * b.g_q[m];
    }
    SolverConfig cfg;
    cfg.sub_gmres.tol_rel = 1e-13;
    for (int j : {1, 2}) {
        const KktPoint z0 = linearized_subdomain_solve(j, base[j - 1], zero, tc.spec, d, cfg);
        for (double v : z0.y.values()) EXPECT_EQ(v, 0.0);
        const KktPoint za = linearized_subdomain_solve(j, base[j - 1], a, tc.spec, d, cfg);
        const KktPoint zb = linearized_subdomain_solve(j, base[j - 1], b, tc.spec, d, cfg);
        const KktPoint zc = linearized_subdomain_solve(j, base[j - 1], comb, tc.spec, d, cfg);
        EXPECT_LE(max_abs_diff(zc.y, 2.0 * za.y - 3.0 * zb.y), 1e-9);
        EXPECT_LE(max_abs_diff(zc.q, 2.0 * za.q - 3.0 * zb.q), 1e-9);
    }
}

TEST(DFp, MatchesFiniteDifferencesOfPreconditionedResidual) {
    const TestCase tc = builtin_test_case(1, 41, 11, 1e-1);
    const Decomposition d = build_decomposition(tc.grid, 1, 1e2);
    SolverConfig cfg;
    cfg.sub_tol = 1e-12;
    cfg.sub_gmres.tol_rel = 1e-13;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 3; ++trial) {
        const StatePair z = restrict_pair(random_feasible_guess(tc.spec, tc.grid, 10 + trial), d);
        const StatePair images = wrm_sweep(z, tc.spec, d, cfg).states;
        std::vector<double> dir(pack_pair(z, d).size());
        for (double& v : dir) v = u(rng);
        const StatePair dp = unpack_pair(dir, d);
        StatePair plus = z, minus = z;
        for (int j = 0; j < 2; ++j) {
            plus[j].y += h * dp[j].y;
            plus[j].q += h * dp[j].q;
            minus[j].y -= h * dp[j].y;
            minus[j].q -= h * dp[j].q;
        }
        const std::vector<double> fp = preconditioned_residual(plus, tc.spec, d, cfg);
        const std::vector<double> fm = preconditioned_residual(minus, tc.spec, d, cfg);
        const std::vector<double> jd = dFp_apply(images, dir, tc.spec, d, cfg);
        std::vector<double> diff(jd.size());
        for (std::size_t k = 0; k < jd.size(); ++k) diff[k] = (fp[k] - fm[k]) / (2 * h) - jd[k];
        EXPECT_LE(norm2(diff), 1e-5 * norm2(jd)) << "trial " << trial;

        std::vector<double> scaled = dir;
        for (double& v : scaled) v *= -2.5;
        const std::vector<double> js = dFp_apply(images, scaled, tc.spec, d, cfg);
        for (std::size_t k = 0; k < jd.size(); ++k) EXPECT_NEAR(js[k], -2.5 * jd[k], 1e-8 * (1 + std::abs(jd[k])));
    }
}

TEST(PreconditionedNewton, ZeroProblemConvergesToZero) {
    const TestCase tc = named_test_case("zero", 41, 11, 1e-1);
    const Decomposition d = build_decomposition(tc.grid, 1, 1e2);
    const PreconditionedResult r = preconditioned_newton_solve(tc.spec, d, SolverConfig{});
    ASSERT_TRUE(r.report.converged) << r.failure;
    const KktPoint z = glue_pair(r.states, d);
    for (double v : z.y.values()) EXPECT_NEAR(v, 0.0, 1e-6);
    for (double v : z.q.values()) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(PreconditionedNewton, AgreesWithMonolithicOnTheOverlap) {
    for (int id : {1, 2}) {
        const TestCase tc = builtin_test_case(id, 41, 11, 1e-2);
        const KktPoint whole = monolithic(tc);
        const Decomposition d = build_decomposition(tc.grid, 2, 1.0);
        SolverConfig cfg;
        cfg.tol = 1e-9;
        cfg.gmres.tol_rel = 1e-11;
        const PreconditionedResult r = preconditioned_newton_solve(tc.spec, d, cfg);
        ASSERT_TRUE(r.report.converged) << r.failure;
        std::vector<double> diff;
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < tc.grid.nt; ++m)
                for (int g = d.iface_minus; g <= d.iface_plus; ++g) {
                    diff.push_back(r.states[j].y.at_global(m, g) - whole.y.at_global(m, g));
                    diff.push_back(r.states[j].q.at_global(m, g) - whole.q.at_global(m, g));
                }
        EXPECT_LE(discrete_l2(diff, tc.grid), 1e-5) << "test " << id;
    }
}

TEST(WrmIterate, ReachesMonolithicSolution) {
    const TestCase tc = builtin_test_case(1, 41, 11, 1e-1);
    const KktPoint whole = monolithic(tc);
    const Decomposition d = build_decomposition(tc.grid, 2, 1.0);
    SolverConfig cfg;
    cfg.tol = 1e-10;
    cfg.max_outer = 2000;
    const PreconditionedResult r = wrm_iterate(tc.spec, d, cfg);
    ASSERT_TRUE(r.report.converged) << r.failure;
    const KktPoint z = glue_pair(r.states, d);
    EXPECT_LE(max_abs_diff(z.y, whole.y), 1e-6);
    EXPECT_LE(max_abs_diff(z.q, whole.q), 1e-6);
}

TEST(WrmSweep, InterfaceMismatchDecreases) {
    const TestCase tc = builtin_test_case(1, 41, 11, 1e-1);
    const Decomposition d = build_decomposition(tc.grid, 1, 1e2);
    StatePair z = restrict_pair(random_feasible_guess(tc.spec, tc.grid, 0), d);
    std::vector<double> change;
    for (int sweep = 0; sweep < 30; ++sweep) {
        const StatePair next = wrm_sweep(z, tc.spec, d, SolverConfig{}).states;
        change.push_back(discrete_l2(preconditioned_residual(z, next, d), tc.grid));
        z = next;
    }
    // Overall trend, compared over blocks of ten sweeps.
    EXPECT_LT(change[29], change[19]);
    EXPECT_LT(change[19], change[9]);
}
