#include "wropt/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wropt/errors.hpp"

namespace wropt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

GmresResult gmres(const LinearOperator& op, std::span<const double> rhs, const GmresOptions& options) {
    const std::size_t n = op.dim;
    if (rhs.size() != n) throw DimensionError("gmres: rhs dimension does not match the operator");
    if (!(options.tol_rel > 0.0) || options.max_iter < 1) throw ParameterError("gmres: invalid options");

    GmresResult result;
    result.solution.assign(n, 0.0);
    const double beta = norm2(rhs);
    result.residual_history.push_back(beta);
    if (beta == 0.0) {
        result.converged = true;
        return result;
    }
    const double target = options.tol_rel * beta;
    const int max_k = static_cast<int>(std::min<std::size_t>(options.max_iter, n));

    std::vector<std::vector<double>> basis;
    basis.reserve(max_k + 1);
    basis.emplace_back(rhs.begin(), rhs.end());
    for (double& v : basis[0]) v /= beta;

    // Hessenberg columns after rotation (upper triangular R), rotations, and g = Q^T beta e1.
    std::vector<std::vector<double>> hess;
    std::vector<double> cs, sn, g{beta};
    double residual = beta;
    int k = 0;
    while (k < max_k && residual > target) {
        std::vector<double> w(n);
        op.apply(basis[k], w);
        std::vector<double> h(k + 2, 0.0);
        for (int i = 0; i <= k; ++i) {
            h[i] = dot(w, basis[i]);
            for (std::size_t r = 0; r < n; ++r) w[r] -= h[i] * basis[i][r];
        }
        h[k + 1] = norm2(w);

        for (int i = 0; i < k; ++i) {
            const double t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        const double denom = std::hypot(h[k], h[k + 1]);
        const double c = denom == 0.0 ? 1.0 : h[k] / denom;
        const double s = denom == 0.0 ? 0.0 : h[k + 1] / denom;
        const double subdiag = h[k + 1];
        h[k] = c * h[k] + s * h[k + 1];
        h[k + 1] = 0.0;
        cs.push_back(c);
        sn.push_back(s);
        g.push_back(-s * g[k]);
        g[k] = c * g[k];
        hess.push_back(std::move(h));
        residual = std::abs(g[k + 1]);
        ++k;
        result.residual_history.push_back(residual);

        if (subdiag == 0.0 || hess.back()[k - 1] == 0.0) break;  // breakdown: Krylov space exhausted
        basis.emplace_back(std::move(w));
        for (double& v : basis.back()) v /= subdiag;
    }

    // Back substitution R y = g and x = V y.
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
        double acc = g[i];
        for (int j = i + 1; j < k; ++j) acc -= hess[j][i] * y[j];
        y[i] = hess[i][i] == 0.0 ? 0.0 : acc / hess[i][i];
    }
    for (int i = 0; i < k; ++i) {
        for (std::size_t r = 0; r < n; ++r) result.solution[r] += y[i] * basis[i][r];
    }
    result.iterations = k;
    result.converged = residual <= target;
    return result;
}

}  // namespace wropt
