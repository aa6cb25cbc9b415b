#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wropt {

/// Matrix-free linear map R^dim -> R^dim. `apply(x, out)` must not alias.
struct LinearOperator {
    std::size_t dim{0};
    std::function<void(std::span<const double>, std::span<double>)> apply;
};

struct GmresOptions {
    double tol_rel{1e-8};
    int max_iter{500};
};

struct GmresResult {
    std::vector<double> solution;
    int iterations{0};
    bool converged{false};
    /// Residual norm estimate after each iteration; entry 0 is |rhs|.
    std::vector<double> residual_history;
};

/// Full (unrestarted) GMRES with modified Gram-Schmidt and Givens rotations,
/// zero initial guess. Stops when |op(x) - rhs| <= tol_rel |rhs|.
GmresResult gmres(const LinearOperator& op, std::span<const double> rhs, const GmresOptions& options = {});

}  // namespace wropt
