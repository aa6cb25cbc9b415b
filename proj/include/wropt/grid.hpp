#pragma once

#include <cstddef>

namespace wropt {

/// Uniform space-time grid on [x_left, x_right] x [0, T].
struct GridSpec {
    int nx{161};
    int nt{21};
    double x_left{-1.0};
    double x_right{1.0};
    double T{1.0};

    [[nodiscard]] double dx() const { return (x_right - x_left) / (nx - 1); }
    [[nodiscard]] double dt() const { return T / (nt - 1); }
    [[nodiscard]] double x(int i) const { return x_left + i * dx(); }
    [[nodiscard]] double t(int m) const { return m * dt(); }

    /// Throws ParameterError unless nx >= 3, nt >= 2, T > 0 and x_left < x_right.
    void validate() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Which end of a window carries a Robin transmission row. The other end
/// (and both ends when `none`) is a homogeneous Dirichlet node.
enum class RobinSide { none, left, right };

/// A contiguous window of global nodes [first, first + count) with its
/// boundary treatment. The full domain is a window with Dirichlet ends.
struct Window {
    GridSpec grid;
    int first{0};
    int count{0};
    RobinSide robin{RobinSide::none};
    double robin_p{0.0};

    static Window whole(const GridSpec& grid) { return Window{grid, 0, grid.nx, RobinSide::none, 0.0}; }

    [[nodiscard]] int last() const { return first + count - 1; }
    /// First and last local node index carrying an unknown (Dirichlet ends excluded).
    [[nodiscard]] int lo() const { return robin == RobinSide::left ? 0 : 1; }
    [[nodiscard]] int hi() const { return robin == RobinSide::right ? count - 1 : count - 2; }
    [[nodiscard]] int unknowns_per_step() const { return hi() - lo() + 1; }
    [[nodiscard]] bool is_robin_node(int local) const {
        return (robin == RobinSide::left && local == 0) || (robin == RobinSide::right && local == count - 1);
    }
    /// Number of stacked unknowns (state and adjoint, all free time levels).
    [[nodiscard]] std::size_t stacked_size() const {
        return 2u * static_cast<std::size_t>(grid.nt - 1) * static_cast<std::size_t>(unknowns_per_step());
    }

    friend bool operator==(const Window&, const Window&) = default;
};

/// Two overlapping subdomains (-1, L) and (-L, 1), L = overlap_cells * dx.
struct Decomposition {
    GridSpec grid;
    int overlap_cells{1};
    double robin_p{1.0};
    int iface_minus{0};  ///< global node at x = -L (interface of subdomain 2)
    int iface_plus{0};   ///< global node at x = +L (interface of subdomain 1)

    [[nodiscard]] double overlap() const { return overlap_cells * grid.dx(); }
    /// Window of subdomain j (1 or 2).
    [[nodiscard]] Window window(int j) const;
};

/// Throws ParameterError if nx is even, k is outside [1, (nx-1)/4) or p <= 0.
Decomposition build_decomposition(const GridSpec& grid, int overlap_cells, double robin_p);

}  // namespace wropt
