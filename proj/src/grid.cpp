#include "wropt/grid.hpp"

#include <string>

#include "wropt/errors.hpp"

namespace wropt {

void GridSpec::validate() const {
    if (nx < 3) throw ParameterError("grid needs at least 3 space nodes, got " + std::to_string(nx));
    if (nt < 2) throw ParameterError("grid needs at least 2 time nodes, got " + std::to_string(nt));
    if (!(T > 0.0)) throw ParameterError("final time must be positive");
    if (!(x_left < x_right)) throw ParameterError("empty space interval");
}

Window Decomposition::window(int j) const {
    if (j == 1) return Window{grid, 0, iface_plus + 1, RobinSide::right, robin_p};
    if (j == 2) return Window{grid, iface_minus, grid.nx - iface_minus, RobinSide::left, robin_p};
    throw ParameterError("subdomain index must be 1 or 2, got " + std::to_string(j));
}

Decomposition build_decomposition(const GridSpec& grid, int overlap_cells, double robin_p) {
    grid.validate();
    if (grid.nx % 2 == 0) {
        throw ParameterError("x = 0 must be a grid node; nx must be odd, got " + std::to_string(grid.nx));
    }
    // 2L < 1 with L = k dx and dx = 2/(nx-1) gives k < (nx-1)/4.
    if (overlap_cells < 1 || 4 * overlap_cells >= grid.nx - 1) {
        throw ParameterError("overlap_cells must satisfy 1 <= k < (nx-1)/4, got " +
                             std::to_string(overlap_cells));
    }
    if (!(robin_p > 0.0)) throw ParameterError("Robin parameter must be positive");
    if (grid.x_left != -grid.x_right) throw ParameterError("decomposition expects a domain symmetric about x = 0");
    const int mid = (grid.nx - 1) / 2;
    return Decomposition{grid, overlap_cells, robin_p, mid - overlap_cells, mid + overlap_cells};
}

}  // namespace wropt
