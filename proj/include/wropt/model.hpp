#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wropt/grid.hpp"

namespace wropt {

/// Identifies the (time x space-window) grid a Field is sampled on.
struct FieldTag {
    int nt{0};
    int first{0};  ///< global index of local node 0
    int count{0};  ///< number of space nodes

    static FieldTag of(const Window& w) { return FieldTag{w.grid.nt, w.first, w.count}; }
    static FieldTag of(const GridSpec& g) { return FieldTag{g.nt, 0, g.nx}; }

    friend bool operator==(const FieldTag&, const FieldTag&) = default;
};

/// Real values on a space-time grid, row-major in time: (m, i) -> values[m * count + i].
class Field {
public:
    Field() = default;
    explicit Field(FieldTag tag, double value = 0.0)
        : tag_(tag), values_(static_cast<std::size_t>(tag.nt) * static_cast<std::size_t>(tag.count), value) {}

    [[nodiscard]] const FieldTag& tag() const { return tag_; }
    [[nodiscard]] int nt() const { return tag_.nt; }
    [[nodiscard]] int count() const { return tag_.count; }
    [[nodiscard]] int first() const { return tag_.first; }

    double& operator()(int m, int i) { return values_[index(m, i)]; }
    double operator()(int m, int i) const { return values_[index(m, i)]; }

    /// Value at a global space node; the node must lie inside the window.
    [[nodiscard]] double at_global(int m, int global_node) const { return (*this)(m, global_node - tag_.first); }

    std::span<double> row(int m) { return {values_.data() + index(m, 0), static_cast<std::size_t>(tag_.count)}; }
    [[nodiscard]] std::span<const double> row(int m) const {
        return {values_.data() + index(m, 0), static_cast<std::size_t>(tag_.count)};
    }

    std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    [[nodiscard]] bool all_finite() const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);

private:
    [[nodiscard]] std::size_t index(int m, int i) const {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(tag_.count) + static_cast<std::size_t>(i);
    }

    FieldTag tag_{};
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Throws DimensionError if the tags differ.
void require_same_grid(const Field& a, const Field& b, const char* what);

/// Copy of the part of `global` covered by `window` (global must contain it).
Field restrict_to(const Field& global, const Window& window);

/// Continuous problem data sampled on a grid.
struct ProblemSpec {
    double T{1.0};
    std::vector<double> y0;   ///< nx samples
    Field f;                  ///< nt x nx samples
    double c_u{1.0};
    std::vector<double> c_y;  ///< nt samples
    double eps{0.1};

    /// Throws ParameterError / DimensionError when the invariants do not hold on `grid`.
    void validate(const GridSpec& grid) const;
};

/// Projection onto [-c_u, c_u].
inline double clamp_control(double q, double c_u) { return q > c_u ? c_u : (q < -c_u ? -c_u : q); }

/// Regularized state penalty (max(y - c, 0) + min(y + c, 0)) / eps^2.
inline double state_penalty(double y, double c_y, double eps) {
    double excess = 0.0;
    if (y > c_y) excess = y - c_y;
    else if (y < -c_y) excess = y + c_y;
    return excess / (eps * eps);
}

/// 1 where |q| <= c_u (control bound slack, inclusive), else 0.
inline double inactive_control_indicator(double q, double c_u) { return (q <= c_u && q >= -c_u) ? 1.0 : 0.0; }

/// 1 where |y| > c_y (state bound violated, strict), else 0.
inline double active_state_indicator(double y, double c_y) { return (y > c_y || y < -c_y) ? 1.0 : 0.0; }

struct Controls {
    Field u;
    Field w;
};

/// u = P(q), w = -eps Q(y), pointwise.
Controls recover_controls(const Field& y, const Field& q, const ProblemSpec& spec);

/// Rectangle-rule value of 1/2 |u|^2 + 1/2 |w|^2 with weight dt*dx at every node.
double cost_value(const Field& u, const Field& w, const GridSpec& grid);

Field inactive_control_mask(const Field& q, double c_u);
Field active_state_mask(const Field& y, std::span<const double> c_y);

}  // namespace wropt
