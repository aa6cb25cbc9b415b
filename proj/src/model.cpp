#include "wropt/model.hpp"

#include <cmath>
#include <string>

#include "wropt/errors.hpp"

namespace wropt {

bool Field::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other, "Field +=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other, "Field -=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (!(a.tag() == b.tag())) {
        throw DimensionError(std::string(what) + ": fields live on different grids");
    }
}

Field restrict_to(const Field& global, const Window& window) {
    const FieldTag tag = FieldTag::of(window);
    if (global.nt() != tag.nt || window.first < global.first() ||
        window.last() > global.first() + global.count() - 1) {
        throw DimensionError("restrict_to: window is not covered by the field");
    }
    Field out(tag);
    for (int m = 0; m < tag.nt; ++m) {
        for (int i = 0; i < tag.count; ++i) out(m, i) = global.at_global(m, window.first + i);
    }
    return out;
}

void ProblemSpec::validate(const GridSpec& grid) const {
    grid.validate();
    if (!(c_u > 0.0)) throw ParameterError("control bound c_u must be positive");
    if (!(eps > 0.0)) throw ParameterError("regularization eps must be positive");
    if (std::abs(T - grid.T) > 1e-14 * T) throw ParameterError("problem horizon does not match the grid");
    if (static_cast<int>(y0.size()) != grid.nx) throw DimensionError("y0 must have nx samples");
    if (!(f.tag() == FieldTag::of(grid))) throw DimensionError("f must be sampled on the nt x nx grid");
    if (static_cast<int>(c_y.size()) != grid.nt) throw DimensionError("c_y must have nt samples");
    for (double c : c_y) {
        if (!(c > 0.0)) throw ParameterError("state bound c_y must be positive at every sampled time");
    }
}

Controls recover_controls(const Field& y, const Field& q, const ProblemSpec& spec) {
    require_same_grid(y, q, "recover_controls");
    if (static_cast<int>(spec.c_y.size()) != y.nt()) throw DimensionError("recover_controls: c_y length");
    Controls out{Field(y.tag()), Field(y.tag())};
    for (int m = 0; m < y.nt(); ++m) {
        for (int i = 0; i < y.count(); ++i) {
            out.u(m, i) = clamp_control(q(m, i), spec.c_u);
            out.w(m, i) = -spec.eps * state_penalty(y(m, i), spec.c_y[m], spec.eps);
        }
    }
    return out;
}

double cost_value(const Field& u, const Field& w, const GridSpec& grid) {
    require_same_grid(u, w, "cost_value");
    double sum = 0.0;
    for (double v : u.values()) sum += v * v;
    for (double v : w.values()) sum += v * v;
    return 0.5 * sum * grid.dt() * grid.dx();
}

Field inactive_control_mask(const Field& q, double c_u) {
    Field mask(q.tag());
    for (std::size_t k = 0; k < q.values().size(); ++k) {
        mask.values()[k] = inactive_control_indicator(q.values()[k], c_u);
    }
    return mask;
}

Field active_state_mask(const Field& y, std::span<const double> c_y) {
    if (static_cast<int>(c_y.size()) != y.nt()) throw DimensionError("active_state_mask: c_y length");
    Field mask(y.tag());
    for (int m = 0; m < y.nt(); ++m) {
        for (int i = 0; i < y.count(); ++i) mask(m, i) = active_state_indicator(y(m, i), c_y[m]);
    }
    return mask;
}

}  // namespace wropt
