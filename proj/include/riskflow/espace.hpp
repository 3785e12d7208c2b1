#pragma once

/// Bounded risk-rating space: an axis-aligned box (0, X_1) x ... x (0, X_n),
/// a uniform cell-centered Cartesian grid on it, and cell-centered fields with
/// the integral operators (box integrals, moments, upwind divergence) that the
/// flow equations are built from. All boundaries carry zero normal flux, so
/// discrete divergence integrates to zero by telescoping.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskflow {

/// Bounded box of risk coordinates. Valid coordinates are strictly inside
/// (0, X_i) along every axis.
class RiskDomain {
public:
    explicit RiskDomain(std::vector<double> upper_bounds)
        : upper_(std::move(upper_bounds)) {
        if (upper_.empty())
            throw std::invalid_argument("RiskDomain: need at least one axis");
        for (std::size_t i = 0; i < upper_.size(); ++i) {
            if (!std::isfinite(upper_[i]) || upper_[i] <= 0.0)
                throw std::invalid_argument(
                    "RiskDomain: upper bound " + std::to_string(i + 1) +
                    " must be finite and positive, got " + std::to_string(upper_[i]));
        }
    }

    int dim() const { return static_cast<int>(upper_.size()); }
    double upper(int axis) const { return upper_[static_cast<std::size_t>(axis)]; }
    const std::vector<double>& upper_bounds() const { return upper_; }

    /// Strict interior test; boundary points do not count as inside.
    bool contains(const std::vector<double>& x) const {
        if (x.size() != upper_.size()) return false;
        for (std::size_t i = 0; i < upper_.size(); ++i)
            if (!(x[i] > 0.0 && x[i] < upper_[i])) return false;
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (double u : upper_) v *= u;
        return v;
    }

    bool operator==(const RiskDomain& o) const { return upper_ == o.upper_; }
    bool operator!=(const RiskDomain& o) const { return !(*this == o); }

private:
    std::vector<double> upper_;
};

/// Uniform cell-centered grid over a RiskDomain. Axis 0 is the fastest-varying
/// index in the flat cell ordering.
class RiskGrid {
public:
    RiskGrid(RiskDomain domain, std::vector<int> cells_per_axis)
        : domain_(std::move(domain)), cells_(std::move(cells_per_axis)) {
        if (cells_.size() != static_cast<std::size_t>(domain_.dim()))
            throw std::invalid_argument("RiskGrid: cells_per_axis size must match domain dim");
        spacing_.resize(cells_.size());
        stride_.resize(cells_.size());
        total_ = 1;
        for (std::size_t a = 0; a < cells_.size(); ++a) {
            if (cells_[a] < 1)
                throw std::invalid_argument("RiskGrid: need at least one cell per axis");
            spacing_[a] = domain_.upper(static_cast<int>(a)) / cells_[a];
            stride_[a] = total_;
            total_ *= static_cast<std::size_t>(cells_[a]);
        }
        volume_ = 1.0;
        for (double h : spacing_) volume_ *= h;
    }

    const RiskDomain& domain() const { return domain_; }
    int dim() const { return domain_.dim(); }
    std::size_t cell_count() const { return total_; }
    int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
    const std::vector<int>& cells_per_axis() const { return cells_; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

    double min_spacing() const {
        double m = spacing_[0];
        for (double h : spacing_) m = std::min(m, h);
        return m;
    }

    /// Volume of one cell (all cells are congruent).
    double cell_volume() const { return volume_; }

    std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

    /// Per-axis index of a flat cell id along one axis.
    int axis_index(std::size_t cell, int axis) const {
        const std::size_t a = static_cast<std::size_t>(axis);
        return static_cast<int>((cell / stride_[a]) % static_cast<std::size_t>(cells_[a]));
    }

    /// Cell-center coordinate along one axis.
    double center(std::size_t cell, int axis) const {
        return (axis_index(cell, axis) + 0.5) * spacing_[static_cast<std::size_t>(axis)];
    }

    std::size_t flat(const std::vector<int>& idx) const {
        assert(idx.size() == cells_.size());
        std::size_t c = 0;
        for (std::size_t a = 0; a < cells_.size(); ++a) {
            assert(idx[a] >= 0 && idx[a] < cells_[a]);
            c += static_cast<std::size_t>(idx[a]) * stride_[a];
        }
        return c;
    }

    /// Flat id of the cell containing x. Throws if x is outside the open box.
    std::size_t cell_of(const std::vector<double>& x) const {
        if (!domain_.contains(x))
            throw std::invalid_argument("RiskGrid: position outside the open domain");
        std::size_t c = 0;
        for (std::size_t a = 0; a < cells_.size(); ++a) {
            int i = static_cast<int>(std::floor(x[a] / spacing_[a]));
            if (i >= cells_[a]) i = cells_[a] - 1; // x just below X_i can round up
            c += static_cast<std::size_t>(i) * stride_[a];
        }
        return c;
    }

    bool operator==(const RiskGrid& o) const {
        return domain_ == o.domain_ && cells_ == o.cells_;
    }
    bool operator!=(const RiskGrid& o) const { return !(*this == o); }

private:
    RiskDomain domain_;
    std::vector<int> cells_;
    std::vector<double> spacing_;
    std::vector<std::size_t> stride_;
    std::size_t total_ = 0;
    double volume_ = 1.0;
};

/// Cell-centered field: rank 1 (scalar) or rank n (one component per axis).
/// Storage is cell-major: values[cell*rank + component].
class Field {
public:
    Field(RiskGrid grid, int rank, double init = 0.0)
        : grid_(std::move(grid)), rank_(rank),
          values_(grid_.cell_count() * static_cast<std::size_t>(rank), init) {
        if (rank < 1)
            throw std::invalid_argument("Field: rank must be >= 1");
    }

    static Field scalar(const RiskGrid& grid, double init = 0.0) {
        return Field(grid, 1, init);
    }
    static Field vector(const RiskGrid& grid, double init = 0.0) {
        return Field(grid, grid.dim(), init);
    }

    const RiskGrid& grid() const { return grid_; }
    int rank() const { return rank_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t cell, int comp = 0) {
        assert(cell < grid_.cell_count() && comp >= 0 && comp < rank_);
        return values_[cell * static_cast<std::size_t>(rank_) + static_cast<std::size_t>(comp)];
    }
    double operator()(std::size_t cell, int comp = 0) const {
        assert(cell < grid_.cell_count() && comp >= 0 && comp < rank_);
        return values_[cell * static_cast<std::size_t>(rank_) + static_cast<std::size_t>(comp)];
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    void fill(double v) { values_.assign(values_.size(), v); }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::fabs(v));
        return m;
    }

    double min_value() const {
        double m = values_.empty() ? 0.0 : values_[0];
        for (double v : values_) m = std::min(m, v);
        return m;
    }

    Field& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }

    Field& operator+=(const Field& o) {
        assert(compatible(o));
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }

    /// this += s * o, the update primitive of the time steppers.
    Field& add_scaled(const Field& o, double s) {
        assert(compatible(o));
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
        return *this;
    }

    bool compatible(const Field& o) const {
        return rank_ == o.rank_ && grid_ == o.grid_;
    }

private:
    RiskGrid grid_;
    int rank_;
    std::vector<double> values_;
};

namespace detail {

inline void require_scalar(const Field& f, const char* op) {
    if (f.rank() != 1)
        throw std::invalid_argument(std::string(op) + ": scalar field required");
}

inline void require_vector(const Field& f, const char* op) {
    if (f.rank() != f.grid().dim())
        throw std::invalid_argument(std::string(op) + ": vector field (rank = dim) required");
}

} // namespace detail

/// Midpoint-rule box integral of a scalar field: sum f_c * vol.
inline double integrate(const Field& f) {
    detail::require_scalar(f, "integrate");
    double acc = 0.0;
    for (double v : f.values()) acc += v;
    return acc * f.grid().cell_volume();
}

/// First moment per axis of a scalar field: integral of x_i f(x).
inline std::vector<double> first_moment(const Field& f) {
    detail::require_scalar(f, "first_moment");
    const RiskGrid& g = f.grid();
    std::vector<double> m(static_cast<std::size_t>(g.dim()), 0.0);
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        for (int a = 0; a < g.dim(); ++a)
            m[static_cast<std::size_t>(a)] += f(c) * g.center(c, a);
    for (double& v : m) v *= g.cell_volume();
    return m;
}

/// Second moment of a scalar field: integral of |x|^2 f(x).
inline double second_moment(const Field& f) {
    detail::require_scalar(f, "second_moment");
    const RiskGrid& g = f.grid();
    double acc = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double x = g.center(c, a);
            r2 += x * x;
        }
        acc += f(c) * r2;
    }
    return acc * g.cell_volume();
}

/// First-order upwind divergence of a vector field with zero normal flux on
/// every boundary face. The face value of F is taken from the upwind side,
/// where the wind direction is the sign of the face-averaged component.
/// Summing the result over the box telescopes to zero exactly.
inline Field divergence(const Field& F) {
    detail::require_vector(F, "divergence");
    const RiskGrid& g = F.grid();
    Field div = Field::scalar(g);
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t stride = g.stride(a);
        const int n = g.cells(a);
        if (n < 2) continue; // single cell along this axis: both faces are boundary
        const double inv_h = 1.0 / g.spacing(a);
        for (std::size_t base = 0; base < g.cell_count(); ++base) {
            if (g.axis_index(base, a) != 0) continue;
            // interior faces between cells i and i+1 along this line
            for (int i = 0; i + 1 < n; ++i) {
                const std::size_t lo = base + static_cast<std::size_t>(i) * stride;
                const std::size_t hi = lo + stride;
                const double mean = 0.5 * (F(lo, a) + F(hi, a));
                const double flux = (mean >= 0.0) ? F(lo, a) : F(hi, a);
                div(lo) += flux * inv_h;
                div(hi) -= flux * inv_h;
            }
        }
    }
    return div;
}

} // namespace riskflow
