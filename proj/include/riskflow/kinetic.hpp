#pragma once

/// Kinetic picture: economic agents as particles carrying a position in risk
/// space, a risk velocity, and one or more extensive variables (assets,
/// revenue, ...). Deposition aggregates them onto a grid by nearest cell,
/// conserving each variable's total exactly; the continuum velocity is the
/// deposited impulse divided by the regularized density. Particle dynamics
/// are never evolved here; the ensemble is an initial condition generator.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskflow/espace.hpp"

namespace riskflow {

/// One economic agent: position x in risk space, velocity v = dx/dt, and
/// l >= 1 extensive variables (variable 1 is conventionally assets).
struct EParticle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> variables;
};

/// A fixed-arity collection of particles.
class Ensemble {
public:
    Ensemble(int dim, int variable_count)
        : dim_(dim), nvars_(variable_count) {
        if (dim < 1) throw std::invalid_argument("Ensemble: dim must be >= 1");
        if (variable_count < 1)
            throw std::invalid_argument("Ensemble: need at least one variable");
    }

    int dim() const { return dim_; }
    int variable_count() const { return nvars_; }
    std::size_t size() const { return particles_.size(); }

    void add(EParticle p) {
        if (static_cast<int>(p.position.size()) != dim_ ||
            static_cast<int>(p.velocity.size()) != dim_)
            throw std::invalid_argument("Ensemble::add: position/velocity arity mismatch");
        if (static_cast<int>(p.variables.size()) != nvars_)
            throw std::invalid_argument("Ensemble::add: variable arity mismatch");
        particles_.push_back(std::move(p));
    }

    const EParticle& operator[](std::size_t i) const { return particles_[i]; }
    const std::vector<EParticle>& particles() const { return particles_; }

private:
    int dim_;
    int nvars_;
    std::vector<EParticle> particles_;
};

/// Impulse a particle contributes per unit of an extensive variable u: u * v.
inline std::vector<double> particle_impulse(double u, const std::vector<double>& v) {
    std::vector<double> p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = u * v[i];
    return p;
}

struct DepositResult {
    Field density; // scalar: sum of u over the cell, per unit volume
    Field impulse; // vector: sum of u*v over the cell, per unit volume
};

/// Nearest-cell histogram deposition of one extensive variable. Every
/// particle's position must lie strictly inside the domain; totals are
/// conserved exactly: integrate(density) == sum of u over particles.
inline DepositResult deposit(const Ensemble& ens, const RiskGrid& grid, int variable_index) {
    if (grid.dim() != ens.dim())
        throw std::invalid_argument("deposit: grid/ensemble dimension mismatch");
    if (variable_index < 0 || variable_index >= ens.variable_count())
        throw std::invalid_argument("deposit: variable index out of range");
    DepositResult out{Field::scalar(grid), Field::vector(grid)};
    const double inv_vol = 1.0 / grid.cell_volume();
    for (const EParticle& p : ens.particles()) {
        const std::size_t c = grid.cell_of(p.position); // throws if outside
        const double u = p.variables[static_cast<std::size_t>(variable_index)];
        out.density(c) += u * inv_vol;
        for (int a = 0; a < grid.dim(); ++a)
            out.impulse(c, a) += u * p.velocity[static_cast<std::size_t>(a)] * inv_vol;
    }
    return out;
}

/// Regularization floor used when dividing impulse by density.
inline double default_velocity_epsilon(const Field& density) {
    return 1e-12 * std::max(density.max_abs(), 1.0);
}

/// Continuum velocity v = impulse / max(density, eps), componentwise per cell.
inline Field velocity_field(const Field& density, const Field& impulse, double epsilon) {
    detail::require_scalar(density, "velocity_field");
    detail::require_vector(impulse, "velocity_field");
    if (density.grid() != impulse.grid())
        throw std::invalid_argument("velocity_field: density/impulse grid mismatch");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("velocity_field: epsilon must be positive");
    const RiskGrid& g = density.grid();
    Field v = Field::vector(g);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double denom = std::max(density(c), epsilon);
        for (int a = 0; a < g.dim(); ++a) v(c, a) = impulse(c, a) / denom;
    }
    return v;
}

inline Field velocity_field(const Field& density, const Field& impulse) {
    return velocity_field(density, impulse, default_velocity_epsilon(density));
}

/// Ensemble snapshot: one particle per line, whitespace-separated
/// `x1 .. xn v1 .. vn u1 .. ul`; '#' starts a comment.
inline void save_ensemble(std::ostream& os, const Ensemble& ens) {
    os << "# dim=" << ens.dim() << " variables=" << ens.variable_count()
       << " count=" << ens.size() << "\n";
    os.precision(17);
    for (const EParticle& p : ens.particles()) {
        bool first = true;
        for (double x : p.position) { os << (first ? "" : " ") << x; first = false; }
        for (double v : p.velocity) os << ' ' << v;
        for (double u : p.variables) os << ' ' << u;
        os << "\n";
    }
}

inline void save_ensemble(const std::string& path, const Ensemble& ens) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_ensemble: cannot open " + path);
    save_ensemble(os, ens);
}

/// Parse an ensemble snapshot with the given arity. Each data line must carry
/// exactly 2*dim + variable_count numbers; violations name the line.
inline Ensemble load_ensemble(std::istream& is, int dim, int variable_count) {
    Ensemble ens(dim, variable_count);
    const std::size_t want = 2 * static_cast<std::size_t>(dim) +
                             static_cast<std::size_t>(variable_count);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<double> nums;
        double x;
        while (ss >> x) nums.push_back(x);
        if (nums.empty()) {
            std::string tail;
            if (ss.clear(), ss >> tail)
                throw std::runtime_error("load_ensemble: line " + std::to_string(lineno) +
                                         ": not a number: '" + tail + "'");
            continue; // blank or comment-only line
        }
        if (!ss.eof()) {
            std::string tail;
            ss.clear();
            ss >> tail;
            throw std::runtime_error("load_ensemble: line " + std::to_string(lineno) +
                                     ": not a number: '" + tail + "'");
        }
        if (nums.size() != want)
            throw std::runtime_error("load_ensemble: line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(want) +
                                     " numbers, got " + std::to_string(nums.size()));
        EParticle p;
        p.position.assign(nums.begin(), nums.begin() + dim);
        p.velocity.assign(nums.begin() + dim, nums.begin() + 2 * dim);
        p.variables.assign(nums.begin() + 2 * dim, nums.end());
        ens.add(std::move(p));
    }
    return ens;
}

inline Ensemble load_ensemble(const std::string& path, int dim, int variable_count) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_ensemble: cannot open " + path);
    return load_ensemble(is, dim, variable_count);
}

} // namespace riskflow
