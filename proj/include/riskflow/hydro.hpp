#pragma once

/// Coupled transport equations on risk space. Two paired families of fields
/// (the A side and the B side) are advected by their own flow velocities and
/// exchange through mutual source terms; closure fields (energies and higher
/// velocity moments) either evolve by their own transport equations
/// (hierarchy mode) or are recomputed algebraically from density and impulse
/// every step (self-consistent mode). Time stepping is two-stage midpoint
/// under an explicit CFL guard.

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskflow/couplings.hpp"
#include "riskflow/errors.hpp"
#include "riskflow/espace.hpp"
#include "riskflow/kinetic.hpp"
#include "riskflow/num_format.hpp"

namespace riskflow {

/// hierarchy: closure fields evolve by their own transport equations.
/// self-consistent: closure fields are recomputed from A, B, PA, PB.
enum class ClosureMode { Hierarchy, SelfConsistent };

struct StepConfig {
    double dt = 0.0;
    double cfl_limit = 0.5;
    ClosureMode mode = ClosureMode::Hierarchy;
    /// Density-role fields may undershoot zero by at most this fraction of
    /// their own magnitude before the step is declared a failure.
    double negativity_tol = 1e-9;
};

/// Full set of coupled fields at one instant.
///   A, B      scalar densities (assets, revenue)
///   PA, PB    impulses (density times velocity)
///   EA, EB    flow energies (density times squared speed)
///   PEA, PEB  energy impulses (velocity times energy)
///   VXPA, UYPB risk-weighted flux moments (velocity times x.impulse)
///   V4A, U4B  fourth-order speed moments
///   XVA, YUB  squared risk-flux moments ((x.v)^2 times density)
struct HydroState {
    double time = 0.0;
    Field A, B;
    Field PA, PB;
    Field EA, EB;
    Field PEA, PEB;
    Field VXPA, UYPB;
    Field V4A, U4B;
    Field XVA, YUB;

    explicit HydroState(const RiskGrid& g)
        : A(Field::scalar(g)), B(Field::scalar(g)),
          PA(Field::vector(g)), PB(Field::vector(g)),
          EA(Field::scalar(g)), EB(Field::scalar(g)),
          PEA(Field::vector(g)), PEB(Field::vector(g)),
          VXPA(Field::vector(g)), UYPB(Field::vector(g)),
          V4A(Field::scalar(g)), U4B(Field::scalar(g)),
          XVA(Field::scalar(g)), YUB(Field::scalar(g)) {}

    const RiskGrid& grid() const { return A.grid(); }

    /// Visit every field paired with its name, header order.
    template <class Fn> void for_each(Fn&& fn) {
        fn("A", A); fn("B", B); fn("PA", PA); fn("PB", PB);
        fn("EA", EA); fn("EB", EB); fn("PEA", PEA); fn("PEB", PEB);
        fn("VXPA", VXPA); fn("UYPB", UYPB); fn("V4A", V4A); fn("U4B", U4B);
        fn("XVA", XVA); fn("YUB", YUB);
    }
    template <class Fn> void for_each(Fn&& fn) const {
        fn("A", A); fn("B", B); fn("PA", PA); fn("PB", PB);
        fn("EA", EA); fn("EB", EB); fn("PEA", PEA); fn("PEB", PEB);
        fn("VXPA", VXPA); fn("UYPB", UYPB); fn("V4A", V4A); fn("U4B", U4B);
        fn("XVA", XVA); fn("YUB", YUB);
    }
};

/// Flow velocity of the A side: PA / max(A, eps).
inline Field velocity_a(const HydroState& s) { return velocity_field(s.A, s.PA); }
/// Flow velocity of the B side: PB / max(B, eps).
inline Field velocity_b(const HydroState& s) { return velocity_field(s.B, s.PB); }

namespace detail {

/// Scalar field of x . f per cell for a vector field f.
inline Field inner_with_x(const Field& f) {
    require_vector(f, "inner_with_x");
    const RiskGrid& g = f.grid();
    Field out = Field::scalar(g);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        double acc = 0.0;
        for (int a = 0; a < g.dim(); ++a) acc += g.center(c, a) * f(c, a);
        out(c) = acc;
    }
    return out;
}

inline double speed_squared(const Field& v, std::size_t c) {
    double s = 0.0;
    for (int a = 0; a < v.grid().dim(); ++a) s += v(c, a) * v(c, a);
    return s;
}

} // namespace detail

/// Transport tendency -div(vel * f), applied per component of f. Face fluxes
/// are donor-cell upwind: the face velocity is the mean of the two adjacent
/// cells and its sign selects the donor. Boundary faces carry zero flux, so
/// the tendency sums to zero over the box exactly (telescoping).
inline Field advect(const Field& f, const Field& vel) {
    detail::require_vector(vel, "advect");
    if (f.grid() != vel.grid())
        throw std::invalid_argument("advect: field/velocity grid mismatch");
    const RiskGrid& g = f.grid();
    Field out(g, f.rank());
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t stride = g.stride(a);
        const int n = g.cells(a);
        if (n < 2) continue;
        const double inv_h = 1.0 / g.spacing(a);
        for (std::size_t base = 0; base < g.cell_count(); ++base) {
            if (g.axis_index(base, a) != 0) continue;
            for (int i = 0; i + 1 < n; ++i) {
                const std::size_t lo = base + static_cast<std::size_t>(i) * stride;
                const std::size_t hi = lo + stride;
                const double vface = 0.5 * (vel(lo, a) + vel(hi, a));
                const std::size_t donor = (vface >= 0.0) ? lo : hi;
                for (int k = 0; k < f.rank(); ++k) {
                    const double flux = vface * f(donor, k);
                    out(lo, k) -= flux * inv_h;
                    out(hi, k) += flux * inv_h;
                }
            }
        }
    }
    return out;
}

/// Mutual source terms only (no transport). Pairing:
///   A <- a x.PB, B <- b x.PA, PA <- c PB, PB <- d PA, EA <- c_e EB,
///   EB <- d_e EA, PEA <- c_pe PEB, PEB <- d_pe PEA, VXPA <- c_v UYPB,
///   UYPB <- d_v VXPA, V4A <- c_vu U4B, U4B <- d_vu V4A, XVA <- c_xv YUB,
///   YUB <- d_xv XVA.
inline HydroState source_terms(const HydroState& s, const CouplingSet& k) {
    const RiskGrid& g = s.grid();
    HydroState src(g);
    src.time = s.time;
    const Field xPB = detail::inner_with_x(s.PB);
    const Field xPA = detail::inner_with_x(s.PA);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        src.A(c) = k.a * xPB(c);
        src.B(c) = k.b * xPA(c);
        for (int a = 0; a < g.dim(); ++a) {
            src.PA(c, a) = k.c * s.PB(c, a);
            src.PB(c, a) = k.d * s.PA(c, a);
            src.PEA(c, a) = k.c_pe * s.PEB(c, a);
            src.PEB(c, a) = k.d_pe * s.PEA(c, a);
            src.VXPA(c, a) = k.c_v * s.UYPB(c, a);
            src.UYPB(c, a) = k.d_v * s.VXPA(c, a);
        }
        src.EA(c) = k.c_e * s.EB(c);
        src.EB(c) = k.d_e * s.EA(c);
        src.V4A(c) = k.c_vu * s.U4B(c);
        src.U4B(c) = k.d_vu * s.V4A(c);
        src.XVA(c) = k.c_xv * s.YUB(c);
        src.YUB(c) = k.d_xv * s.XVA(c);
    }
    return src;
}

/// Recompute every closure field algebraically from A, B, PA, PB:
/// EA = A|v|^2, PEA = v EA, VXPA = v (x.PA), V4A = A|v|^4, XVA = (x.v)^2 A,
/// and the mirrored B-side forms with u = PB / max(B, eps).
inline void refresh_diagnostic_closures(HydroState& s) {
    const RiskGrid& g = s.grid();
    const Field v = velocity_a(s);
    const Field u = velocity_b(s);
    const Field xPA = detail::inner_with_x(s.PA);
    const Field xPB = detail::inner_with_x(s.PB);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double v2 = detail::speed_squared(v, c);
        const double u2 = detail::speed_squared(u, c);
        s.EA(c) = s.A(c) * v2;
        s.EB(c) = s.B(c) * u2;
        s.V4A(c) = s.A(c) * v2 * v2;
        s.U4B(c) = s.B(c) * u2 * u2;
        double xv = 0.0, yu = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            xv += g.center(c, a) * v(c, a);
            yu += g.center(c, a) * u(c, a);
        }
        s.XVA(c) = xv * xv * s.A(c);
        s.YUB(c) = yu * yu * s.B(c);
        for (int a = 0; a < g.dim(); ++a) {
            s.PEA(c, a) = v(c, a) * s.EA(c);
            s.PEB(c, a) = u(c, a) * s.EB(c);
            s.VXPA(c, a) = v(c, a) * xPA(c);
            s.UYPB(c, a) = u(c, a) * xPB(c);
        }
    }
}

/// Build a state from densities and impulses; closures start self-consistent
/// (identical initial data for both closure modes).
inline HydroState make_state(const Field& A, const Field& B,
                             const Field& PA, const Field& PB,
                             double time = 0.0) {
    HydroState s(A.grid());
    s.time = time;
    s.A = A; s.B = B; s.PA = PA; s.PB = PB;
    refresh_diagnostic_closures(s);
    return s;
}

namespace detail {

inline double max_speed(const Field& v) {
    return v.max_abs();
}

inline void check_cfl(double dt, double vmax, double min_h, double limit) {
    const double number = dt * vmax / min_h;
    if (!(number <= limit)) {
        std::ostringstream os;
        os << "step: CFL violation: dt = " << dt << " gives dt*max|v|/min_dx = "
           << number << " > limit " << limit
           << " (max speed " << vmax << ", min spacing " << min_h << ")";
        throw NumericalError(os.str());
    }
}

/// Full tendency (transport + sources) for every evolved field.
/// In self-consistent mode only A, B, PA, PB evolve; closures stay zero here
/// and are refreshed after the step completes.
inline HydroState tendencies(const HydroState& s, const CouplingSet& k,
                             const Field& v, const Field& u, ClosureMode mode) {
    HydroState rhs = source_terms(s, k);
    rhs.A += advect(s.A, v);
    rhs.B += advect(s.B, u);
    rhs.PA += advect(s.PA, v);
    rhs.PB += advect(s.PB, u);
    if (mode == ClosureMode::Hierarchy) {
        rhs.EA += advect(s.EA, v);
        rhs.EB += advect(s.EB, u);
        rhs.PEA += advect(s.PEA, v);
        rhs.PEB += advect(s.PEB, u);
        rhs.VXPA += advect(s.VXPA, v);
        rhs.UYPB += advect(s.UYPB, u);
        rhs.V4A += advect(s.V4A, v);
        rhs.U4B += advect(s.U4B, u);
        rhs.XVA += advect(s.XVA, v);
        rhs.YUB += advect(s.YUB, u);
    } else {
        rhs.EA.fill(0.0); rhs.EB.fill(0.0);
        rhs.PEA.fill(0.0); rhs.PEB.fill(0.0);
        rhs.VXPA.fill(0.0); rhs.UYPB.fill(0.0);
        rhs.V4A.fill(0.0); rhs.U4B.fill(0.0);
        rhs.XVA.fill(0.0); rhs.YUB.fill(0.0);
    }
    return rhs;
}

inline void add_scaled_state(HydroState& dst, const HydroState& inc, double s) {
    dst.A.add_scaled(inc.A, s); dst.B.add_scaled(inc.B, s);
    dst.PA.add_scaled(inc.PA, s); dst.PB.add_scaled(inc.PB, s);
    dst.EA.add_scaled(inc.EA, s); dst.EB.add_scaled(inc.EB, s);
    dst.PEA.add_scaled(inc.PEA, s); dst.PEB.add_scaled(inc.PEB, s);
    dst.VXPA.add_scaled(inc.VXPA, s); dst.UYPB.add_scaled(inc.UYPB, s);
    dst.V4A.add_scaled(inc.V4A, s); dst.U4B.add_scaled(inc.U4B, s);
    dst.XVA.add_scaled(inc.XVA, s); dst.YUB.add_scaled(inc.YUB, s);
}

inline void check_health(const HydroState& s, double negativity_tol) {
    bool bad = false;
    std::string which;
    s.for_each([&](const char* name, const Field& f) {
        if (bad) return;
        for (double x : f.values()) {
            if (!std::isfinite(x)) { bad = true; which = name; return; }
        }
    });
    if (bad)
        throw NumericalError(std::string("step: non-finite value in field ") + which +
                             " at t = " + format_double(s.time));
    // Density-role fields are even velocity moments; genuine negativity there
    // means the scheme has broken down.
    const Field* density_role[] = {&s.A, &s.B, &s.EA, &s.EB,
                                   &s.V4A, &s.U4B, &s.XVA, &s.YUB};
    const char* names[] = {"A", "B", "EA", "EB", "V4A", "U4B", "XVA", "YUB"};
    for (int i = 0; i < 8; ++i) {
        const double floor = -negativity_tol * std::max(density_role[i]->max_abs(), 1.0);
        if (density_role[i]->min_value() < floor)
            throw NumericalError(std::string("step: field ") + names[i] +
                                 " fell below the negativity tolerance at t = " +
                                 format_double(s.time) + " (min " +
                                 format_double(density_role[i]->min_value()) + ")");
    }
}

} // namespace detail

/// Advance one time step with two-stage midpoint. Velocities are rebuilt from
/// density and impulse at each stage; the CFL number dt*max(|v|,|u|)/min_dx is
/// checked against cfg.cfl_limit at both stages and a violation refuses the
/// step, naming the offending dt. NaN/Inf anywhere or negativity beyond
/// tolerance in density-role fields raises a failure.
inline HydroState step(const HydroState& s, const CouplingSet& k, const StepConfig& cfg) {
    if (!(cfg.dt > 0.0))
        throw std::invalid_argument("step: dt must be positive");
    const double min_h = s.grid().min_spacing();

    const Field v0 = velocity_a(s);
    const Field u0 = velocity_b(s);
    detail::check_cfl(cfg.dt, std::max(detail::max_speed(v0), detail::max_speed(u0)),
                      min_h, cfg.cfl_limit);

    // stage 1: half step to the midpoint
    const HydroState k1 = detail::tendencies(s, k, v0, u0, cfg.mode);
    HydroState mid = s;
    detail::add_scaled_state(mid, k1, 0.5 * cfg.dt);
    mid.time = s.time + 0.5 * cfg.dt;
    if (cfg.mode == ClosureMode::SelfConsistent) refresh_diagnostic_closures(mid);

    // stage 2: full step with midpoint tendencies
    const Field v1 = velocity_a(mid);
    const Field u1 = velocity_b(mid);
    detail::check_cfl(cfg.dt, std::max(detail::max_speed(v1), detail::max_speed(u1)),
                      min_h, cfg.cfl_limit);
    const HydroState k2 = detail::tendencies(mid, k, v1, u1, cfg.mode);
    HydroState next = s;
    detail::add_scaled_state(next, k2, cfg.dt);
    next.time = s.time + cfg.dt;
    if (cfg.mode == ClosureMode::SelfConsistent) refresh_diagnostic_closures(next);

    detail::check_health(next, cfg.negativity_tol);
    return next;
}

// ---------------------------------------------------------------------------
// Aggregate identity suite
// ---------------------------------------------------------------------------

/// Box integrals entering the aggregate identities, captured at one instant.
struct IdentitySample {
    double t = 0.0;
    double intA = 0.0, intB = 0.0;       // int A, int B
    double xPA = 0.0, xPB = 0.0;         // int x.PA, int x.PB
    double ea = 0.0;                     // int A |v|^2
    std::vector<double> intPA, intPB;    // int PA_i, int PB_i
    std::vector<double> xA;              // int x_i A
    std::vector<double> xxPB;            // int x_i (x.PB)
    double x2A = 0.0;                    // int |x|^2 A
    double x2xPB = 0.0;                  // int |x|^2 (x.PB)
};

inline IdentitySample sample_identities(const HydroState& s) {
    const RiskGrid& g = s.grid();
    const int n = g.dim();
    IdentitySample q;
    q.t = s.time;
    q.intPA.assign(static_cast<std::size_t>(n), 0.0);
    q.intPB.assign(static_cast<std::size_t>(n), 0.0);
    q.xA.assign(static_cast<std::size_t>(n), 0.0);
    q.xxPB.assign(static_cast<std::size_t>(n), 0.0);
    const Field v = velocity_a(s);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        double xpa = 0.0, xpb = 0.0, r2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const double x = g.center(c, a);
            xpa += x * s.PA(c, a);
            xpb += x * s.PB(c, a);
            r2 += x * x;
        }
        q.intA += s.A(c);
        q.intB += s.B(c);
        q.xPA += xpa;
        q.xPB += xpb;
        q.ea += s.A(c) * detail::speed_squared(v, c);
        q.x2A += r2 * s.A(c);
        q.x2xPB += r2 * xpb;
        for (int a = 0; a < n; ++a) {
            q.intPA[static_cast<std::size_t>(a)] += s.PA(c, a);
            q.intPB[static_cast<std::size_t>(a)] += s.PB(c, a);
            q.xA[static_cast<std::size_t>(a)] += g.center(c, a) * s.A(c);
            q.xxPB[static_cast<std::size_t>(a)] += g.center(c, a) * xpb;
        }
    }
    const double vol = g.cell_volume();
    q.intA *= vol; q.intB *= vol; q.xPA *= vol; q.xPB *= vol; q.ea *= vol;
    q.x2A *= vol; q.x2xPB *= vol;
    for (double& x : q.intPA) x *= vol;
    for (double& x : q.intPB) x *= vol;
    for (double& x : q.xA) x *= vol;
    for (double& x : q.xxPB) x *= vol;
    return q;
}

/// Residuals of the five aggregate identities, each the max over samples of
/// |forward difference - right-hand side| (absolute), plus the magnitude the
/// residual should be compared against.
struct IdentityResiduals {
    static constexpr int count = 5;
    std::string name[count];
    double residual[count] = {0, 0, 0, 0, 0};
    double scale[count] = {0, 0, 0, 0, 0};

    std::string to_string() const {
        std::ostringstream os;
        for (int i = 0; i < count; ++i)
            os << name[i] << ": max residual " << residual[i]
               << " (scale " << scale[i] << ")\n";
        return os.str();
    }
};

/// Evaluate the identity suite over uniformly spaced samples. Forward first
/// differences make the time error O(dt), matching the O(dx) transport error,
/// so the total residual halves when both resolutions halve.
inline IdentityResiduals evaluate_identity_suite(const std::vector<IdentitySample>& s,
                                                 const CouplingSet& k) {
    if (s.size() < 2)
        throw std::invalid_argument("evaluate_identity_suite: need at least two samples");
    IdentityResiduals out;
    out.name[0] = "d/dt int A = a int x.PB (and the B-side mirror)";
    out.name[1] = "d/dt int x.PA = int A|v|^2 + c int x.PB";
    out.name[2] = "d/dt int PA = c int PB";
    out.name[3] = "d/dt int x A = int PA + a int x (x.PB)";
    out.name[4] = "d/dt int |x|^2 A = 2 int x.PA + a int |x|^2 (x.PB)";
    const std::size_t n = s[0].intPA.size();
    auto track = [&](int which, double lhs, double rhs) {
        out.residual[which] = std::max(out.residual[which], std::fabs(lhs - rhs));
        out.scale[which] = std::max({out.scale[which], std::fabs(lhs), std::fabs(rhs)});
    };
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double h = s[i + 1].t - s[i].t;
        if (!(h > 0.0))
            throw std::invalid_argument("evaluate_identity_suite: samples not increasing in t");
        track(0, (s[i + 1].intA - s[i].intA) / h, k.a * s[i].xPB);
        track(0, (s[i + 1].intB - s[i].intB) / h, k.b * s[i].xPA);
        track(1, (s[i + 1].xPA - s[i].xPA) / h, s[i].ea + k.c * s[i].xPB);
        for (std::size_t a = 0; a < n; ++a) {
            track(2, (s[i + 1].intPA[a] - s[i].intPA[a]) / h, k.c * s[i].intPB[a]);
            track(3, (s[i + 1].xA[a] - s[i].xA[a]) / h,
                  s[i].intPA[a] + k.a * s[i].xxPB[a]);
        }
        track(4, (s[i + 1].x2A - s[i].x2A) / h, 2.0 * s[i].xPA + k.a * s[i].x2xPB);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Field snapshot format
// ---------------------------------------------------------------------------

/// Header line, then one line per cell (flat order) with the values of every
/// field in header order, components expanded.
inline void save_snapshot(std::ostream& os, const HydroState& s) {
    const RiskGrid& g = s.grid();
    os << "# t=" << detail::format_double(s.time) << " dim=" << g.dim() << " cells=";
    for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.cells(a);
    os << " bounds=";
    for (int a = 0; a < g.dim(); ++a)
        os << (a ? "," : "") << detail::format_double(g.domain().upper(a));
    os << " fields=";
    bool first = true;
    s.for_each([&](const char* name, const Field& f) {
        os << (first ? "" : ",") << name << ':' << f.rank();
        first = false;
    });
    os << "\n";
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        bool lead = true;
        s.for_each([&](const char*, const Field& f) {
            for (int k = 0; k < f.rank(); ++k) {
                os << (lead ? "" : " ") << detail::format_double(f(c, k));
                lead = false;
            }
        });
        os << "\n";
    }
}

inline void save_snapshot(const std::string& path, const HydroState& s) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_snapshot: cannot open " + path);
    save_snapshot(os, s);
}

namespace detail {

inline std::string header_item(const std::string& header, const std::string& key) {
    const std::string want = key + "=";
    std::size_t pos = header.find(want);
    if (pos == std::string::npos)
        throw std::runtime_error("snapshot header: missing " + key);
    pos += want.size();
    std::size_t end = header.find(' ', pos);
    if (end == std::string::npos) end = header.size();
    return header.substr(pos, end - pos);
}

template <class T>
inline std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T v;
        if (!(is >> v))
            throw std::runtime_error("snapshot header: bad list item '" + item + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace detail

inline HydroState load_snapshot(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.empty() || header[0] != '#')
        throw std::runtime_error("snapshot: missing header line");
    const double t = std::stod(detail::header_item(header, "t"));
    const int dim = std::stoi(detail::header_item(header, "dim"));
    const auto cells = detail::parse_list<int>(detail::header_item(header, "cells"));
    const auto bounds = detail::parse_list<double>(detail::header_item(header, "bounds"));
    if (static_cast<int>(cells.size()) != dim || static_cast<int>(bounds.size()) != dim)
        throw std::runtime_error("snapshot: header dim/cells/bounds mismatch");
    RiskGrid grid{RiskDomain(bounds), cells};
    HydroState s(grid);
    s.time = t;
    // field list is fixed; verify it matches
    {
        std::ostringstream want;
        bool first = true;
        s.for_each([&](const char* name, const Field& f) {
            want << (first ? "" : ",") << name << ':' << f.rank();
            first = false;
        });
        if (detail::header_item(header, "fields") != want.str())
            throw std::runtime_error("snapshot: unexpected field list '" +
                                     detail::header_item(header, "fields") + "'");
    }
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        std::string line;
        if (!std::getline(is, line))
            throw std::runtime_error("snapshot: truncated at cell " + std::to_string(c));
        std::istringstream ss(line);
        s.for_each([&](const char* name, Field& f) {
            for (int k = 0; k < f.rank(); ++k) {
                if (!(ss >> f(c, k)))
                    throw std::runtime_error(std::string("snapshot: bad value for ") +
                                             name + " at cell " + std::to_string(c));
            }
        });
    }
    return s;
}

inline HydroState load_snapshot(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_snapshot: cannot open " + path);
    return load_snapshot(is);
}

} // namespace riskflow
