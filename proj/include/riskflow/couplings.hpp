#pragma once

/// Mutual-interaction coefficients between the paired field families and the
/// mode values they induce. Sign constraints decide whether a pair oscillates
/// (frequency w = sqrt(-product)) or grows/decays (rate g = sqrt(product));
/// the stability inequalities keep the pure growth rates below the energy
/// growth rate so energy terms dominate the long-time budget.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace riskflow {

/// All fourteen coupling coefficients. Defaults are zero (everything inert).
struct CouplingSet {
    double a = 0.0;    // density A response to x.PB
    double b = 0.0;    // density B response to x.PA
    double c = 0.0;    // impulse PA response to PB (c*d < 0: oscillation)
    double d = 0.0;    // impulse PB response to PA
    double c_e = 0.0;  // energy EA response to EB (c_e*d_e > 0: growth/decay)
    double d_e = 0.0;  // energy EB response to EA
    double c_pe = 0.0; // energy-impulse PEA response to PEB (c_pe*d_pe < 0)
    double d_pe = 0.0; // energy-impulse PEB response to PEA
    double c_v = 0.0;  // risk-weighted flux VXPA response to UYPB (c_v*d_v < 0)
    double d_v = 0.0;  // risk-weighted flux UYPB response to VXPA
    double c_vu = 0.0; // fourth-order V4A response to U4B (c_vu*d_vu > 0)
    double d_vu = 0.0; // fourth-order U4B response to V4A
    double c_xv = 0.0; // quadratic-flux XVA response to YUB (c_xv*d_xv > 0)
    double d_xv = 0.0; // quadratic-flux YUB response to XVA

    // Derived mode values; NaN when the defining sign condition fails.
    double omega() const { return freq_of(c, d); }        // impulse frequency
    double gamma_e() const { return rate_of(c_e, d_e); }  // energy rate
    double omega_pe() const { return freq_of(c_pe, d_pe); }
    double omega_v() const { return freq_of(c_v, d_v); }
    double gamma_vu() const { return rate_of(c_vu, d_vu); }
    double gamma_xv() const { return rate_of(c_xv, d_xv); }

private:
    static double freq_of(double p, double q) {
        const double prod = p * q;
        if (!(prod < 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(-prod);
    }
    static double rate_of(double p, double q) {
        const double prod = p * q;
        if (!(prod > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(prod);
    }
};

/// Outcome of one named constraint test.
struct ConstraintCheck {
    std::string name;   // e.g. "c*d < 0"
    std::string detail; // computed values, human-readable
    bool passed = false;
};

struct ConstraintReport {
    std::vector<ConstraintCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (!c.passed) out.push_back(c.name + " violated: " + c.detail);
        return out;
    }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& c : checks)
            os << (c.passed ? "pass" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
        return os.str();
    }
};

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace detail

/// Evaluate every sign and stability constraint, each reported by name with
/// the computed values. Nothing is thrown; callers decide how to react.
inline ConstraintReport check_constraints(const CouplingSet& k) {
    ConstraintReport rep;
    auto sign_check = [&](const char* name, double lhs, bool negative) {
        ConstraintCheck c;
        c.name = name;
        c.passed = negative ? (lhs < 0.0) : (lhs > 0.0);
        c.detail = std::string("value = ") + detail::num(lhs);
        rep.checks.push_back(std::move(c));
    };
    sign_check("c*d < 0", k.c * k.d, true);
    sign_check("c_e*d_e > 0", k.c_e * k.d_e, false);
    sign_check("c_pe*d_pe < 0", k.c_pe * k.d_pe, true);
    sign_check("c_v*d_v < 0", k.c_v * k.d_v, true);
    sign_check("c_vu*d_vu > 0", k.c_vu * k.d_vu, false);
    sign_check("c_xv*d_xv > 0", k.c_xv * k.d_xv, false);

    auto stability_check = [&](const char* name, double g, const char* gname) {
        ConstraintCheck c;
        c.name = name;
        const double ge = k.gamma_e();
        c.passed = std::isfinite(ge) && std::isfinite(g) && ge > g;
        c.detail = "gamma_e = " + detail::num(ge) + ", " + gname + " = " + detail::num(g);
        rep.checks.push_back(std::move(c));
    };
    stability_check("gamma_e > gamma_vu", k.gamma_vu(), "gamma_vu");
    stability_check("gamma_e > gamma_xv", k.gamma_xv(), "gamma_xv");
    return rep;
}

} // namespace riskflow
