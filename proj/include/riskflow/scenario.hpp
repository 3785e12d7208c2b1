#pragma once

/// Scenario files and run pipelines. A scenario is a line-oriented
/// `section.key = value` text file describing the domain, the coupling
/// constants, the initial fields (Gaussian bumps with velocity profiles),
/// and how to run: full transport ("hierarchy" or "self-consistent"), the
/// reduced aggregate system alone ("ode-only"), or transport started from a
/// deposited particle ensemble ("kinetic-init"). run_scenario produces an
/// aggregate CSV, optional field snapshots, and a summary report;
/// compare_scenario runs transport and the aggregate system side by side
/// from the same measured initial aggregates and reports the deviation per
/// tracked aggregate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskflow/aggregates.hpp"
#include "riskflow/couplings.hpp"
#include "riskflow/errors.hpp"
#include "riskflow/espace.hpp"
#include "riskflow/hydro.hpp"
#include "riskflow/kinetic.hpp"
#include "riskflow/num_format.hpp"
#include "riskflow/odesys.hpp"

namespace riskflow {

enum class RunMode { Hierarchy, SelfConsistent, OdeOnly, KineticInit };

inline std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Hierarchy: return "hierarchy";
        case RunMode::SelfConsistent: return "self-consistent";
        case RunMode::OdeOnly: return "ode-only";
        case RunMode::KineticInit: return "kinetic-init";
    }
    return "?";
}

/// Gaussian density bump: offset + amplitude * exp(-|x-center|^2 / (2 w^2)).
struct GaussianBump {
    double offset = 1.0;
    double amplitude = 0.5;
    double width = 0.1;
    std::vector<double> center{0.35};
};

/// Per-axis velocity profile sharing one Gaussian envelope:
/// v_i(x) = offset_i + amplitude_i * exp(-|x-center|^2 / (2 w^2)).
struct VelocityProfile {
    std::vector<double> amplitude{0.15};
    std::vector<double> offset{0.0};
    double width = 0.25;
    std::vector<double> center{0.5};
};

struct Scenario {
    // space
    std::vector<double> upper{1.0};
    std::vector<int> cells{256};

    // couplings
    CouplingSet couplings;
    bool allow_constraint_violations = false;

    // initial data
    GaussianBump bump_a;
    GaussianBump bump_b{1.0, 0.4, 0.12, {0.6}};
    VelocityProfile vel_a;
    VelocityProfile vel_b{{-0.12}, {0.0}, 0.25, {0.5}};

    // run control
    RunMode mode = RunMode::Hierarchy;
    double dt = 0.0;    // required
    long steps = -1;    // required
    long sample_stride = 1;
    double cfl_limit = 0.5;
    double negativity_tol = 1e-9;
    std::uint64_t seed = 1;

    // reduced system
    SystemLevel ode_level = SystemLevel::C;

    // ensemble (kinetic-init)
    std::string ensemble_path;     // load from file when non-empty
    long ensemble_count = 100000;  // generated size otherwise
    std::string ensemble_save;     // save generated/loaded ensemble when non-empty
    double velocity_jitter = 0.05;

    // outputs (file names inside the output directory)
    std::string csv_name = "aggregates.csv";
    std::string summary_name = "summary.txt";
    long snapshot_stride = 0; // 0 = no snapshots

    int dim() const { return static_cast<int>(upper.size()); }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline ConfigError config_error(std::size_t line, const std::string& what) {
    return ConfigError("line " + std::to_string(line) + ": " + what);
}

inline double parse_one_double(const std::string& v, std::size_t line,
                               const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw config_error(line, "cannot parse number '" + v + "' for " + key);
    }
}

inline std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : v) {
        if (c == ',') { parts.push_back(trim(cur)); cur.clear(); }
        else cur += c;
    }
    parts.push_back(trim(cur));
    return parts;
}

inline std::vector<double> parse_double_list(const std::string& v, std::size_t line,
                                             const std::string& key) {
    std::vector<double> out;
    for (const std::string& p : split_commas(v)) out.push_back(parse_one_double(p, line, key));
    return out;
}

inline long parse_one_long(const std::string& v, std::size_t line,
                           const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw config_error(line, "cannot parse integer '" + v + "' for " + key);
    }
}

inline std::vector<int> parse_cell_list(const std::string& v, std::size_t line,
                                        const std::string& key) {
    std::vector<int> out;
    for (const std::string& p : split_commas(v)) {
        const long x = parse_one_long(p, line, key);
        if (x < 1 || x > 1'000'000'000)
            throw config_error(line, key + " entries must be in [1, 1e9], got " + p);
        out.push_back(static_cast<int>(x));
    }
    return out;
}

inline bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error(line, "cannot parse boolean '" + v + "' for " + key +
                                 " (use true/false)");
}

inline RunMode parse_mode(const std::string& v, std::size_t line) {
    if (v == "hierarchy") return RunMode::Hierarchy;
    if (v == "self-consistent") return RunMode::SelfConsistent;
    if (v == "ode-only") return RunMode::OdeOnly;
    if (v == "kinetic-init") return RunMode::KineticInit;
    throw config_error(line, "unknown run.mode '" + v +
                                 "' (hierarchy, self-consistent, ode-only, kinetic-init)");
}

inline SystemLevel parse_level(const std::string& v, std::size_t line) {
    if (v == "A" || v == "a") return SystemLevel::A;
    if (v == "B" || v == "b") return SystemLevel::B;
    if (v == "C" || v == "c") return SystemLevel::C;
    if (v == "combined" || v == "Combined") return SystemLevel::Combined;
    throw config_error(line, "unknown ode.level '" + v + "' (A, B, C, combined)");
}

/// Broadcast a single-entry list to n entries; reject other length mismatches.
template <class T>
inline void conform(std::vector<T>& v, std::size_t n, const std::string& key) {
    if (v.size() == n) return;
    if (v.size() == 1) { v.assign(n, v[0]); return; }
    throw ConfigError(key + " has " + std::to_string(v.size()) +
                      " entries, expected " + std::to_string(n));
}

} // namespace detail

/// Parse a scenario from a stream of `section.key = value` lines ('#' starts
/// a comment). Unknown keys and malformed values fail with the line number;
/// missing required keys (all couplings, run.dt, run.steps) fail afterwards.
inline Scenario parse_scenario(std::istream& is) {
    Scenario sc;
    std::set<std::string> seen;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw detail::config_error(lineno, "expected 'section.key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw detail::config_error(lineno, "empty key or value");
        if (seen.count(key))
            throw detail::config_error(lineno, "duplicate key " + key);
        seen.insert(key);

        const auto num = [&] { return detail::parse_one_double(value, lineno, key); };
        const auto lst = [&] { return detail::parse_double_list(value, lineno, key); };
        const auto cnt = [&] { return detail::parse_one_long(value, lineno, key); };

        if (key == "space.upper") sc.upper = lst();
        else if (key == "space.cells") sc.cells = detail::parse_cell_list(value, lineno, key);

        else if (key == "couplings.a") sc.couplings.a = num();
        else if (key == "couplings.b") sc.couplings.b = num();
        else if (key == "couplings.c") sc.couplings.c = num();
        else if (key == "couplings.d") sc.couplings.d = num();
        else if (key == "couplings.c_e") sc.couplings.c_e = num();
        else if (key == "couplings.d_e") sc.couplings.d_e = num();
        else if (key == "couplings.c_pe") sc.couplings.c_pe = num();
        else if (key == "couplings.d_pe") sc.couplings.d_pe = num();
        else if (key == "couplings.c_v") sc.couplings.c_v = num();
        else if (key == "couplings.d_v") sc.couplings.d_v = num();
        else if (key == "couplings.c_vu") sc.couplings.c_vu = num();
        else if (key == "couplings.d_vu") sc.couplings.d_vu = num();
        else if (key == "couplings.c_xv") sc.couplings.c_xv = num();
        else if (key == "couplings.d_xv") sc.couplings.d_xv = num();
        else if (key == "couplings.allow_violations")
            sc.allow_constraint_violations = detail::parse_bool(value, lineno, key);

        else if (key == "init.a_offset") sc.bump_a.offset = num();
        else if (key == "init.a_amplitude") sc.bump_a.amplitude = num();
        else if (key == "init.a_width") sc.bump_a.width = num();
        else if (key == "init.a_center") sc.bump_a.center = lst();
        else if (key == "init.b_offset") sc.bump_b.offset = num();
        else if (key == "init.b_amplitude") sc.bump_b.amplitude = num();
        else if (key == "init.b_width") sc.bump_b.width = num();
        else if (key == "init.b_center") sc.bump_b.center = lst();
        else if (key == "init.v_amplitude") sc.vel_a.amplitude = lst();
        else if (key == "init.v_offset") sc.vel_a.offset = lst();
        else if (key == "init.v_width") sc.vel_a.width = num();
        else if (key == "init.v_center") sc.vel_a.center = lst();
        else if (key == "init.u_amplitude") sc.vel_b.amplitude = lst();
        else if (key == "init.u_offset") sc.vel_b.offset = lst();
        else if (key == "init.u_width") sc.vel_b.width = num();
        else if (key == "init.u_center") sc.vel_b.center = lst();

        else if (key == "run.mode") sc.mode = detail::parse_mode(value, lineno);
        else if (key == "run.dt") sc.dt = num();
        else if (key == "run.steps") sc.steps = cnt();
        else if (key == "run.sample_stride") sc.sample_stride = cnt();
        else if (key == "run.cfl_limit") sc.cfl_limit = num();
        else if (key == "run.negativity_tol") sc.negativity_tol = num();
        else if (key == "run.seed") {
            const long s = cnt();
            if (s < 0) throw detail::config_error(lineno, "run.seed must be >= 0");
            sc.seed = static_cast<std::uint64_t>(s);
        }

        else if (key == "ode.level") sc.ode_level = detail::parse_level(value, lineno);

        else if (key == "ensemble.path") sc.ensemble_path = value;
        else if (key == "ensemble.count") sc.ensemble_count = cnt();
        else if (key == "ensemble.save") sc.ensemble_save = value;
        else if (key == "ensemble.velocity_jitter") sc.velocity_jitter = num();

        else if (key == "output.csv") sc.csv_name = value;
        else if (key == "output.summary") sc.summary_name = value;
        else if (key == "output.snapshot_stride") sc.snapshot_stride = cnt();

        else throw detail::config_error(lineno, "unknown key " + key);
    }

    static const char* required_couplings[] = {"a", "b", "c", "d", "c_e", "d_e",
                                               "c_pe", "d_pe", "c_v", "d_v",
                                               "c_vu", "d_vu", "c_xv", "d_xv"};
    std::vector<std::string> missing;
    for (const char* k : required_couplings)
        if (!seen.count(std::string("couplings.") + k))
            missing.push_back(std::string("couplings.") + k);
    if (!seen.count("run.dt")) missing.push_back("run.dt");
    if (!seen.count("run.steps")) missing.push_back("run.steps");
    if (!missing.empty()) {
        std::string what = "missing required keys:";
        for (const std::string& m : missing) what += " " + m;
        throw ConfigError(what);
    }

    // conform list lengths to the dimension
    const std::size_t n = sc.upper.size();
    detail::conform(sc.cells, n, "space.cells");
    detail::conform(sc.bump_a.center, n, "init.a_center");
    detail::conform(sc.bump_b.center, n, "init.b_center");
    detail::conform(sc.vel_a.amplitude, n, "init.v_amplitude");
    detail::conform(sc.vel_a.offset, n, "init.v_offset");
    detail::conform(sc.vel_a.center, n, "init.v_center");
    detail::conform(sc.vel_b.amplitude, n, "init.u_amplitude");
    detail::conform(sc.vel_b.offset, n, "init.u_offset");
    detail::conform(sc.vel_b.center, n, "init.u_center");

    for (double x : sc.upper)
        if (!(x > 0.0)) throw ConfigError("space.upper entries must be positive");
    if (!(sc.dt > 0.0)) throw ConfigError("run.dt must be positive");
    if (sc.steps < 1) throw ConfigError("run.steps must be >= 1");
    if (sc.sample_stride < 1) throw ConfigError("run.sample_stride must be >= 1");
    if (!(sc.cfl_limit > 0.0)) throw ConfigError("run.cfl_limit must be positive");
    if (!(sc.bump_a.width > 0.0) || !(sc.bump_b.width > 0.0) ||
        !(sc.vel_a.width > 0.0) || !(sc.vel_b.width > 0.0))
        throw ConfigError("init widths must be positive");
    if (sc.ensemble_count < 1) throw ConfigError("ensemble.count must be >= 1");
    if (sc.velocity_jitter < 0.0) throw ConfigError("ensemble.velocity_jitter must be >= 0");
    if (sc.snapshot_stride < 0) throw ConfigError("output.snapshot_stride must be >= 0");
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scenario file " + path);
    return parse_scenario(is);
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

inline RiskGrid scenario_grid(const Scenario& sc) {
    return RiskGrid(RiskDomain(sc.upper), sc.cells);
}

namespace detail {

inline double gauss_envelope(const std::vector<double>& x,
                             const std::vector<double>& center, double width) {
    double q = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        q += d * d;
    }
    return std::exp(-q / (2.0 * width * width));
}

/// Bulk-velocity wall factor: 1 at the box center, 0 on every wall. The box
/// is closed (zero-flux), so a bulk flow that does not vanish at a wall
/// steadily drains the wall cells at a resolution-dependent rate until the
/// velocity there blows up; tapering the configured profile keeps initial
/// data consistent with the boundaries.
inline double wall_taper(const std::vector<double>& x, const std::vector<double>& upper) {
    double t = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = x[i] / upper[i];
        t *= 4.0 * s * (1.0 - s);
    }
    return t;
}

} // namespace detail

/// Build the transport state described by the scenario's init section:
/// Gaussian density bumps for both sectors, impulses density * velocity
/// profile * wall taper (bulk flow vanishes on the closed walls). Refuses
/// initial data with negative densities.
inline HydroState scenario_initial_state(const Scenario& sc) {
    const RiskGrid grid = scenario_grid(sc);
    Field A = Field::scalar(grid), B = Field::scalar(grid);
    Field PA = Field::vector(grid), PB = Field::vector(grid);
    std::vector<double> x(static_cast<std::size_t>(grid.dim()));
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        for (int i = 0; i < grid.dim(); ++i)
            x[static_cast<std::size_t>(i)] = grid.center(c, i);
        const double a = sc.bump_a.offset +
                         sc.bump_a.amplitude * detail::gauss_envelope(x, sc.bump_a.center,
                                                                      sc.bump_a.width);
        const double b = sc.bump_b.offset +
                         sc.bump_b.amplitude * detail::gauss_envelope(x, sc.bump_b.center,
                                                                      sc.bump_b.width);
        if (a < 0.0 || b < 0.0)
            throw ConstraintError("initial density is negative at cell " +
                                  std::to_string(c) +
                                  "; raise the offset or shrink the amplitude");
        A(c) = a;
        B(c) = b;
        const double ga = detail::gauss_envelope(x, sc.vel_a.center, sc.vel_a.width);
        const double gb = detail::gauss_envelope(x, sc.vel_b.center, sc.vel_b.width);
        const double taper = detail::wall_taper(x, sc.upper);
        for (int i = 0; i < grid.dim(); ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            PA(c, i) = a * (sc.vel_a.offset[ii] + sc.vel_a.amplitude[ii] * ga) * taper;
            PB(c, i) = b * (sc.vel_b.offset[ii] + sc.vel_b.amplitude[ii] * gb) * taper;
        }
    }
    return make_state(A, B, PA, PB, 0.0);
}

// ---------------------------------------------------------------------------
// Ensembles (kinetic-init)
// ---------------------------------------------------------------------------

namespace detail {

/// Deterministic standard-normal source: mt19937_64 bits mapped to doubles
/// explicitly (no std::*_distribution, whose output is library-specific).
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : eng_(seed) {}
    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * M_PI * uniform());
    }

private:
    std::mt19937_64 eng_;
};

} // namespace detail

/// Generate the scenario's particle ensemble: positions are per-axis
/// Gaussians around the first sector's bump (rejection-truncated to the open
/// box), velocities follow the first sector's wall-tapered velocity profile
/// plus Gaussian jitter, and both carried variables split unit totals evenly.
inline Ensemble generate_ensemble(const Scenario& sc) {
    const int dim = sc.dim();
    Ensemble ens(dim, 2);
    detail::NormalSource rng(sc.seed);
    const double w = 1.0 / static_cast<double>(sc.ensemble_count);
    for (long p = 0; p < sc.ensemble_count; ++p) {
        EParticle particle;
        particle.position.resize(static_cast<std::size_t>(dim));
        particle.velocity.resize(static_cast<std::size_t>(dim));
        particle.variables = {w, w};
        for (int i = 0; i < dim; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            double x = 0.0;
            bool ok = false;
            for (int attempt = 0; attempt < 100000; ++attempt) {
                x = sc.bump_a.center[ii] + sc.bump_a.width * rng.normal();
                if (x > 0.0 && x < sc.upper[ii]) { ok = true; break; }
            }
            if (!ok)
                throw ConfigError("ensemble generation: cannot place particles inside "
                                  "the domain; move init.a_center or widen the box");
            particle.position[ii] = x;
        }
        const double g = detail::gauss_envelope(particle.position, sc.vel_a.center,
                                                sc.vel_a.width);
        const double taper = detail::wall_taper(particle.position, sc.upper);
        for (int i = 0; i < dim; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            particle.velocity[ii] =
                (sc.vel_a.offset[ii] + sc.vel_a.amplitude[ii] * g) * taper +
                sc.velocity_jitter * rng.normal();
        }
        ens.add(std::move(particle));
    }
    return ens;
}

/// Load (ensemble.path) or generate the ensemble, deposit variable 0 onto the
/// first sector and variable 1 onto the second, and start transport from the
/// deposited densities and impulses.
inline HydroState kinetic_initial_state(const Scenario& sc, Ensemble* keep = nullptr) {
    const RiskGrid grid = scenario_grid(sc);
    Ensemble ens(sc.dim(), 2);
    if (!sc.ensemble_path.empty()) {
        std::ifstream is(sc.ensemble_path);
        if (!is) throw ConfigError("cannot open ensemble file " + sc.ensemble_path);
        try {
            ens = load_ensemble(is, sc.dim(), 2);
        } catch (const std::exception& e) {
            throw ConfigError("ensemble file " + sc.ensemble_path + ": " + e.what());
        }
    } else {
        ens = generate_ensemble(sc);
    }
    const DepositResult da = deposit(ens, grid, 0);
    const DepositResult db = deposit(ens, grid, 1);
    if (keep) *keep = std::move(ens);
    return make_state(da.density, db.density, da.impulse, db.impulse, 0.0);
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

struct RunOutputs {
    AggregateSeries series;
    ConstraintReport constraints;
    bool have_modes = false;
    ModeSet mode_set;
    bool have_identity = false;
    std::vector<IdentitySample> identity_samples;
    IdentityResiduals identity_residuals;
    bool ode_truncated = false;
    std::string truncation_reason;
    bool used_closed_form_fallback = false;
    double closed_form_deviation = std::numeric_limits<double>::quiet_NaN();
    std::string csv_path;
    std::string summary_path;
};

namespace detail {

struct PdeRun {
    AggregateSeries series;
    std::vector<IdentitySample> identities;
};

/// Advance the transport state, measuring every sample_stride-th step
/// (matching the reduced system's recording pattern) and optionally saving
/// field snapshots into snapshot_dir.
inline PdeRun run_pde(const Scenario& sc, HydroState state, ClosureMode closure,
                      const std::string& snapshot_dir) {
    StepConfig cfg;
    cfg.dt = sc.dt;
    cfg.cfl_limit = sc.cfl_limit;
    cfg.mode = closure;
    cfg.negativity_tol = sc.negativity_tol;

    PdeRun out;
    const auto record = [&](const HydroState& s) {
        out.series.add(measure(s));
        out.identities.push_back(sample_identities(s));
    };
    const auto snapshot = [&](const HydroState& s, long stepno) {
        if (snapshot_dir.empty() || sc.snapshot_stride < 1) return;
        if (stepno % sc.snapshot_stride != 0) return;
        const auto path = std::filesystem::path(snapshot_dir) /
                          ("snapshot_" + std::to_string(stepno) + ".txt");
        save_snapshot(path.string(), s);
    };
    record(state);
    snapshot(state, 0);
    for (long s = 1; s <= sc.steps; ++s) {
        state = step(state, sc.couplings, cfg);
        if (s % sc.sample_stride == 0) record(state);
        snapshot(state, s);
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path);
    os << text;
}

/// Shared summary sections: header, constraint report, mode table.
inline void summarize_common(std::ostringstream& os, const Scenario& sc,
                             const RunOutputs& out, std::size_t samples) {
    os << "mode: " << to_string(sc.mode) << "\n";
    os << "grid:";
    for (std::size_t i = 0; i < sc.cells.size(); ++i)
        os << (i ? " x " : " ") << sc.cells[i];
    os << " cells on";
    for (std::size_t i = 0; i < sc.upper.size(); ++i)
        os << (i ? " x " : " ") << "[0, " << format_double(sc.upper[i]) << "]";
    os << "\n";
    os << "dt: " << format_double(sc.dt) << "  steps: " << sc.steps
       << "  samples: " << samples << "\n\n";
    os << "coupling constraints:\n" << out.constraints.to_string() << "\n";
    if (out.have_modes) {
        os << "aggregate system (level " << to_string(sc.ode_level) << ") modes:\n"
           << out.mode_set.to_string() << "\n";
    }
}

inline void append_final_aggregates(std::ostringstream& os, const AggregateSeries& series,
                                    int dim) {
    if (series.size() == 0) return;
    const AggregateRecord& r = series.records().back();
    os << "final aggregates (t = " << format_double(r.t) << "):\n";
    const auto scalar = [&](const char* name, const std::optional<double>& v) {
        if (v) os << "  " << name << " = " << format_double(*v) << "\n";
    };
    const auto vec = [&](const char* name, const std::optional<std::vector<double>>& v) {
        if (!v) return;
        os << "  " << name << " =";
        for (int i = 0; i < dim; ++i) os << " " << format_double((*v)[static_cast<std::size_t>(i)]);
        os << "\n";
    };
    scalar("A", r.A);
    scalar("B", r.B);
    vec("X", r.X);
    vec("Y", r.Y);
    scalar("sigma2", r.sigma2);
    scalar("EA", r.EA);
    scalar("EB", r.EB);
}

} // namespace detail

/// Execute a scenario into out_dir: aggregates CSV, optional snapshots, and a
/// summary report. Transport modes additionally check the aggregate identity
/// residuals; ode-only integrates the reduced linear system from the measured
/// initial aggregates and cross-checks against its closed form.
inline RunOutputs run_scenario(const Scenario& sc, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    RunOutputs out;
    out.constraints = check_constraints(sc.couplings);
    if (!out.constraints.all_passed() && !sc.allow_constraint_violations) {
        std::string what = "coupling constraints violated:";
        for (const std::string& f : out.constraints.failures()) what += "\n  " + f;
        throw ConstraintError(what);
    }

    // the reduced system at the scenario's level, for mode reporting and
    // (ode-only) integration
    LinearSystem sys = build_system(sc.couplings, sc.ode_level, sc.dim(),
                                    sc.allow_constraint_violations);
    out.mode_set = modes(sys);
    out.have_modes = true;

    std::size_t samples = 0;
    std::ostringstream extra;
    if (sc.mode == RunMode::OdeOnly) {
        const HydroState initial = scenario_initial_state(sc);
        const Eigen::VectorXd y0 = state_vector(sys, measure(initial));
        const OdeTrajectory traj = integrate_ode(sys, y0, sc.dt, sc.steps, sc.sample_stride);
        out.ode_truncated = traj.truncated;
        out.truncation_reason = traj.truncation_reason;
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            out.series.add(record_from_state(sys, traj.times[i],
                                             traj.states.row(static_cast<Eigen::Index>(i))));
        samples = traj.times.size();

        ClosedFormSolution cf(sys, y0);
        out.used_closed_form_fallback = cf.used_fallback();
        double dev = 0.0;
        const std::size_t stride = std::max<std::size_t>(1, traj.times.size() / 50);
        for (std::size_t i = 0; i < traj.times.size(); i += stride) {
            const Eigen::VectorXd ref = cf.at(traj.times[i]);
            dev = std::max(dev, (ref - traj.states.row(static_cast<Eigen::Index>(i))
                                           .transpose()).cwiseAbs().maxCoeff());
        }
        out.closed_form_deviation = dev;
        extra << "closed-form cross-check: max deviation " << detail::format_double(dev)
              << (cf.used_fallback() ? " (matrix-exponential path)\n"
                                     : " (eigenbasis path)\n");
        if (traj.truncated)
            extra << "trajectory truncated: " << traj.truncation_reason << "\n";
    } else {
        HydroState state = scenario_initial_state(sc);
        if (sc.mode == RunMode::KineticInit) {
            Ensemble kept(sc.dim(), 2);
            state = kinetic_initial_state(sc, &kept);
            if (!sc.ensemble_save.empty()) {
                const auto path = std::filesystem::path(out_dir) / sc.ensemble_save;
                save_ensemble(path.string(), kept);
            }
        }
        const ClosureMode closure = sc.mode == RunMode::SelfConsistent
                                        ? ClosureMode::SelfConsistent
                                        : ClosureMode::Hierarchy;
        detail::PdeRun run = detail::run_pde(sc, std::move(state), closure, out_dir);
        out.series = std::move(run.series);
        out.identity_samples = std::move(run.identities);
        samples = out.series.size();
        if (out.identity_samples.size() >= 3) {
            out.identity_residuals =
                evaluate_identity_suite(out.identity_samples, sc.couplings);
            out.have_identity = true;
            extra << "aggregate identity residuals:\n"
                  << out.identity_residuals.to_string() << "\n";
        }
    }

    const auto csv_path = std::filesystem::path(out_dir) / sc.csv_name;
    write_csv(csv_path.string(), out.series, sc.dim());
    out.csv_path = csv_path.string();

    std::ostringstream os;
    detail::summarize_common(os, sc, out, samples);
    os << extra.str();
    detail::append_final_aggregates(os, out.series, sc.dim());
    const auto summary_path = std::filesystem::path(out_dir) / sc.summary_name;
    detail::write_text_file(summary_path.string(), os.str());
    out.summary_path = summary_path.string();
    return out;
}

// ---------------------------------------------------------------------------
// Transport vs reduced-system comparison
// ---------------------------------------------------------------------------

struct LabelDeviation {
    std::string label;
    double max_abs = 0.0; // max |transport - reduced| over shared samples
    double max_rel = 0.0; // max_abs / max(|reduced| peak, tiny)
};

struct CompareResult {
    AggregateSeries transport;
    AggregateSeries reduced;
    std::vector<LabelDeviation> deviations;
    double worst_rel = 0.0;
    bool ode_truncated = false;
    std::string report_path;
};

/// Run transport and the reduced aggregate system from the same measured
/// initial aggregates, sampled on the same step grid, and report per-label
/// deviations. Writes the transport CSV (output.csv), the reduced-system CSV
/// (ode.csv), and comparison.txt into out_dir.
inline CompareResult compare_scenario(const Scenario& sc, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const ConstraintReport constraints = check_constraints(sc.couplings);
    if (!constraints.all_passed() && !sc.allow_constraint_violations) {
        std::string what = "coupling constraints violated:";
        for (const std::string& f : constraints.failures()) what += "\n  " + f;
        throw ConstraintError(what);
    }
    LinearSystem sys = build_system(sc.couplings, sc.ode_level, sc.dim(),
                                    sc.allow_constraint_violations);

    HydroState initial = sc.mode == RunMode::KineticInit ? kinetic_initial_state(sc)
                                                         : scenario_initial_state(sc);
    const Eigen::VectorXd y0 = state_vector(sys, measure(initial));
    const ClosureMode closure = sc.mode == RunMode::SelfConsistent
                                    ? ClosureMode::SelfConsistent
                                    : ClosureMode::Hierarchy;

    CompareResult out;
    detail::PdeRun run = detail::run_pde(sc, std::move(initial), closure, "");
    out.transport = std::move(run.series);

    const OdeTrajectory traj = integrate_ode(sys, y0, sc.dt, sc.steps, sc.sample_stride);
    out.ode_truncated = traj.truncated;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        out.reduced.add(record_from_state(sys, traj.times[i],
                                          traj.states.row(static_cast<Eigen::Index>(i))));

    const std::size_t shared = std::min(out.transport.size(), out.reduced.size());
    const int dim = sys.dim();
    std::vector<double> max_abs(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> peak(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i < shared; ++i) {
        const Eigen::VectorXd yp = state_vector(sys, out.transport.records()[i]);
        for (int j = 0; j < dim; ++j) {
            const double yo = traj.states(static_cast<Eigen::Index>(i), j);
            const std::size_t jj = static_cast<std::size_t>(j);
            max_abs[jj] = std::max(max_abs[jj], std::fabs(yp(j) - yo));
            peak[jj] = std::max(peak[jj], std::fabs(yo));
        }
    }
    for (int j = 0; j < dim; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        LabelDeviation d;
        d.label = sys.labels()[jj];
        d.max_abs = max_abs[jj];
        d.max_rel = max_abs[jj] / std::max(peak[jj], 1e-12);
        out.worst_rel = std::max(out.worst_rel, d.max_rel);
        out.deviations.push_back(std::move(d));
    }

    write_csv((std::filesystem::path(out_dir) / sc.csv_name).string(), out.transport,
              sc.dim());
    write_csv((std::filesystem::path(out_dir) / "ode.csv").string(), out.reduced,
              sc.dim());

    std::ostringstream os;
    os << "transport vs reduced aggregate system (level " << to_string(sc.ode_level)
       << "), " << shared << " shared samples\n\n";
    os << "label            max |diff|      max relative\n";
    for (const LabelDeviation& d : out.deviations) {
        os << "  " << d.label;
        for (std::size_t pad = d.label.size(); pad < 15; ++pad) os << ' ';
        os << detail::format_double(d.max_abs) << "  "
           << detail::format_double(d.max_rel) << "\n";
    }
    os << "\nworst relative deviation: " << detail::format_double(out.worst_rel) << "\n";
    if (out.ode_truncated)
        os << "reduced trajectory truncated: " << traj.truncation_reason << "\n";
    const auto report = std::filesystem::path(out_dir) / "comparison.txt";
    detail::write_text_file(report.string(), os.str());
    out.report_path = report.string();
    return out;
}

} // namespace riskflow
