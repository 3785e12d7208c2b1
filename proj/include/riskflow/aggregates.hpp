#pragma once

/// Aggregates: box integrals of the fields and their risk-weighted moments,
/// the observables the macro story is told in. A record holds every aggregate
/// the three closure levels track; entries are optional so sources that track
/// only a subset (an ODE run at level A, say) leave the rest absent. The CSV
/// schema has a fixed canonical column order; vector entries expand to one
/// column per axis with _1.._n suffixes (plain names in one dimension).

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskflow/errors.hpp"
#include "riskflow/hydro.hpp"
#include "riskflow/num_format.hpp"

namespace riskflow {

/// Every aggregate at one instant. Scalars are contractions (x.PA etc.);
/// vectors carry one component per risk axis.
struct AggregateRecord {
    double t = 0.0;

    std::optional<double> A, B;          // total assets, total revenue
    std::optional<double> XPA, YPB;      // int x.PA, int x.PB
    std::optional<double> EA, EB;        // total flow energies

    std::optional<std::vector<double>> PA, PB;     // int PA_i
    std::optional<std::vector<double>> XP, YP;     // int x_i (x.PA)
    std::optional<std::vector<double>> XE, YE;     // int x_i EA
    std::optional<std::vector<double>> VXPA, UYPB; // int v_i (x.PA)
    std::optional<std::vector<double>> PEA, PEB;   // int PEA_i
    std::optional<std::vector<double>> XA, YB;     // int x_i A

    std::optional<double> X2A, Y2B;      // int |x|^2 A
    std::optional<double> XPAX2, YPBY2;  // int |x|^2 (x.PA)
    std::optional<double> X2EA, Y2EB;    // int |x|^2 EA
    std::optional<double> XVA, YUB;      // int (x.v)^2 A
    std::optional<double> XPEA, YPEB;    // int x.PEA
    std::optional<double> V4A, U4B;      // int |v|^4 A

    std::optional<std::vector<double>> X, Y; // mean risks XA/A, YB/B
    std::optional<double> X2;                // mean square risk X2A/A
    std::optional<double> sigma2;            // X2 - |X|^2
};

namespace detail {

/// Mass below this is treated as no mass for mean-risk ratios.
constexpr double mean_risk_mass_floor = 1e-12;

} // namespace detail

/// Derive mean risks (X, Y, X2, sigma2) from the raw moments already present
/// in the record; entries whose denominators are at or below the mass floor
/// stay absent.
inline void derive_mean_risks(AggregateRecord& r) {
    if (r.A && r.XA && *r.A > detail::mean_risk_mass_floor) {
        std::vector<double> x(*r.XA);
        for (double& v : x) v /= *r.A;
        r.X = std::move(x);
        if (r.X2A) {
            r.X2 = *r.X2A / *r.A;
            double n2 = 0.0;
            for (double v : *r.X) n2 += v * v;
            r.sigma2 = *r.X2 - n2;
        }
    }
    if (r.B && r.YB && *r.B > detail::mean_risk_mass_floor) {
        std::vector<double> y(*r.YB);
        for (double& v : y) v /= *r.B;
        r.Y = std::move(y);
    }
}

/// Measure every aggregate of a state. Closure aggregates integrate the
/// state's closure fields (algebraically refreshed ones in self-consistent
/// runs, transported ones in hierarchy runs).
inline AggregateRecord measure(const HydroState& s) {
    const RiskGrid& g = s.grid();
    const int n = g.dim();
    AggregateRecord r;
    r.t = s.time;

    double A = 0, B = 0, XPA = 0, YPB = 0, EA = 0, EB = 0;
    double X2A = 0, Y2B = 0, XPAX2 = 0, YPBY2 = 0, X2EA = 0, Y2EB = 0;
    double XVA = 0, YUB = 0, XPEA = 0, YPEB = 0, V4A = 0, U4B = 0;
    std::vector<double> PA(n, 0.0), PB(n, 0.0), XP(n, 0.0), YP(n, 0.0);
    std::vector<double> XE(n, 0.0), YE(n, 0.0), VXPA(n, 0.0), UYPB(n, 0.0);
    std::vector<double> PEA(n, 0.0), PEB(n, 0.0), XA(n, 0.0), YB(n, 0.0);

    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        double xpa = 0, xpb = 0, xpea = 0, xpeb = 0, r2 = 0;
        for (int a = 0; a < n; ++a) {
            const double x = g.center(c, a);
            xpa += x * s.PA(c, a);
            xpb += x * s.PB(c, a);
            xpea += x * s.PEA(c, a);
            xpeb += x * s.PEB(c, a);
            r2 += x * x;
        }
        A += s.A(c); B += s.B(c);
        XPA += xpa; YPB += xpb;
        EA += s.EA(c); EB += s.EB(c);
        X2A += r2 * s.A(c); Y2B += r2 * s.B(c);
        XPAX2 += r2 * xpa; YPBY2 += r2 * xpb;
        X2EA += r2 * s.EA(c); Y2EB += r2 * s.EB(c);
        XVA += s.XVA(c); YUB += s.YUB(c);
        XPEA += xpea; YPEB += xpeb;
        V4A += s.V4A(c); U4B += s.U4B(c);
        for (int a = 0; a < n; ++a) {
            const double x = g.center(c, a);
            PA[a] += s.PA(c, a); PB[a] += s.PB(c, a);
            XP[a] += x * xpa; YP[a] += x * xpb;
            XE[a] += x * s.EA(c); YE[a] += x * s.EB(c);
            VXPA[a] += s.VXPA(c, a); UYPB[a] += s.UYPB(c, a);
            PEA[a] += s.PEA(c, a); PEB[a] += s.PEB(c, a);
            XA[a] += x * s.A(c); YB[a] += x * s.B(c);
        }
    }
    const double vol = g.cell_volume();
    auto scaled = [vol](double v) { return v * vol; };
    auto scaled_vec = [vol](std::vector<double> v) {
        for (double& x : v) x *= vol;
        return v;
    };
    r.A = scaled(A); r.B = scaled(B);
    r.XPA = scaled(XPA); r.YPB = scaled(YPB);
    r.EA = scaled(EA); r.EB = scaled(EB);
    r.PA = scaled_vec(PA); r.PB = scaled_vec(PB);
    r.XP = scaled_vec(XP); r.YP = scaled_vec(YP);
    r.XE = scaled_vec(XE); r.YE = scaled_vec(YE);
    r.VXPA = scaled_vec(VXPA); r.UYPB = scaled_vec(UYPB);
    r.PEA = scaled_vec(PEA); r.PEB = scaled_vec(PEB);
    r.XA = scaled_vec(XA); r.YB = scaled_vec(YB);
    r.X2A = scaled(X2A); r.Y2B = scaled(Y2B);
    r.XPAX2 = scaled(XPAX2); r.YPBY2 = scaled(YPBY2);
    r.X2EA = scaled(X2EA); r.Y2EB = scaled(Y2EB);
    r.XVA = scaled(XVA); r.YUB = scaled(YUB);
    r.XPEA = scaled(XPEA); r.YPEB = scaled(YPEB);
    r.V4A = scaled(V4A); r.U4B = scaled(U4B);
    derive_mean_risks(r);
    return r;
}

/// Normalized density A / int A. Refuses when the total mass is not positive.
inline Field probability_view(const Field& density) {
    detail::require_scalar(density, "probability_view");
    const double mass = integrate(density);
    if (!(mass > 0.0))
        throw NumericalError("probability_view: total mass is not positive (" +
                             detail::format_double(mass) + ")");
    Field p = density;
    p *= 1.0 / mass;
    return p;
}

/// Time series of records with strictly increasing t.
class AggregateSeries {
public:
    void add(AggregateRecord r) {
        if (!records_.empty() && !(r.t > records_.back().t))
            throw std::invalid_argument("AggregateSeries: samples must increase in t");
        records_.push_back(std::move(r));
    }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const AggregateRecord& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<AggregateRecord>& records() const { return records_; }

    std::vector<double> times() const {
        std::vector<double> t(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) t[i] = records_[i].t;
        return t;
    }

    /// True when sample spacing is uniform to within a relative tolerance.
    bool uniform_spacing(double rel_tol = 1e-9) const {
        if (records_.size() < 3) return true;
        const double h0 = records_[1].t - records_[0].t;
        for (std::size_t i = 1; i + 1 < records_.size(); ++i) {
            const double h = records_[i + 1].t - records_[i].t;
            if (std::fabs(h - h0) > rel_tol * std::max(std::fabs(h0), 1e-300))
                return false;
        }
        return true;
    }

private:
    std::vector<AggregateRecord> records_;
};

// ---------------------------------------------------------------------------
// Canonical CSV schema
// ---------------------------------------------------------------------------

namespace detail {

enum class ColKind { Scalar, Vector };

struct ColumnSpec {
    const char* name;
    ColKind kind;
    std::optional<double> AggregateRecord::*scalar;
    std::optional<std::vector<double>> AggregateRecord::*vec;
};

/// Canonical column order. Vector entries expand per axis.
inline const std::vector<ColumnSpec>& column_specs() {
    using R = AggregateRecord;
    static const std::vector<ColumnSpec> specs = {
        {"A", ColKind::Scalar, &R::A, nullptr},
        {"B", ColKind::Scalar, &R::B, nullptr},
        {"XPA", ColKind::Scalar, &R::XPA, nullptr},
        {"YPB", ColKind::Scalar, &R::YPB, nullptr},
        {"EA", ColKind::Scalar, &R::EA, nullptr},
        {"EB", ColKind::Scalar, &R::EB, nullptr},
        {"PA", ColKind::Vector, nullptr, &R::PA},
        {"PB", ColKind::Vector, nullptr, &R::PB},
        {"XP", ColKind::Vector, nullptr, &R::XP},
        {"YP", ColKind::Vector, nullptr, &R::YP},
        {"XE", ColKind::Vector, nullptr, &R::XE},
        {"YE", ColKind::Vector, nullptr, &R::YE},
        {"VXPA", ColKind::Vector, nullptr, &R::VXPA},
        {"UYPB", ColKind::Vector, nullptr, &R::UYPB},
        {"PEA", ColKind::Vector, nullptr, &R::PEA},
        {"PEB", ColKind::Vector, nullptr, &R::PEB},
        {"XA", ColKind::Vector, nullptr, &R::XA},
        {"YB", ColKind::Vector, nullptr, &R::YB},
        {"X2A", ColKind::Scalar, &R::X2A, nullptr},
        {"Y2B", ColKind::Scalar, &R::Y2B, nullptr},
        {"XPAX2", ColKind::Scalar, &R::XPAX2, nullptr},
        {"YPBY2", ColKind::Scalar, &R::YPBY2, nullptr},
        {"X2EA", ColKind::Scalar, &R::X2EA, nullptr},
        {"Y2EB", ColKind::Scalar, &R::Y2EB, nullptr},
        {"XVA", ColKind::Scalar, &R::XVA, nullptr},
        {"YUB", ColKind::Scalar, &R::YUB, nullptr},
        {"XPEA", ColKind::Scalar, &R::XPEA, nullptr},
        {"YPEB", ColKind::Scalar, &R::YPEB, nullptr},
        {"V4A", ColKind::Scalar, &R::V4A, nullptr},
        {"U4B", ColKind::Scalar, &R::U4B, nullptr},
        {"X", ColKind::Vector, nullptr, &R::X},
        {"Y", ColKind::Vector, nullptr, &R::Y},
        {"X2", ColKind::Scalar, &R::X2, nullptr},
        {"sigma2", ColKind::Scalar, &R::sigma2, nullptr},
    };
    return specs;
}

} // namespace detail

/// Header row for the given dimension: vector columns expand to name_1..name_n
/// (plain name in one dimension).
inline std::string csv_header(int dim) {
    std::ostringstream os;
    os << 't';
    for (const auto& col : detail::column_specs()) {
        if (col.kind == detail::ColKind::Scalar || dim == 1) {
            os << ',' << col.name;
        } else {
            for (int a = 1; a <= dim; ++a) os << ',' << col.name << '_' << a;
        }
    }
    return os.str();
}

inline void write_csv_row(std::ostream& os, const AggregateRecord& r, int dim) {
    os << detail::format_double(r.t);
    auto put = [&os](const std::optional<double>& v) {
        os << ',';
        if (v) os << detail::format_double(*v);
    };
    for (const auto& col : detail::column_specs()) {
        if (col.kind == detail::ColKind::Scalar) {
            put(r.*(col.scalar));
        } else {
            const auto& v = r.*(col.vec);
            for (int a = 0; a < dim; ++a) {
                os << ',';
                if (v) {
                    if (static_cast<int>(v->size()) != dim)
                        throw std::invalid_argument(std::string("write_csv_row: ") +
                                                    col.name + " has wrong arity");
                    os << detail::format_double((*v)[static_cast<std::size_t>(a)]);
                }
            }
        }
    }
    os << '\n';
}

inline void write_csv(std::ostream& os, const AggregateSeries& series, int dim) {
    os << csv_header(dim) << '\n';
    for (const auto& r : series.records()) write_csv_row(os, r, dim);
}

inline void write_csv(const std::string& path, const AggregateSeries& series, int dim) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    write_csv(os, series, dim);
}

/// Column-oriented CSV read-back. Empty cells become NaN.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // one vector per column

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }

    const std::vector<double>& column(const std::string& name) const {
        const int i = index_of(name);
        if (i < 0)
            throw ConfigError("csv: no column named '" + name + "'");
        return data[static_cast<std::size_t>(i)];
    }
};

inline CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line) || line.empty())
        throw ConfigError("csv: missing header row");
    {
        std::istringstream ss(line);
        std::string name;
        while (std::getline(ss, name, ',')) table.columns.push_back(name);
    }
    table.data.assign(table.columns.size(), {});
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cells.size() != table.columns.size())
            throw ConfigError("csv: line " + std::to_string(lineno) + ": expected " +
                              std::to_string(table.columns.size()) + " cells, got " +
                              std::to_string(cells.size()));
        for (std::size_t col = 0; col < cells.size(); ++col) {
            const std::string& cell = cells[col];
            double v = std::numeric_limits<double>::quiet_NaN();
            if (!cell.empty()) {
                try {
                    std::size_t used = 0;
                    v = std::stod(cell, &used);
                    if (used != cell.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    throw ConfigError("csv: line " + std::to_string(lineno) +
                                      ": bad number '" + cell + "'");
                }
            }
            table.data[col].push_back(v);
        }
    }
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("csv: cannot open " + path);
    return read_csv(is);
}

} // namespace riskflow
