#pragma once

/// Linear constant-coefficient ODE systems y' = M y on the aggregates. Three
/// nested levels: A tracks totals (A, B, XPA, YPB, EA, EB); B appends the
/// first-moment block (XA, YB, PA, PB, XP, YP, XE, YE, PEA, PEB, VXPA, UYPB),
/// replicated per axis; C appends the second-moment block (X2A, Y2B, XPAX2,
/// YPBY2, X2EA, Y2EB, XPEA, YPEB, V4A, U4B, XVA, YUB). Assembly is
/// table-driven and every matrix entry keeps an audit record of which
/// coefficient produced it. Solutions come two ways: RK4 time stepping and a
/// closed form via eigendecomposition (matrix-exponential fallback when the
/// eigenbasis is unusable).

#include <cctype>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "riskflow/aggregates.hpp"
#include "riskflow/couplings.hpp"
#include "riskflow/errors.hpp"

namespace riskflow {

enum class SystemLevel { A, B, C, Combined };

inline const char* to_string(SystemLevel level) {
    switch (level) {
        case SystemLevel::A: return "A";
        case SystemLevel::B: return "B";
        case SystemLevel::C: return "C";
        default: return "combined";
    }
}

/// One matrix entry with its provenance: d/dt target += value * source,
/// where value came from the named coefficient ("a".."d_xv", "1", "2").
struct MatrixTerm {
    std::string target;
    std::string source;
    std::string coeff;
    double value = 0.0;
};

class LinearSystem {
public:
    LinearSystem(SystemLevel level, int axes, std::vector<std::string> labels,
                 Eigen::MatrixXd matrix, std::vector<MatrixTerm> terms,
                 CouplingSet couplings)
        : level_(level), axes_(axes), labels_(std::move(labels)),
          matrix_(std::move(matrix)), terms_(std::move(terms)),
          couplings_(couplings) {}

    SystemLevel level() const { return level_; }
    int axes() const { return axes_; }
    int dim() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const std::vector<MatrixTerm>& terms() const { return terms_; }
    const CouplingSet& couplings() const { return couplings_; }

    int index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return static_cast<int>(i);
        throw std::invalid_argument("LinearSystem: no state named '" + label + "'");
    }

    /// Human-readable equations, one per row, e.g. "d/dt XPA = 1*EA + c*YPB".
    std::string equations_text() const {
        std::ostringstream os;
        for (const auto& label : labels_) {
            os << "d/dt " << label << " =";
            bool any = false;
            for (const auto& t : terms_) {
                if (t.target != label) continue;
                os << (any ? " + " : " ") << t.coeff << '*' << t.source;
                any = true;
            }
            if (!any) os << " 0";
            os << '\n';
        }
        return os.str();
    }

private:
    SystemLevel level_;
    int axes_;
    std::vector<std::string> labels_;
    Eigen::MatrixXd matrix_;
    std::vector<MatrixTerm> terms_;
    CouplingSet couplings_;
};

namespace detail {

struct RowTermSpec {
    const char* source;
    const char* coeff;
};

struct RowSpec {
    const char* target;
    std::vector<RowTermSpec> terms;
};

inline const std::vector<RowSpec>& level_a_rows() {
    static const std::vector<RowSpec> rows = {
        {"A", {{"YPB", "a"}}},
        {"B", {{"XPA", "b"}}},
        {"XPA", {{"EA", "1"}, {"YPB", "c"}}},
        {"YPB", {{"EB", "1"}, {"XPA", "d"}}},
        {"EA", {{"EB", "c_e"}}},
        {"EB", {{"EA", "d_e"}}},
    };
    return rows;
}

/// Per-axis block; every source lives on the same axis as its target.
inline const std::vector<RowSpec>& level_b_rows() {
    static const std::vector<RowSpec> rows = {
        {"XA", {{"PA", "1"}, {"YP", "a"}}},
        {"YB", {{"PB", "1"}, {"XP", "b"}}},
        {"PA", {{"PB", "c"}}},
        {"PB", {{"PA", "d"}}},
        {"XP", {{"XE", "1"}, {"VXPA", "1"}, {"YP", "c"}}},
        {"YP", {{"YE", "1"}, {"UYPB", "1"}, {"XP", "d"}}},
        {"XE", {{"PEA", "1"}, {"YE", "c_e"}}},
        {"YE", {{"PEB", "1"}, {"XE", "d_e"}}},
        {"PEA", {{"PEB", "c_pe"}}},
        {"PEB", {{"PEA", "d_pe"}}},
        {"VXPA", {{"UYPB", "c_v"}}},
        {"UYPB", {{"VXPA", "d_v"}}},
    };
    return rows;
}

inline const std::vector<RowSpec>& level_c_rows() {
    static const std::vector<RowSpec> rows = {
        {"X2A", {{"XPA", "2"}, {"YPBY2", "a"}}},
        {"Y2B", {{"YPB", "2"}, {"XPAX2", "b"}}},
        {"XPAX2", {{"X2EA", "1"}, {"XVA", "2"}, {"YPBY2", "c"}}},
        {"YPBY2", {{"Y2EB", "1"}, {"YUB", "2"}, {"XPAX2", "d"}}},
        {"X2EA", {{"XPEA", "2"}, {"Y2EB", "c_e"}}},
        {"Y2EB", {{"YPEB", "2"}, {"X2EA", "d_e"}}},
        {"XPEA", {{"V4A", "1"}, {"YPEB", "c_pe"}}},
        {"YPEB", {{"U4B", "1"}, {"XPEA", "d_pe"}}},
        {"V4A", {{"U4B", "c_vu"}}},
        {"U4B", {{"V4A", "d_vu"}}},
        {"XVA", {{"YUB", "c_xv"}}},
        {"YUB", {{"XVA", "d_xv"}}},
    };
    return rows;
}

inline double coeff_value(const CouplingSet& k, const std::string& name) {
    if (name == "1") return 1.0;
    if (name == "2") return 2.0;
    if (name == "a") return k.a;
    if (name == "b") return k.b;
    if (name == "c") return k.c;
    if (name == "d") return k.d;
    if (name == "c_e") return k.c_e;
    if (name == "d_e") return k.d_e;
    if (name == "c_pe") return k.c_pe;
    if (name == "d_pe") return k.d_pe;
    if (name == "c_v") return k.c_v;
    if (name == "d_v") return k.d_v;
    if (name == "c_vu") return k.c_vu;
    if (name == "d_vu") return k.d_vu;
    if (name == "c_xv") return k.c_xv;
    if (name == "d_xv") return k.d_xv;
    throw std::logic_error("coeff_value: unknown coefficient " + name);
}

inline std::string axis_label(const std::string& base, int axis, int axes) {
    if (axes == 1) return base;
    return base + '_' + std::to_string(axis + 1);
}

} // namespace detail

/// Assemble the system matrix for a level. The coupling constraints gate the
/// build; pass allow_constraint_violations to study invalid regimes anyway.
inline LinearSystem build_system(const CouplingSet& k, SystemLevel level,
                                 int axes = 1,
                                 bool allow_constraint_violations = false) {
    if (axes < 1)
        throw std::invalid_argument("build_system: axes must be >= 1");
    if (!allow_constraint_violations) {
        const ConstraintReport rep = check_constraints(k);
        if (!rep.all_passed()) {
            std::string msg = "build_system: coupling constraints violated:";
            for (const auto& f : rep.failures()) msg += "\n  " + f;
            throw ConstraintError(msg);
        }
    }

    std::vector<std::string> labels;
    std::vector<std::pair<const detail::RowSpec*, int>> rows; // spec, axis (-1 scalar)
    auto add_scalar_block = [&](const std::vector<detail::RowSpec>& block) {
        for (const auto& row : block) {
            labels.push_back(row.target);
            rows.emplace_back(&row, -1);
        }
    };
    auto add_axis_block = [&](const std::vector<detail::RowSpec>& block) {
        for (const auto& row : block)
            for (int a = 0; a < axes; ++a) {
                labels.push_back(detail::axis_label(row.target, a, axes));
                rows.emplace_back(&row, a);
            }
    };

    add_scalar_block(detail::level_a_rows());
    if (level != SystemLevel::A) add_axis_block(detail::level_b_rows());
    if (level == SystemLevel::C || level == SystemLevel::Combined)
        add_scalar_block(detail::level_c_rows());

    const int dim = static_cast<int>(labels.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<MatrixTerm> terms;

    auto index_of = [&](const std::string& label) {
        for (int i = 0; i < dim; ++i)
            if (labels[static_cast<std::size_t>(i)] == label) return i;
        throw std::logic_error("build_system: dangling source label " + label);
    };

    for (int r = 0; r < dim; ++r) {
        const auto& [spec, axis] = rows[static_cast<std::size_t>(r)];
        for (const auto& term : spec->terms) {
            const std::string source = (axis < 0)
                ? std::string(term.source)
                : detail::axis_label(term.source, axis, axes);
            const int cidx = index_of(source);
            const double value = detail::coeff_value(k, term.coeff);
            M(r, cidx) += value;
            terms.push_back({labels[static_cast<std::size_t>(r)], source,
                             term.coeff, value});
        }
    }
    return LinearSystem(level, axes, std::move(labels), std::move(M),
                        std::move(terms), k);
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct OdeTrajectory {
    std::vector<double> times;
    Eigen::MatrixXd states; // one row per recorded sample
    bool truncated = false;
    long steps_completed = 0;
    std::string truncation_reason;
};

/// Spectral radius of the system matrix (largest |eigenvalue|).
inline double spectral_radius(const Eigen::MatrixXd& M) {
    return M.eigenvalues().cwiseAbs().maxCoeff();
}

/// Classical RK4 on y' = M y, recording every record_stride-th step (plus the
/// initial state). Requires dt * spectral_radius <= 0.1; blow-up past 1e250
/// or loss of finiteness truncates the trajectory with a report instead of
/// throwing.
inline OdeTrajectory integrate_ode(const LinearSystem& sys,
                                   const Eigen::VectorXd& y0, double dt,
                                   long steps, long record_stride = 1) {
    const Eigen::MatrixXd& M = sys.matrix();
    if (y0.size() != M.rows())
        throw std::invalid_argument("integrate_ode: initial state has size " +
                                    std::to_string(y0.size()) + ", system has " +
                                    std::to_string(M.rows()));
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_ode: dt must be positive");
    if (steps < 0) throw std::invalid_argument("integrate_ode: steps must be >= 0");
    if (record_stride < 1)
        throw std::invalid_argument("integrate_ode: record_stride must be >= 1");
    const double rho = spectral_radius(M);
    if (!(dt * rho <= 0.1)) {
        std::ostringstream os;
        os << "integrate_ode: dt too large: dt * spectral_radius = " << dt * rho
           << " > 0.1 (dt = " << dt << ", spectral radius = " << rho << ")";
        throw NumericalError(os.str());
    }

    OdeTrajectory out;
    const long samples = steps / record_stride + 1;
    out.states.resize(samples, M.rows());
    out.times.reserve(static_cast<std::size_t>(samples));

    Eigen::VectorXd y = y0, k1(y.size()), k2(y.size()), k3(y.size()),
                    k4(y.size()), tmp(y.size());
    long row = 0;
    out.states.row(row) = y.transpose();
    out.times.push_back(0.0);
    ++row;

    constexpr double blowup = 1e250;
    for (long s = 1; s <= steps; ++s) {
        k1.noalias() = M * y;
        tmp = y + (0.5 * dt) * k1;
        k2.noalias() = M * tmp;
        tmp = y + (0.5 * dt) * k2;
        k3.noalias() = M * tmp;
        tmp = y + dt * k3;
        k4.noalias() = M * tmp;
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > blowup) {
            out.truncated = true;
            std::ostringstream os;
            os << "state magnitude left [" << -blowup << ", " << blowup
               << "] at step " << s << " (t = " << static_cast<double>(s) * dt << ")";
            out.truncation_reason = os.str();
            break;
        }
        out.steps_completed = s;
        if (s % record_stride == 0) {
            out.states.row(row) = y.transpose();
            out.times.push_back(static_cast<double>(s) * dt);
            ++row;
        }
    }
    out.states.conservativeResize(row, Eigen::NoChange);
    return out;
}

// ---------------------------------------------------------------------------
// Closed form
// ---------------------------------------------------------------------------

/// y(t) = V exp(Lambda t) V^-1 y0 via dense eigendecomposition. When the
/// computed eigenbasis fails validation (non-finite, ill-conditioned, or poor
/// reconstruction: defective matrices under the constraint override), the
/// evaluator falls back to scaling-and-squaring matrix exponentials.
class ClosedFormSolution {
public:
    ClosedFormSolution(const LinearSystem& sys, const Eigen::VectorXd& y0)
        : M_(sys.matrix()), y0_(y0) {
        if (y0.size() != M_.rows())
            throw std::invalid_argument("closed_form: initial state size mismatch");
        Eigen::EigenSolver<Eigen::MatrixXd> es(M_);
        bool ok = es.info() == Eigen::Success;
        if (ok) {
            lambda_ = es.eigenvalues();
            V_ = es.eigenvectors();
            ok = lambda_.allFinite() && V_.allFinite();
        }
        if (ok) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V_);
            const double smin = svd.singularValues().minCoeff();
            const double smax = svd.singularValues().maxCoeff();
            condition_ = (smin > 0.0) ? smax / smin
                                      : std::numeric_limits<double>::infinity();
            ok = condition_ < 1e8;
        }
        if (ok) {
            w_ = V_.partialPivLu().solve(y0.cast<std::complex<double>>());
            const double denom = std::max(1.0, y0.norm());
            reconstruction_error_ = (V_ * w_ - y0.cast<std::complex<double>>()).norm() / denom;
            const double mscale = std::max(1.0, M_.norm());
            const double eigres =
                (M_.cast<std::complex<double>>() * V_ - V_ * lambda_.asDiagonal()).norm() / mscale;
            ok = reconstruction_error_ < 1e-10 && eigres < 1e-9;
        }
        fallback_ = !ok;
    }

    bool used_fallback() const { return fallback_; }
    double eigenbasis_condition() const { return condition_; }
    double reconstruction_error() const { return reconstruction_error_; }

    Eigen::VectorXd at(double t) const {
        if (!fallback_) {
            Eigen::VectorXcd phase =
                (lambda_.array() * t).exp().matrix().cwiseProduct(w_);
            return (V_ * phase).real();
        }
        Eigen::MatrixXd E = (M_ * t).exp();
        return E * y0_;
    }

    /// States at t0 + i*dt for i in [0, count). In fallback mode one matrix
    /// exponential per spacing is reused across the whole grid.
    Eigen::MatrixXd trajectory(double t0, double dt, long count) const {
        Eigen::MatrixXd out(count, M_.rows());
        if (count <= 0) return out;
        if (!fallback_) {
            for (long i = 0; i < count; ++i)
                out.row(i) = at(t0 + static_cast<double>(i) * dt).transpose();
            return out;
        }
        Eigen::VectorXd y = at(t0);
        const Eigen::MatrixXd E = (M_ * dt).exp();
        out.row(0) = y.transpose();
        for (long i = 1; i < count; ++i) {
            y = E * y;
            out.row(i) = y.transpose();
        }
        return out;
    }

private:
    Eigen::MatrixXd M_;
    Eigen::VectorXd y0_;
    Eigen::VectorXcd lambda_;
    Eigen::MatrixXcd V_;
    Eigen::VectorXcd w_;
    bool fallback_ = true;
    double condition_ = std::numeric_limits<double>::infinity();
    double reconstruction_error_ = std::numeric_limits<double>::infinity();
};

inline ClosedFormSolution closed_form(const LinearSystem& sys, const Eigen::VectorXd& y0) {
    return ClosedFormSolution(sys, y0);
}

/// Closed-form state at one instant.
inline Eigen::VectorXd closed_form(const LinearSystem& sys, const Eigen::VectorXd& y0,
                                   double t) {
    return ClosedFormSolution(sys, y0).at(t);
}

// ---------------------------------------------------------------------------
// Mode analysis
// ---------------------------------------------------------------------------

struct ModeMatch {
    std::string name;
    std::complex<double> expected;
    double distance = 0.0; // to the nearest computed eigenvalue
    bool matched = false;
};

struct ModeSet {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<ModeMatch> matches;

    bool all_matched() const {
        for (const auto& m : matches)
            if (!m.matched) return false;
        return true;
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(12);
        os << "eigenvalues:";
        for (const auto& ev : eigenvalues)
            os << ' ' << ev.real() << (ev.imag() < 0 ? "-" : "+")
               << std::abs(ev.imag()) << 'i';
        os << '\n';
        for (const auto& m : matches)
            os << (m.matched ? "match " : "MISS  ") << m.name << " expected ("
               << m.expected.real() << ", " << m.expected.imag()
               << "i), nearest eigenvalue at distance " << m.distance << '\n';
        return os.str();
    }
};

/// Computed spectrum plus the theoretical mode values the level should carry,
/// each matched against the nearest eigenvalue within tol.
inline ModeSet modes(const LinearSystem& sys, double tol = 1e-9) {
    ModeSet out;
    const Eigen::VectorXcd ev = sys.matrix().eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.eigenvalues.push_back(ev(i));

    const CouplingSet& k = sys.couplings();
    auto add_pair = [&](const std::string& name, std::complex<double> value) {
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) return;
        for (const auto sign : {+1.0, -1.0}) {
            ModeMatch m;
            m.name = (sign > 0 ? "+" : "-") + name;
            m.expected = sign * value;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : out.eigenvalues)
                best = std::min(best, std::abs(e - m.expected));
            m.distance = best;
            m.matched = best <= tol * std::max(1.0, std::abs(m.expected));
            out.matches.push_back(std::move(m));
        }
    };
    add_pair("i*omega", {0.0, k.omega()});
    add_pair("gamma_e", {k.gamma_e(), 0.0});
    if (sys.level() != SystemLevel::A) {
        add_pair("i*omega_pe", {0.0, k.omega_pe()});
        add_pair("i*omega_v", {0.0, k.omega_v()});
    }
    if (sys.level() == SystemLevel::C || sys.level() == SystemLevel::Combined) {
        add_pair("gamma_vu", {k.gamma_vu(), 0.0});
        add_pair("gamma_xv", {k.gamma_xv(), 0.0});
    }
    return out;
}

/// Coefficients (constant, cos wt, sin wt, e^{+g t}, e^{-g t}) of one level-A
/// component, determined from the initial values by matching derivatives at
/// t = 0 (the m-th derivative of the component is (M^m y0) at its index).
inline Eigen::VectorXd level_a_component_constants(const LinearSystem& sys,
                                                   const Eigen::VectorXd& y0,
                                                   const std::string& label) {
    if (sys.level() != SystemLevel::A)
        throw std::invalid_argument("level_a_component_constants: level-A system required");
    const double w = sys.couplings().omega();
    const double g = sys.couplings().gamma_e();
    if (!std::isfinite(w) || !std::isfinite(g) || w == 0.0 || g == 0.0)
        throw std::invalid_argument(
            "level_a_component_constants: omega and gamma_e must be defined and nonzero");
    const int idx = sys.index_of(label);
    const Eigen::MatrixXd& M = sys.matrix();

    Eigen::VectorXd rhs(5);
    Eigen::VectorXd v = y0;
    rhs(0) = v(idx);
    for (int m = 1; m <= 4; ++m) {
        v = M * v;
        rhs(m) = v(idx);
    }
    Eigen::MatrixXd D(5, 5);
    // columns: 1, cos, sin, e^{+g}, e^{-g}; rows: derivative order 0..4
    D << 1, 1, 0, 1, 1,
         0, 0, w, g, -g,
         0, -w * w, 0, g * g, g * g,
         0, 0, -w * w * w, g * g * g, -g * g * g,
         0, w * w * w * w, 0, g * g * g * g, g * g * g * g;
    return D.fullPivLu().solve(rhs);
}

// ---------------------------------------------------------------------------
// Record <-> state vector mapping
// ---------------------------------------------------------------------------

namespace detail {

struct LabelRef {
    std::string base;
    int axis = 0;
};

inline LabelRef split_label(const std::string& label) {
    const std::size_t us = label.rfind('_');
    if (us != std::string::npos && us + 1 < label.size()) {
        bool digits = true;
        for (std::size_t i = us + 1; i < label.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(label[i]))) digits = false;
        if (digits)
            return {label.substr(0, us), std::stoi(label.substr(us + 1)) - 1};
    }
    return {label, 0};
}

inline std::optional<double> AggregateRecord::* scalar_member(const std::string& base) {
    using R = AggregateRecord;
    if (base == "A") return &R::A;
    if (base == "B") return &R::B;
    if (base == "XPA") return &R::XPA;
    if (base == "YPB") return &R::YPB;
    if (base == "EA") return &R::EA;
    if (base == "EB") return &R::EB;
    if (base == "X2A") return &R::X2A;
    if (base == "Y2B") return &R::Y2B;
    if (base == "XPAX2") return &R::XPAX2;
    if (base == "YPBY2") return &R::YPBY2;
    if (base == "X2EA") return &R::X2EA;
    if (base == "Y2EB") return &R::Y2EB;
    if (base == "XPEA") return &R::XPEA;
    if (base == "YPEB") return &R::YPEB;
    if (base == "V4A") return &R::V4A;
    if (base == "U4B") return &R::U4B;
    if (base == "XVA") return &R::XVA;
    if (base == "YUB") return &R::YUB;
    return nullptr;
}

inline std::optional<std::vector<double>> AggregateRecord::* vector_member(const std::string& base) {
    using R = AggregateRecord;
    if (base == "XA") return &R::XA;
    if (base == "YB") return &R::YB;
    if (base == "PA") return &R::PA;
    if (base == "PB") return &R::PB;
    if (base == "XP") return &R::XP;
    if (base == "YP") return &R::YP;
    if (base == "XE") return &R::XE;
    if (base == "YE") return &R::YE;
    if (base == "PEA") return &R::PEA;
    if (base == "PEB") return &R::PEB;
    if (base == "VXPA") return &R::VXPA;
    if (base == "UYPB") return &R::UYPB;
    return nullptr;
}

} // namespace detail

/// Pull the system's state vector out of a record; every tracked label must
/// be present.
inline Eigen::VectorXd state_vector(const LinearSystem& sys, const AggregateRecord& r) {
    Eigen::VectorXd y(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) {
        const auto ref = detail::split_label(sys.labels()[static_cast<std::size_t>(i)]);
        if (auto sm = detail::scalar_member(ref.base)) {
            const auto& v = r.*sm;
            if (!v)
                throw std::invalid_argument("state_vector: record lacks " + ref.base);
            y(i) = *v;
            continue;
        }
        if (auto vm = detail::vector_member(ref.base)) {
            const auto& v = r.*vm;
            if (!v || ref.axis >= static_cast<int>(v->size()))
                throw std::invalid_argument("state_vector: record lacks " + ref.base);
            y(i) = (*v)[static_cast<std::size_t>(ref.axis)];
            continue;
        }
        throw std::logic_error("state_vector: unmapped label " +
                               sys.labels()[static_cast<std::size_t>(i)]);
    }
    return y;
}

/// Build a record from an ODE state: tracked labels become present entries,
/// everything else stays absent; mean risks are derived where possible.
inline AggregateRecord record_from_state(const LinearSystem& sys, double t,
                                         const Eigen::VectorXd& y) {
    if (y.size() != sys.dim())
        throw std::invalid_argument("record_from_state: state size mismatch");
    AggregateRecord r;
    r.t = t;
    for (int i = 0; i < sys.dim(); ++i) {
        const auto ref = detail::split_label(sys.labels()[static_cast<std::size_t>(i)]);
        if (auto sm = detail::scalar_member(ref.base)) {
            r.*sm = y(i);
            continue;
        }
        if (auto vm = detail::vector_member(ref.base)) {
            auto& v = r.*vm;
            if (!v) v = std::vector<double>(static_cast<std::size_t>(sys.axes()), 0.0);
            (*v)[static_cast<std::size_t>(ref.axis)] = y(i);
            continue;
        }
        throw std::logic_error("record_from_state: unmapped label " +
                               sys.labels()[static_cast<std::size_t>(i)]);
    }
    derive_mean_risks(r);
    return r;
}

} // namespace riskflow
