#pragma once

/// Trajectory analysis: project a sampled aggregate onto a harmonic plus
/// exponential basis (how closely does a run follow its closed-form shape),
/// estimate a growth rate by log-linear regression, and locate oscillation
/// frequencies in a detrended power spectrum. The spectrum pipeline is
/// detrend (constant + one exponential, rate refined by a line search),
/// Welch-averaged Hann-windowed periodogram for power and peak picking, and
/// a long zero-padded transform for sub-bin frequency refinement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "riskflow/errors.hpp"
#include "riskflow/num_format.hpp"

namespace riskflow {

struct ModeFit {
    std::vector<std::string> basis;    // human-readable basis function names
    std::vector<double> coefficients;  // one per basis function
    double residual = 0.0;             // ||series - fit||_2 / ||series||_2
    double condition = 0.0;            // of the column-normalized design matrix
    bool conditioning_warning = false; // condition too high to trust coefficients
};

/// Least-squares fit of a sampled series (samples at t0 + i*dt) onto
/// {1} + {cos(w t), sin(w t)} per angular frequency + {e^{r t}} per rate.
/// Frequencies must be positive and pairwise distinct, rates nonzero and
/// pairwise distinct; the sample count must be at least twice the basis size.
inline ModeFit fit_modes(const std::vector<double>& series, double t0, double dt,
                         const std::vector<double>& angular_frequencies,
                         const std::vector<double>& rates) {
    if (!(dt > 0.0)) throw std::invalid_argument("fit_modes: dt must be positive");
    for (std::size_t i = 0; i < angular_frequencies.size(); ++i) {
        if (!(angular_frequencies[i] > 0.0))
            throw std::invalid_argument("fit_modes: frequencies must be positive");
        for (std::size_t j = i + 1; j < angular_frequencies.size(); ++j)
            if (std::fabs(angular_frequencies[i] - angular_frequencies[j]) <=
                1e-9 * std::max(1.0, std::fabs(angular_frequencies[i])))
                throw std::invalid_argument("fit_modes: duplicate frequency " +
                                            detail::format_double(angular_frequencies[i]));
    }
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] == 0.0)
            throw std::invalid_argument("fit_modes: rates must be nonzero");
        for (std::size_t j = i + 1; j < rates.size(); ++j)
            if (std::fabs(rates[i] - rates[j]) <=
                1e-9 * std::max(1.0, std::fabs(rates[i])))
                throw std::invalid_argument("fit_modes: duplicate rate " +
                                            detail::format_double(rates[i]));
    }
    const std::size_t m = 1 + 2 * angular_frequencies.size() + rates.size();
    const std::size_t n = series.size();
    if (n < 2 * m)
        throw std::invalid_argument("fit_modes: need at least " + std::to_string(2 * m) +
                                    " samples for a basis of " + std::to_string(m) +
                                    ", got " + std::to_string(n));

    ModeFit out;
    out.basis.push_back("1");
    for (double w : angular_frequencies) {
        out.basis.push_back("cos(" + detail::format_double(w) + "t)");
        out.basis.push_back("sin(" + detail::format_double(w) + "t)");
    }
    for (double r : rates)
        out.basis.push_back("exp(" + detail::format_double(r) + "t)");

    Eigen::MatrixXd X(n, m);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        std::size_t c = 0;
        X(i, c++) = 1.0;
        for (double w : angular_frequencies) {
            X(i, c++) = std::cos(w * t);
            X(i, c++) = std::sin(w * t);
        }
        for (double r : rates) X(i, c++) = std::exp(r * t);
        y(i) = series[i];
    }

    Eigen::VectorXd col_norm(m);
    for (std::size_t c = 0; c < m; ++c) {
        col_norm(c) = X.col(c).norm();
        if (!(col_norm(c) > 0.0) || !std::isfinite(col_norm(c)))
            throw std::invalid_argument("fit_modes: degenerate basis column " + out.basis[c]);
        X.col(c) /= col_norm(c);
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    out.condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    out.conditioning_warning = !(out.condition < 1e8);

    const Eigen::VectorXd beta = svd.solve(y);
    const double ynorm = y.norm();
    out.residual = (ynorm > 0.0) ? (X * beta - y).norm() / ynorm : 0.0;
    out.coefficients.resize(m);
    for (std::size_t c = 0; c < m; ++c) out.coefficients[c] = beta(c) / col_norm(c);
    return out;
}

/// Exponential growth rate of the trailing half of a uniformly sampled
/// series: the least-squares slope of log(series) against time. Refuses when
/// the trailing half contains non-positive samples (no exponential regime).
inline double growth_rate(const std::vector<double>& series, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("growth_rate: dt must be positive");
    if (series.size() < 4)
        throw std::invalid_argument("growth_rate: need at least 4 samples");
    const std::size_t begin = series.size() / 2;
    for (std::size_t i = begin; i < series.size(); ++i)
        if (!(series[i] > 0.0))
            throw NumericalError("growth_rate: sample " + std::to_string(i) +
                                 " in the trailing half is not positive (" +
                                 detail::format_double(series[i]) + ")");
    const std::size_t n = series.size() - begin;
    double tbar = 0.0, lbar = 0.0;
    for (std::size_t i = begin; i < series.size(); ++i) {
        tbar += static_cast<double>(i) * dt;
        lbar += std::log(series[i]);
    }
    tbar /= static_cast<double>(n);
    lbar /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = begin; i < series.size(); ++i) {
        const double tc = static_cast<double>(i) * dt - tbar;
        num += tc * (std::log(series[i]) - lbar);
        den += tc * tc;
    }
    return num / den;
}

struct SpectralPeak {
    double frequency = 0.0; // cycles per unit time, refined
    double power = 0.0;     // averaged periodogram value at the coarse bin
};

struct Spectrum {
    std::vector<double> frequency; // Welch bin centers, cycles per unit time
    std::vector<double> power;     // Welch-averaged periodogram
    std::vector<SpectralPeak> peaks; // local maxima, sorted by power desc
    double detrend_rate = 0.0;     // exponential rate removed before analysis
};

namespace detail {

/// Sum of squared residuals of the best {1, e^{g t}} fit to the series.
inline double exp_trend_ssr(const std::vector<double>& y, double dt, double g) {
    const std::size_t n = y.size();
    // column-normalized 2x2 normal equations
    double emax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        emax = std::max(emax, std::exp(g * static_cast<double>(i) * dt));
    if (!std::isfinite(emax) || emax == 0.0) return std::numeric_limits<double>::infinity();
    double see = 0.0, s1e = 0.0, sye = 0.0, sy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(g * static_cast<double>(i) * dt) / emax;
        see += e * e;
        s1e += e;
        sye += y[i] * e;
        sy += y[i];
        syy += y[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * see - s1e * s1e;
    if (!(std::fabs(det) > 1e-300)) return std::numeric_limits<double>::infinity();
    const double beta_e = (nn * sye - s1e * sy) / det;
    const double beta_1 = (sy * see - s1e * sye) / det;
    // SSR = ||y||^2 - 2 b.X'y + b.X'X b
    return syy - 2.0 * (beta_1 * sy + beta_e * sye) +
           (beta_1 * beta_1 * nn + 2.0 * beta_1 * beta_e * s1e + beta_e * beta_e * see);
}

/// Golden-section minimizer of exp_trend_ssr over [lo, hi].
inline double refine_trend_rate(const std::vector<double>& y, double dt,
                                double lo, double hi) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = exp_trend_ssr(y, dt, x1), f2 = exp_trend_ssr(y, dt, x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::fabs(a)); ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a);
            f1 = exp_trend_ssr(y, dt, x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a);
            f2 = exp_trend_ssr(y, dt, x2);
        }
    }
    return 0.5 * (a + b);
}

/// Subtract the best constant + e^{g t} trend in place.
inline void subtract_exp_trend(std::vector<double>& y, double dt, double g) {
    const std::size_t n = y.size();
    double emax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        emax = std::max(emax, std::exp(g * static_cast<double>(i) * dt));
    double see = 0.0, s1e = 0.0, sye = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(g * static_cast<double>(i) * dt) / emax;
        see += e * e;
        s1e += e;
        sye += y[i] * e;
        sy += y[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * see - s1e * s1e;
    if (!(std::fabs(det) > 1e-300)) return;
    const double beta_e = (nn * sye - s1e * sy) / det;
    const double beta_1 = (sy * see - s1e * sye) / det;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(g * static_cast<double>(i) * dt) / emax;
        y[i] -= beta_1 + beta_e * e;
    }
}

inline std::size_t floor_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p * 2 <= n) p *= 2;
    return p;
}

} // namespace detail

/// Power spectrum of a uniformly sampled series (needs >= 64 samples).
/// A constant plus single-exponential trend is removed first, so pure trends
/// yield no peaks and an oscillation around a growing baseline is exposed;
/// the removed rate is seeded by growth_rate and refined by a line search.
/// Powers come from a Hann-windowed Welch average (robust against spurious
/// single-bin excursions); peak frequencies are refined on a zero-padded
/// full-length transform with three-point parabolic interpolation.
inline Spectrum spectrum(const std::vector<double>& series, double dt,
                         std::size_t max_peaks = 8) {
    if (!(dt > 0.0)) throw std::invalid_argument("spectrum: dt must be positive");
    const std::size_t n = series.size();
    if (n < 64)
        throw std::invalid_argument("spectrum: need at least 64 samples, got " +
                                    std::to_string(n));
    Spectrum out;

    // detrend: estimate the exponential rate (sign-aware), refine, subtract
    std::vector<double> d = series;
    {
        double g0 = 0.0;
        bool all_pos = true, all_neg = true;
        for (std::size_t i = n / 2; i < n; ++i) {
            all_pos = all_pos && series[i] > 0.0;
            all_neg = all_neg && series[i] < 0.0;
        }
        if (all_pos) {
            g0 = growth_rate(series, dt);
        } else if (all_neg) {
            std::vector<double> neg(series.size());
            for (std::size_t i = 0; i < n; ++i) neg[i] = -series[i];
            g0 = growth_rate(neg, dt);
        }
        const double span = static_cast<double>(n - 1) * dt;
        if (std::fabs(g0) * span > 1e-8) {
            const double half = 0.5 * std::fabs(g0) + 0.5 / span;
            const double g = detail::refine_trend_rate(d, dt, g0 - half, g0 + half);
            out.detrend_rate = (detail::exp_trend_ssr(d, dt, g) <
                                detail::exp_trend_ssr(d, dt, g0)) ? g : g0;
            detail::subtract_exp_trend(d, dt, out.detrend_rate);
        } else {
            double mean = 0.0;
            for (double v : d) mean += v;
            mean /= static_cast<double>(n);
            for (double& v : d) v -= mean;
        }
    }

    // Welch-averaged periodogram
    const std::size_t ns = std::min<std::size_t>(
        2048, std::max<std::size_t>(32, detail::floor_pow2(n / 8)));
    const std::size_t hop = ns / 2;
    std::vector<double> window(ns);
    double wpow = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                          static_cast<double>(ns - 1)));
        wpow += window[i] * window[i];
    }
    const std::size_t half = ns / 2;
    out.frequency.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k)
        out.frequency[k] = static_cast<double>(k) / (static_cast<double>(ns) * dt);
    out.power.assign(half + 1, 0.0);

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> freq;
    std::vector<double> seg(ns);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + ns <= n; start += hop) {
        for (std::size_t i = 0; i < ns; ++i) seg[i] = d[start + i] * window[i];
        fft.fwd(freq, seg);
        for (std::size_t k = 0; k <= half; ++k)
            out.power[k] += std::norm(freq[k]) / wpow;
        ++segments;
        if (start + ns == n) break;
    }
    for (double& p : out.power) p /= static_cast<double>(segments);

    // coarse peaks: interior local maxima, by power
    std::vector<std::size_t> candidates;
    for (std::size_t k = 1; k + 1 <= half && k + 1 < out.power.size(); ++k)
        if (out.power[k] >= out.power[k - 1] && out.power[k] >= out.power[k + 1] &&
            out.power[k] > 0.0)
            candidates.push_back(k);
    std::sort(candidates.begin(), candidates.end(),
              [&](std::size_t a, std::size_t b) { return out.power[a] > out.power[b]; });
    if (candidates.size() > max_peaks) candidates.resize(max_peaks);

    if (!candidates.empty()) {
        // long zero-padded transform of the full windowed series
        const std::size_t npad = 4 * 2 * detail::floor_pow2(std::max<std::size_t>(1, n - 1));
        std::vector<double> padded(npad, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                                   static_cast<double>(n - 1)));
            padded[i] = d[i] * w;
        }
        std::vector<std::complex<double>> fine;
        fft.fwd(fine, padded);
        const double fine_df = 1.0 / (static_cast<double>(npad) * dt);
        const double coarse_df = out.frequency[1];
        for (std::size_t k : candidates) {
            const double f0 = out.frequency[k];
            const long lo = std::max(1L, static_cast<long>((f0 - coarse_df) / fine_df));
            const long hi = std::min(static_cast<long>(npad / 2 - 1),
                                     static_cast<long>((f0 + coarse_df) / fine_df) + 1);
            long best = lo;
            double best_p = -1.0;
            for (long j = lo; j <= hi; ++j) {
                const double p = std::norm(fine[static_cast<std::size_t>(j)]);
                if (p > best_p) { best_p = p; best = j; }
            }
            double delta = 0.0;
            if (best > lo && best < hi && best_p > 0.0) {
                const double eps_floor = 1e-300;
                const double lp = std::log(std::norm(fine[static_cast<std::size_t>(best - 1)]) + eps_floor);
                const double cp = std::log(best_p + eps_floor);
                const double rp = std::log(std::norm(fine[static_cast<std::size_t>(best + 1)]) + eps_floor);
                const double denom = lp - 2.0 * cp + rp;
                if (denom < 0.0) delta = std::clamp(0.5 * (lp - rp) / denom, -0.5, 0.5);
            }
            SpectralPeak pk;
            pk.frequency = (static_cast<double>(best) + delta) * fine_df;
            pk.power = out.power[k];
            out.peaks.push_back(pk);
        }
    }
    return out;
}

} // namespace riskflow
