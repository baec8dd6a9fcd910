#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gelpad/linalg.hpp"
#include "gelpad/tracker.hpp"

namespace gelpad {

class AssayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct VelocitySummary {
    std::vector<double> perWormMeans;  // um/s
    double populationMean = 0.0;
    // Sample standard deviation; 0 when n == 1 (see stdDefined).
    double populationStd = 0.0;
    bool stdDefined = false;
    int n = 0;
};

inline VelocitySummary summarize_means(std::vector<double> perWormMeans) {
    if (perWormMeans.empty()) throw AssayError("summarize: no worms");
    VelocitySummary s;
    s.n = static_cast<int>(perWormMeans.size());
    double sum = 0.0;
    for (double v : perWormMeans) sum += v;
    s.populationMean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : perWormMeans) ss += (v - s.populationMean) * (v - s.populationMean);
        s.populationStd = std::sqrt(ss / (s.n - 1));
        s.stdDefined = true;
    }
    s.perWormMeans = std::move(perWormMeans);
    return s;
}

// Per-worm mean of instantaneous velocities (um/s), then population statistics.
inline VelocitySummary summarize_velocities(std::span<const TrackedWorm> worms) {
    if (worms.empty()) throw AssayError("summarize: empty track list");
    std::vector<double> means;
    for (const auto& w : worms) {
        if (w.track.points.size() < 2 || !w.velocity.meanUmPerS) {
            throw AssayError("summarize: track " + std::to_string(w.track.id) +
                             " has fewer than 2 points");
        }
        means.push_back(*w.velocity.meanUmPerS);
    }
    return summarize_means(std::move(means));
}

inline double percent_response(const VelocitySummary& dose, const VelocitySummary& control) {
    if (!(control.populationMean > 0.0)) {
        throw AssayError("percent_response: control mean velocity must be > 0");
    }
    return 100.0 * dose.populationMean / control.populationMean;
}

struct DosePoint {
    double concentration = 0.0;  // uM, 0 = control
    double percentResponse = 0.0;
};

struct HillFit {
    double ec50 = 0.0;
    double hillSlope = 1.0;
    double top = 100.0;
    double bottom = 0.0;
    double sse = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> sseTrace;  // SSE after each accepted step, starting at the initial guess
    std::string warning;
};

// Four-parameter logistic, decreasing from `top` at c = 0 to `bottom`.
inline double hill_model(double top, double bottom, double ec50, double slope, double c) {
    if (c <= 0.0) return top;
    return bottom + (top - bottom) / (1.0 + std::pow(c / ec50, slope));
}

inline double hill_model(const HillFit& f, double c) {
    return hill_model(f.top, f.bottom, f.ec50, f.hillSlope, c);
}

namespace detail {

struct HillParams {
    double top, bottom, logEc50, logSlope;
};

inline double hill_sse(std::span<const DosePoint> pts, const HillParams& p) {
    const double ec50 = std::exp(p.logEc50);
    const double h = std::exp(p.logSlope);
    double sse = 0.0;
    for (const auto& d : pts) {
        const double r = hill_model(p.top, p.bottom, ec50, h, d.concentration) - d.percentResponse;
        sse += r * r;
    }
    return sse;
}

}  // namespace detail

// Damped Gauss-Newton (Levenberg-Marquardt) on (top, bottom, log ec50, log h).
inline HillFit fit_hill(std::span<const DosePoint> points,
                        const std::optional<HillFit>& init = std::nullopt) {
    if (points.size() < 4) throw AssayError("fit_hill: need at least 4 dose points");
    std::set<double> nonzero;
    for (const auto& p : points) {
        if (!(p.concentration >= 0.0) || !std::isfinite(p.concentration)) {
            throw AssayError("fit_hill: concentrations must be finite and >= 0");
        }
        if (!(p.percentResponse >= 0.0) || !std::isfinite(p.percentResponse)) {
            throw AssayError("fit_hill: responses must be finite and >= 0");
        }
        if (p.concentration > 0.0) nonzero.insert(p.concentration);
    }
    if (nonzero.size() < 3) {
        throw AssayError("fit_hill: need at least 3 distinct nonzero concentrations");
    }

    // Sort so the fit does not depend on input order.
    std::vector<DosePoint> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const DosePoint& a, const DosePoint& b) {
        if (a.concentration != b.concentration) return a.concentration < b.concentration;
        return a.percentResponse < b.percentResponse;
    });

    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.percentResponse < b.percentResponse;
    });
    HillFit fit;
    if (lo->percentResponse == hi->percentResponse) {
        fit.top = fit.bottom = lo->percentResponse;
        fit.ec50 = *nonzero.begin();
        fit.converged = false;
        fit.warning = "flat response: ec50 unidentifiable";
        return fit;
    }

    detail::HillParams p{};
    if (init) {
        if (!(init->ec50 > 0.0) || !(init->hillSlope > 0.0)) {
            throw AssayError("fit_hill: initial ec50 and slope must be > 0");
        }
        p = {init->top, init->bottom, std::log(init->ec50), std::log(init->hillSlope)};
    } else {
        const double top = hi->percentResponse;
        const double bottom = lo->percentResponse;
        const double mid = 0.5 * (top + bottom);
        double ec50 = *nonzero.begin();
        double bestGap = INFINITY;
        for (const auto& d : pts) {
            if (d.concentration <= 0.0) continue;
            const double gap = std::abs(d.percentResponse - mid);
            if (gap < bestGap) {
                bestGap = gap;
                ec50 = d.concentration;
            }
        }
        p = {top, bottom, std::log(ec50), 0.0};
    }

    double sse = detail::hill_sse(pts, p);
    fit.sseTrace.push_back(sse);
    double lambda = 1e-3;
    constexpr int kMaxIters = 200;
    int it = 0;
    for (; it < kMaxIters && !fit.converged; ++it) {
        const double h = std::exp(p.logSlope);
        linalg::Mat<4> jtj{};
        linalg::Vec<4> jtr{};
        for (const auto& d : pts) {
            std::array<double, 4> jac{1.0, 0.0, 0.0, 0.0};
            double model = p.top;
            if (d.concentration > 0.0) {
                const double logRatio = std::log(d.concentration) - p.logEc50;
                const double u = std::exp(h * logRatio);
                const double den = 1.0 + u;
                const double span = p.top - p.bottom;
                model = p.bottom + span / den;
                jac = {1.0 / den, u / den, span * h * u / (den * den),
                       -span * h * logRatio * u / (den * den)};
            }
            const double r = model - d.percentResponse;
            for (int a = 0; a < 4; ++a) {
                jtr[a] += jac[a] * r;
                for (int b = 0; b < 4; ++b) jtj[a][b] += jac[a] * jac[b];
            }
        }

        bool accepted = false;
        while (!accepted && lambda < 1e16) {
            linalg::Mat<4> damped = jtj;
            for (int a = 0; a < 4; ++a) damped[a][a] += lambda * std::max(jtj[a][a], 1e-12);
            linalg::Vec<4> rhs{-jtr[0], -jtr[1], -jtr[2], -jtr[3]};
            const auto step = linalg::solve<4>(damped, rhs);
            if (!step) {
                lambda *= 10.0;
                continue;
            }
            const double stepNorm = std::sqrt((*step)[0] * (*step)[0] + (*step)[1] * (*step)[1] +
                                              (*step)[2] * (*step)[2] + (*step)[3] * (*step)[3]);
            detail::HillParams trial{p.top + (*step)[0], p.bottom + (*step)[1],
                                     p.logEc50 + (*step)[2], p.logSlope + (*step)[3]};
            const double trialSse = detail::hill_sse(pts, trial);
            if (std::isfinite(trialSse) && trialSse < sse) {
                const double rel = (sse - trialSse) / std::max(sse, 1e-300);
                p = trial;
                sse = trialSse;
                fit.sseTrace.push_back(sse);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (rel < 1e-9 || stepNorm < 1e-8) fit.converged = true;
            } else {
                if (stepNorm < 1e-8) {
                    fit.converged = true;
                    break;
                }
                lambda *= 10.0;
            }
        }
        if (!accepted && !fit.converged) {
            // No descent direction left at any damping: a stationary point.
            fit.converged = true;
        }
    }

    fit.top = p.top;
    fit.bottom = p.bottom;
    fit.ec50 = std::exp(p.logEc50);
    fit.hillSlope = std::exp(p.logSlope);
    fit.sse = sse;
    fit.iterations = it;
    const double cmin = *nonzero.begin();
    const double cmax = *nonzero.rbegin();
    if (fit.ec50 < 0.1 * cmin || fit.ec50 > 10.0 * cmax) {
        fit.warning = "ec50 outside 0.1x-10x of tested concentration range";
    }
    if (!fit.converged && fit.warning.empty()) fit.warning = "iteration cap reached";
    return fit;
}

// ---------------------------------------------------------------------------
// Report output

struct AssayCondition {
    std::string name;
    std::vector<DosePoint> points;
    std::optional<HillFit> fit;
};

namespace detail {

inline std::string fmt_num(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string fmt_sci(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

}  // namespace detail

struct AssayReport {
    std::string dosePointsCsv;
    std::string fitsCsv;
    std::string plotCsv;
    std::string notes;
};

inline AssayReport assay_report(std::span<const AssayCondition> conditions, int plotSamples = 50) {
    AssayReport rep;
    rep.dosePointsCsv = "condition,concentration_uM,percent_response\n";
    rep.fitsCsv = "condition,ec50_uM,hill_slope,top,bottom,sse,converged,n_points\n";
    rep.plotCsv = "condition,concentration_uM,observed_percent,fitted_percent\n";
    for (const auto& c : conditions) {
        for (const auto& d : c.points) {
            rep.dosePointsCsv += c.name + "," + detail::fmt_num(d.concentration) + "," +
                                 detail::fmt_num(d.percentResponse) + "\n";
        }
        if (!c.fit) continue;
        const HillFit& f = *c.fit;
        rep.fitsCsv += c.name + "," + detail::fmt_num(f.ec50) + "," + detail::fmt_num(f.hillSlope) +
                       "," + detail::fmt_num(f.top) + "," + detail::fmt_num(f.bottom) + "," +
                       detail::fmt_sci(f.sse) + "," + (f.converged ? "1" : "0") + "," +
                       std::to_string(c.points.size()) + "\n";
        rep.notes += c.name + ": " + (f.converged ? "converged" : "not converged") + " after " +
                     std::to_string(f.iterations) + " iterations" +
                     (f.warning.empty() ? std::string() : "; " + f.warning) + "\n";

        for (const auto& d : c.points) {
            rep.plotCsv += c.name + "," + detail::fmt_num(d.concentration) + "," +
                           detail::fmt_num(d.percentResponse) + "," +
                           detail::fmt_num(hill_model(f, d.concentration)) + "\n";
        }
        double cmin = INFINITY, cmax = 0.0;
        for (const auto& d : c.points) {
            if (d.concentration > 0.0) {
                cmin = std::min(cmin, d.concentration);
                cmax = std::max(cmax, d.concentration);
            }
        }
        if (plotSamples > 1 && cmax > 0.0) {
            const double l0 = std::log10(cmin), l1 = std::log10(cmax);
            for (int i = 0; i < plotSamples; ++i) {
                const double conc = std::pow(10.0, l0 + (l1 - l0) * i / (plotSamples - 1));
                rep.plotCsv += c.name + "," + detail::fmt_num(conc) + ",," +
                               detail::fmt_num(hill_model(f, conc)) + "\n";
            }
        }
    }
    return rep;
}

}  // namespace gelpad
