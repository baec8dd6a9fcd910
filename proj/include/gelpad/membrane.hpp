#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gelpad/image.hpp"
#include "gelpad/linalg.hpp"
#include "gelpad/vision.hpp"

namespace gelpad {

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
    long votes = 0;
    // Votes divided by the number of accumulator cells on the voting ring.
    double score = 0.0;
};

struct ChtConfig {
    int downscale = 4;
    // Candidate pixels are those at or above this quantile of gradient magnitude.
    double gradPercentile = 0.90;
    double rMinPx = 40.0;
    double rMaxPx = 100.0;
    double rStepPx = 2.0;
    double peakFraction = 0.5;
    // Non-max suppression distance; <= 0 means rMinPx.
    double minCenterSepPx = 0.0;
    // Absolute Sobel magnitude floor on the downscaled image.
    double minGradient = 40.0;
    // Candidates must also reach this fraction of the frame's strongest gradient.
    double relGradientFloor = 0.25;
    // Peaks below this ring-normalized score are noise.
    double minScore = 0.35;
    // Allowed overhang of a circle beyond the frame, full-resolution px.
    double borderTolerancePx = 2.0;
    // Sub-cell least-squares fit on full-resolution edge pixels.
    bool refine = true;

    double center_separation() const { return minCenterSepPx > 0.0 ? minCenterSepPx : rMinPx; }

    void validate() const {
        if (downscale < 1) throw std::invalid_argument("cht: downscale must be >= 1");
        if (!(rMinPx > 0.0) || !(rMinPx < rMaxPx)) {
            throw std::invalid_argument("cht: empty radius range, need 0 < rMinPx < rMaxPx");
        }
        if (!(rStepPx > 0.0)) throw std::invalid_argument("cht: rStepPx must be > 0");
        if (!(peakFraction > 0.0 && peakFraction <= 1.0)) {
            throw std::invalid_argument("cht: peakFraction must be in (0, 1]");
        }
        if (!(gradPercentile >= 0.0 && gradPercentile < 1.0)) {
            throw std::invalid_argument("cht: gradPercentile must be in [0, 1)");
        }
        if (rMaxPx / downscale < 2.0) {
            throw std::invalid_argument("cht: rMaxPx / downscale must be >= 2");
        }
    }
};

namespace detail {

struct RingOffset {
    int dx;
    int dy;
};

// Integer offsets whose distance from the origin lies in [rho - 0.5, rho + 0.5).
inline std::vector<RingOffset> ring_offsets(double rho) {
    std::vector<RingOffset> ring;
    const int ext = static_cast<int>(std::ceil(rho + 0.5));
    const double lo2 = (rho - 0.5) * (rho - 0.5);
    const double hi2 = (rho + 0.5) * (rho + 0.5);
    for (int dy = -ext; dy <= ext; ++dy) {
        for (int dx = -ext; dx <= ext; ++dx) {
            const double d2 = static_cast<double>(dx * dx + dy * dy);
            if ((rho < 0.5 || d2 >= lo2) && d2 < hi2) ring.push_back({dx, dy});
        }
    }
    return ring;
}

inline double quantile_threshold(const RealImage& mag, double q) {
    std::vector<double> v(mag.buffer());
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace detail

// Downscaled image coordinates of the Hough stage.
struct ChtGrid {
    RealImage downscaled;
    Mask candidates;
    std::vector<double> radiiPx;  // full-resolution radii
    int downscale = 1;

    double to_full(double u) const { return u * downscale + 0.5 * (downscale - 1); }
};

template <typename T>
ChtGrid cht_prepare(const Image<T>& frame, const ChtConfig& cfg) {
    cfg.validate();
    ChtGrid g;
    g.downscale = cfg.downscale;
    g.downscaled = downscale_mean(frame, cfg.downscale);
    if (g.downscaled.width() < 3 || g.downscaled.height() < 3) {
        throw std::invalid_argument("cht: frame too small after downscaling");
    }
    for (double r = cfg.rMinPx; r <= cfg.rMaxPx + 1e-9; r += cfg.rStepPx) g.radiiPx.push_back(r);

    const auto grad = sobel(g.downscaled);
    const double gate = detail::quantile_threshold(grad.magnitude, cfg.gradPercentile);
    const double peak = *std::max_element(grad.magnitude.buffer().begin(),
                                          grad.magnitude.buffer().end());
    const double floor = std::max({gate, cfg.minGradient, cfg.relGradientFloor * peak});
    g.candidates = Mask(g.downscaled.width(), g.downscaled.height(), 0);
    for (std::size_t i = 0; i < grad.magnitude.size(); ++i) {
        const double m = grad.magnitude.buffer()[i];
        g.candidates.buffer()[i] = (m > 0.0 && m >= floor) ? 1 : 0;
    }
    return g;
}

struct ChtAccumulator {
    int width = 0;
    int height = 0;
    std::vector<double> radiiPx;
    std::vector<std::size_t> ringSize;
    std::vector<std::uint32_t> votes;  // [radius][y][x]

    std::uint32_t at(std::size_t k, int x, int y) const {
        return votes[(k * static_cast<std::size_t>(height) + static_cast<std::size_t>(y)) *
                         static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(x)];
    }
};

// Every candidate votes the full ring of every quantized radius.
inline ChtAccumulator cht_accumulate(const ChtGrid& g) {
    ChtAccumulator acc;
    acc.width = g.candidates.width();
    acc.height = g.candidates.height();
    acc.radiiPx = g.radiiPx;
    const std::size_t plane = static_cast<std::size_t>(acc.width) * static_cast<std::size_t>(acc.height);
    acc.votes.assign(plane * g.radiiPx.size(), 0);
    std::vector<std::pair<int, int>> cand;
    for (int y = 0; y < acc.height; ++y) {
        for (int x = 0; x < acc.width; ++x) {
            if (g.candidates(x, y)) cand.emplace_back(x, y);
        }
    }
    for (std::size_t k = 0; k < g.radiiPx.size(); ++k) {
        const auto ring = detail::ring_offsets(g.radiiPx[k] / g.downscale);
        acc.ringSize.push_back(ring.size());
        std::uint32_t* layer = acc.votes.data() + k * plane;
        for (const auto& [x, y] : cand) {
            for (const auto& o : ring) {
                const int cx = x + o.dx;
                const int cy = y + o.dy;
                if (cx < 0 || cy < 0 || cx >= acc.width || cy >= acc.height) continue;
                ++layer[static_cast<std::size_t>(cy) * static_cast<std::size_t>(acc.width) +
                        static_cast<std::size_t>(cx)];
            }
        }
    }
    return acc;
}

// Peak picking on the accumulator: global-max-relative gate, local-max test and
// greedy non-max suppression by center distance. Circles are in full-resolution
// coordinates, sorted by score.
inline std::vector<Circle> cht_peaks(const ChtGrid& g, const ChtAccumulator& acc,
                                     const ChtConfig& cfg, int frameW, int frameH) {
    struct Cell {
        double score;
        std::uint32_t votes;
        std::size_t k;
        int x;
        int y;
    };
    const std::size_t nr = acc.radiiPx.size();
    auto fits = [&](std::size_t k, int x, int y) {
        const double cx = g.to_full(x);
        const double cy = g.to_full(y);
        const double r = acc.radiiPx[k];
        const double tol = cfg.borderTolerancePx;
        return cx - r >= -tol && cy - r >= -tol && cx + r <= frameW - 1 + tol &&
               cy + r <= frameH - 1 + tol;
    };
    auto score_of = [&](std::size_t k, int x, int y) {
        return static_cast<double>(acc.at(k, x, y)) / static_cast<double>(acc.ringSize[k]);
    };

    double best = 0.0;
    for (std::size_t k = 0; k < nr; ++k) {
        for (int y = 0; y < acc.height; ++y) {
            for (int x = 0; x < acc.width; ++x) {
                if (acc.at(k, x, y) && fits(k, x, y)) best = std::max(best, score_of(k, x, y));
            }
        }
    }
    if (best <= 0.0) return {};
    const double gate = std::max(cfg.peakFraction * best, cfg.minScore);

    std::vector<Cell> cells;
    for (std::size_t k = 0; k < nr; ++k) {
        for (int y = 0; y < acc.height; ++y) {
            for (int x = 0; x < acc.width; ++x) {
                const double s = score_of(k, x, y);
                if (s < gate || !fits(k, x, y)) continue;
                bool local_max = true;
                for (int dk = -1; dk <= 1 && local_max; ++dk) {
                    const auto kk = static_cast<std::ptrdiff_t>(k) + dk;
                    if (kk < 0 || kk >= static_cast<std::ptrdiff_t>(nr)) continue;
                    for (int dy = -1; dy <= 1 && local_max; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int nx = x + dx;
                            const int ny = y + dy;
                            if ((dk | dx | dy) == 0 || nx < 0 || ny < 0 || nx >= acc.width ||
                                ny >= acc.height) {
                                continue;
                            }
                            if (score_of(static_cast<std::size_t>(kk), nx, ny) > s) {
                                local_max = false;
                                break;
                            }
                        }
                    }
                }
                if (local_max) cells.push_back({s, acc.at(k, x, y), k, x, y});
            }
        }
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.votes != b.votes) return a.votes > b.votes;
        if (a.k != b.k) return a.k < b.k;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    std::vector<Circle> out;
    const double sep = cfg.center_separation();
    for (const Cell& c : cells) {
        Circle circ{g.to_full(c.x), g.to_full(c.y), acc.radiiPx[c.k], static_cast<long>(c.votes),
                    c.score};
        // Membranes are disjoint, so a weaker peak whose circle overlaps an
        // accepted one is a clustered response to the rims already found.
        bool clash = std::any_of(out.begin(), out.end(), [&](const Circle& o) {
            const double d = std::hypot(o.cx - circ.cx, o.cy - circ.cy);
            return d < sep || d < o.r + circ.r;
        });
        if (!clash) out.push_back(circ);
    }
    return out;
}

namespace detail {

// Geometric least-squares circle through weighted edge pixels lying near an
// initial circle; a few passes with a tightening residual gate.
inline Circle refine_circle_fit(const RealImage& magnitude, Circle c, double band) {
    for (int pass = 0; pass < 4; ++pass) {
        const int x0 = std::max(0, static_cast<int>(std::floor(c.cx - c.r - band)));
        const int x1 = std::min(magnitude.width() - 1, static_cast<int>(std::ceil(c.cx + c.r + band)));
        const int y0 = std::max(0, static_cast<int>(std::floor(c.cy - c.r - band)));
        const int y1 = std::min(magnitude.height() - 1, static_cast<int>(std::ceil(c.cy + c.r + band)));
        double peak = 0.0;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot(x - c.cx, y - c.cy) - c.r;
                if (std::abs(d) <= band) peak = std::max(peak, magnitude(x, y));
            }
        }
        if (peak <= 0.0) return c;
        struct Sample {
            double x, y, w;
        };
        std::vector<Sample> pts;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot(x - c.cx, y - c.cy) - c.r;
                const double m = magnitude(x, y);
                if (std::abs(d) <= band && m >= 0.3 * peak) pts.push_back({double(x), double(y), m});
            }
        }
        if (pts.size() < 8) return c;
        double cx = c.cx, cy = c.cy, r = c.r;
        for (int it = 0; it < 10; ++it) {
            linalg::Mat<3> jtj{};
            linalg::Vec<3> jtr{};
            for (const auto& p : pts) {
                const double dx = p.x - cx;
                const double dy = p.y - cy;
                const double dist = std::max(std::hypot(dx, dy), 1e-9);
                const double res = dist - r;
                const std::array<double, 3> jac{-dx / dist, -dy / dist, -1.0};
                for (int a = 0; a < 3; ++a) {
                    jtr[a] += p.w * jac[a] * res;
                    for (int b = 0; b < 3; ++b) jtj[a][b] += p.w * jac[a] * jac[b];
                }
            }
            for (double& v : jtr) v = -v;
            auto step = linalg::solve<3>(jtj, jtr);
            if (!step) break;
            cx += (*step)[0];
            cy += (*step)[1];
            r += (*step)[2];
            if (std::abs((*step)[0]) + std::abs((*step)[1]) + std::abs((*step)[2]) < 1e-6) break;
        }
        if (!(r > 0.0) || std::hypot(cx - c.cx, cy - c.cy) > 2.0 * band) return c;
        c.cx = cx;
        c.cy = cy;
        c.r = r;
        band = std::max(2.5, 0.6 * band);
    }
    return c;
}

}  // namespace detail

// Circular Hough transform on a block-averaged copy of the frame; peaks are
// mapped back to full resolution and optionally refined there.
template <typename T>
std::vector<Circle> detect_circles(const Image<T>& frame, const ChtConfig& cfg) {
    const ChtGrid grid = cht_prepare(frame, cfg);
    const ChtAccumulator acc = cht_accumulate(grid);
    auto circles = cht_peaks(grid, acc, cfg, frame.width(), frame.height());
    if (cfg.refine && !circles.empty()) {
        const auto full = sobel(frame);
        for (auto& c : circles) {
            c = detail::refine_circle_fit(full.magnitude, c, cfg.downscale + 2.0);
        }
    }
    std::stable_sort(circles.begin(), circles.end(),
                     [](const Circle& a, const Circle& b) { return a.votes > b.votes; });
    return circles;
}

inline std::vector<Circle> detect_circles(const Frame& frame, const ChtConfig& cfg) {
    return detect_circles(frame.image, cfg);
}

// ---------------------------------------------------------------------------
// Active contour

struct SnakeConfig {
    int nPoints = 128;
    double alpha = 0.05;  // elasticity
    double beta = 0.01;   // rigidity
    double gamma = 6.0;   // external force (edge map normalized to a unit peak)
    double stepSize = 1.0;
    double edgeSigma = 2.0;
    int maxIters = 400;
    double epsilon = 0.1;  // px, max displacement per iteration

    void validate() const {
        if (nPoints < 16) throw std::invalid_argument("snake: nPoints must be >= 16");
        if (alpha < 0 || beta < 0 || gamma < 0) {
            throw std::invalid_argument("snake: weights must be >= 0");
        }
        if (!(stepSize > 0.0)) throw std::invalid_argument("snake: stepSize must be > 0");
        if (edgeSigma < 0.0) throw std::invalid_argument("snake: edgeSigma must be >= 0");
        if (maxIters < 1) throw std::invalid_argument("snake: maxIters must be >= 1");
        if (!(epsilon > 0.0)) throw std::invalid_argument("snake: epsilon must be > 0");
    }
};

// Closed polyline; positive shoelace area in pixel coordinates.
struct Contour {
    std::vector<Point2> points;
    bool converged = false;
    int iterations = 0;

    double signed_area() const {
        double a = 0.0;
        const std::size_t n = points.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& p = points[i];
            const Point2& q = points[(i + 1) % n];
            a += p.x * q.y - q.x * p.y;
        }
        return 0.5 * a;
    }

    Point2 centroid() const {
        Point2 c;
        for (const auto& p : points) {
            c.x += p.x;
            c.y += p.y;
        }
        const double n = static_cast<double>(points.size());
        return {c.x / n, c.y / n};
    }
};

inline Contour circle_contour(const Circle& c, int n) {
    Contour out;
    out.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        out.points.push_back({c.cx + c.r * std::cos(t), c.cy + c.r * std::sin(t)});
    }
    return out;
}

namespace detail {

inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    auto orient = [](Point2 p, Point2 q, Point2 r) {
        return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    };
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
           d4 != 0;
}

}  // namespace detail

inline bool is_simple(const Contour& c) {
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (detail::segments_cross(c.points[i], c.points[(i + 1) % n], c.points[j],
                                       c.points[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

// Bilinear sample with border clamping.
inline double sample_bilinear(const RealImage& img, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = std::min(static_cast<int>(x), img.width() - 2 < 0 ? 0 : img.width() - 2);
    const int y0 = std::min(static_cast<int>(y), img.height() - 2 < 0 ? 0 : img.height() - 2);
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    return (1 - fx) * (1 - fy) * img(x0, y0) + fx * (1 - fy) * img(x1, y0) +
           (1 - fx) * fy * img(x0, y1) + fx * fy * img(x1, y1);
}

// External force field: gradient of the normalized edge map |grad(G_sigma * I)|.
struct EdgeForce {
    RealImage fx;
    RealImage fy;
};

template <typename T>
EdgeForce edge_force(const Image<T>& frame, double sigma) {
    const RealImage smooth = gaussian_blur(frame, sigma);
    const int w = smooth.width();
    const int h = smooth.height();
    RealImage edge(w, h);
    double peak = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = 0.5 * (smooth.clamped(x + 1, y) - smooth.clamped(x - 1, y));
            const double gy = 0.5 * (smooth.clamped(x, y + 1) - smooth.clamped(x, y - 1));
            edge(x, y) = std::sqrt(gx * gx + gy * gy);
            peak = std::max(peak, edge(x, y));
        }
    }
    if (peak > 0.0) {
        for (double& v : edge.buffer()) v /= peak;
    }
    EdgeForce f{RealImage(w, h), RealImage(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f.fx(x, y) = 0.5 * (edge.clamped(x + 1, y) - edge.clamped(x - 1, y));
            f.fy(x, y) = 0.5 * (edge.clamped(x, y + 1) - edge.clamped(x, y - 1));
        }
    }
    return f;
}

// One explicit snake iteration in place; returns the largest point displacement.
inline double snake_step(std::vector<Point2>& pts, const EdgeForce& force, const SnakeConfig& cfg) {
    const std::size_t n = pts.size();
    const double maxX = static_cast<double>(force.fx.width() - 1);
    const double maxY = static_cast<double>(force.fx.height() - 1);
    std::vector<Point2> next(n);
    double maxDisp = 0.0;
    auto at = [&](std::ptrdiff_t i) -> const Point2& {
        const auto m = static_cast<std::ptrdiff_t>(n);
        return pts[static_cast<std::size_t>(((i % m) + m) % m)];
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        const Point2& p = pts[i];
        const Point2& a1 = at(s - 1);
        const Point2& b1 = at(s + 1);
        const Point2& a2 = at(s - 2);
        const Point2& b2 = at(s + 2);
        const double ex = a1.x - 2 * p.x + b1.x;
        const double ey = a1.y - 2 * p.y + b1.y;
        const double rx = a2.x - 4 * a1.x + 6 * p.x - 4 * b1.x + b2.x;
        const double ry = a2.y - 4 * a1.y + 6 * p.y - 4 * b1.y + b2.y;
        const double fx = sample_bilinear(force.fx, p.x, p.y);
        const double fy = sample_bilinear(force.fy, p.x, p.y);
        const double dx = cfg.stepSize * (cfg.alpha * ex - cfg.beta * rx + cfg.gamma * fx);
        const double dy = cfg.stepSize * (cfg.alpha * ey - cfg.beta * ry + cfg.gamma * fy);
        next[i] = {std::clamp(p.x + dx, 0.0, maxX), std::clamp(p.y + dy, 0.0, maxY)};
        maxDisp = std::max(maxDisp, std::hypot(next[i].x - p.x, next[i].y - p.y));
    }
    pts = std::move(next);
    return maxDisp;
}

inline Contour refine_contour(const EdgeForce& force, const Circle& init, const SnakeConfig& cfg) {
    cfg.validate();
    const int w = force.fx.width();
    const int h = force.fx.height();
    if (!(init.r > 0.0) || init.cx < 0 || init.cy < 0 || init.cx > w - 1 || init.cy > h - 1) {
        throw std::invalid_argument("refine_contour: initial circle outside frame");
    }
    Contour c = circle_contour(init, cfg.nPoints);
    for (auto& p : c.points) {
        p.x = std::clamp(p.x, 0.0, static_cast<double>(w - 1));
        p.y = std::clamp(p.y, 0.0, static_cast<double>(h - 1));
    }
    for (int it = 1; it <= cfg.maxIters; ++it) {
        const double disp = snake_step(c.points, force, cfg);
        c.iterations = it;
        if (disp < cfg.epsilon) {
            c.converged = true;
            break;
        }
    }
    return c;
}

template <typename T>
Contour refine_contour(const Image<T>& frame, const Circle& init, const SnakeConfig& cfg) {
    cfg.validate();
    return refine_contour(edge_force(frame, cfg.edgeSigma), init, cfg);
}

inline Contour refine_contour(const Frame& frame, const Circle& init, const SnakeConfig& cfg) {
    return refine_contour(frame.image, init, cfg);
}

// Moves every point toward the contour centroid by `inset` px.
inline Contour inset_contour(const Contour& c, double inset) {
    Contour out = c;
    const Point2 m = c.centroid();
    for (auto& p : out.points) {
        const double d = std::hypot(p.x - m.x, p.y - m.y);
        if (d <= inset || d == 0.0) {
            p = m;
        } else {
            const double s = (d - inset) / d;
            p = {m.x + (p.x - m.x) * s, m.y + (p.y - m.y) * s};
        }
    }
    return out;
}

// Even-odd scanline fill; a pixel is set when its center lies strictly inside.
inline Mask contour_mask(const Contour& c, int width, int height) {
    if (c.points.size() < 3 || std::abs(c.signed_area()) < 1e-9) {
        throw std::invalid_argument("contour_mask: degenerate contour");
    }
    Mask m(width, height, 0);
    const std::size_t n = c.points.size();
    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        const double yc = static_cast<double>(y);
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& a = c.points[i];
            const Point2& b = c.points[(i + 1) % n];
            if ((a.y > yc) != (b.y > yc)) {
                xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int xa = static_cast<int>(std::floor(xs[k])) + 1;
            const int xb = static_cast<int>(std::ceil(xs[k + 1])) - 1;
            for (int x = std::max(xa, 0); x <= std::min(xb, width - 1); ++x) {
                if (x > xs[k] && x < xs[k + 1]) m(x, y) = 255;
            }
        }
    }
    return m;
}

}  // namespace gelpad
