#pragma once

// Independent reference implementations and fixtures shared by the tests.
// Oracles here are written for clarity, not speed, and share no code with
// the library beyond the image container.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "gelpad/image.hpp"

namespace gelpad::test {

// ---------------------------------------------------------------------------
// Fixtures

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gelpad_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Relative path -> file contents for every regular file under `dir`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
    }
    return out;
}

inline GrayImage random_image(int w, int h, std::uint32_t seed, int lo = 0, int hi = 255) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> d(lo, hi);
    GrayImage img(w, h);
    for (auto& v : img.buffer()) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

inline Mask random_mask(int w, int h, std::uint32_t seed, double density) {
    std::mt19937 rng(seed);
    std::bernoulli_distribution d(density);
    Mask m(w, h);
    for (auto& v : m.buffer()) v = d(rng) ? 255 : 0;
    return m;
}

// Coverage-weighted rendering of an annulus [r - width/2, r + width/2] of
// intensity `ring` on `background`, sampled on an ss x ss subpixel grid.
inline GrayImage render_ring(int w, int h, double cx, double cy, double r, double width,
                             double background, double ring, int ss = 4) {
    GrayImage img(w, h);
    const double inner = r - 0.5 * width;
    const double outer = r + 0.5 * width;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int hits = 0;
            for (int j = 0; j < ss; ++j) {
                for (int i = 0; i < ss; ++i) {
                    const double sx = x - 0.5 + (i + 0.5) / ss;
                    const double sy = y - 0.5 + (j + 0.5) / ss;
                    const double d = std::hypot(sx - cx, sy - cy);
                    if (d >= inner && d <= outer) ++hits;
                }
            }
            const double cov = static_cast<double>(hits) / (ss * ss);
            img(x, y) = static_cast<std::uint8_t>(std::lround(background + cov * (ring - background)));
        }
    }
    return img;
}

// Bright disc on a dark surround, anti-aliased; its boundary is a step edge.
inline GrayImage render_disc(int w, int h, double cx, double cy, double r, double outside,
                             double inside, int ss = 4) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int hits = 0;
            for (int j = 0; j < ss; ++j) {
                for (int i = 0; i < ss; ++i) {
                    const double sx = x - 0.5 + (i + 0.5) / ss;
                    const double sy = y - 0.5 + (j + 0.5) / ss;
                    if (std::hypot(sx - cx, sy - cy) <= r) ++hits;
                }
            }
            const double cov = static_cast<double>(hits) / (ss * ss);
            img(x, y) = static_cast<std::uint8_t>(std::lround(outside + cov * (inside - outside)));
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Convolution oracles

// Direct 3x3 correlation with explicit Sobel kernels and replicated borders.
struct NaiveGradient {
    std::vector<long> gx, gy;
};

inline NaiveGradient naive_sobel(const GrayImage& img) {
    static constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static constexpr int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    const int w = img.width(), h = img.height();
    NaiveGradient g{std::vector<long>(img.size()), std::vector<long>(img.size())};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            long sx = 0, sy = 0;
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < 3; ++i) {
                    const int xx = std::clamp(x + i - 1, 0, w - 1);
                    const int yy = std::clamp(y + j - 1, 0, h - 1);
                    const long v = img(xx, yy);
                    sx += kx[j][i] * v;
                    sy += ky[j][i] * v;
                }
            }
            g.gx[static_cast<std::size_t>(y * w + x)] = sx;
            g.gy[static_cast<std::size_t>(y * w + x)] = sy;
        }
    }
    return g;
}

// Full 2-D Gaussian correlation (outer-product kernel), replicated borders.
inline RealImage naive_gaussian(const GrayImage& img, double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k1;
    double s = 0.0;
    for (int i = -r; i <= r; ++i) {
        k1.push_back(std::exp(-(i * i) / (2.0 * sigma * sigma)));
        s += k1.back();
    }
    for (double& v : k1) v /= s;
    const int w = img.width(), h = img.height();
    RealImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                for (int i = -r; i <= r; ++i) {
                    const int xx = std::clamp(x + i, 0, w - 1);
                    const int yy = std::clamp(y + j, 0, h - 1);
                    acc += k1[static_cast<std::size_t>(i + r)] * k1[static_cast<std::size_t>(j + r)] * img(xx, yy);
                }
            }
            out(x, y) = acc;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Window sums and thresholding

inline std::int64_t naive_rect_sum(const GrayImage& img, int x0, int y0, int x1, int y1) {
    std::int64_t s = 0;
    for (int y = std::max(y0, 0); y <= std::min(y1, img.height() - 1); ++y) {
        for (int x = std::max(x0, 0); x <= std::min(x1, img.width() - 1); ++x) s += img(x, y);
    }
    return s;
}

// Per-pixel window mean by direct summation; window [x - W/2, x - W/2 + W - 1]
// clipped to the image. Foreground when value < ratio * mean.
inline Mask naive_threshold(const GrayImage& img, int W, int H, double ratio) {
    Mask out(img.width(), img.height(), 0);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            std::int64_t sum = 0, n = 0;
            for (int yy = y - H / 2; yy <= y - H / 2 + H - 1; ++yy) {
                for (int xx = x - W / 2; xx <= x - W / 2 + W - 1; ++xx) {
                    if (!img.contains(xx, yy)) continue;
                    sum += img(xx, yy);
                    ++n;
                }
            }
            const double mean = static_cast<double>(sum) / static_cast<double>(n);
            out(x, y) = static_cast<double>(img(x, y)) < ratio * mean ? 255 : 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Connected components by recursive flood fill

struct OracleBlob {
    long area = 0;
    long perimeter = 0;
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

struct OracleLabeling {
    std::vector<int> labels;  // 0 background, blobs numbered in raster order of first pixel
    std::vector<OracleBlob> blobs;
};

inline void flood(const Mask& m, std::vector<int>& labels, int x, int y, int label, OracleBlob& b) {
    if (!m.contains(x, y) || !m(x, y)) return;
    int& l = labels[static_cast<std::size_t>(y * m.width() + x)];
    if (l != 0) return;
    l = label;
    ++b.area;
    b.xmin = std::min(b.xmin, x);
    b.xmax = std::max(b.xmax, x);
    b.ymin = std::min(b.ymin, y);
    b.ymax = std::max(b.ymax, y);
    const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& d : d4) {
        const int nx = x + d[0], ny = y + d[1];
        if (!m.contains(nx, ny) || !m(nx, ny)) ++b.perimeter;
    }
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx || dy) flood(m, labels, x + dx, y + dy, label, b);
        }
    }
}

inline OracleLabeling flood_fill_components(const Mask& m) {
    OracleLabeling out;
    out.labels.assign(m.size(), 0);
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (!m(x, y) || out.labels[static_cast<std::size_t>(y * m.width() + x)]) continue;
            OracleBlob b{0, 0, x, y, x, y};
            flood(m, out.labels, x, y, static_cast<int>(out.blobs.size()) + 1, b);
            out.blobs.push_back(b);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Point in polygon by crossing parity

inline bool inside_polygon(const std::vector<Point2>& poly, double px, double py) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point2& a = poly[i];
        const Point2& b = poly[j];
        if ((a.y > py) != (b.y > py)) {
            const double xc = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            if (px < xc) in = !in;
        }
    }
    return in;
}

// ---------------------------------------------------------------------------
// Circle Hough exhaustive search
//
// For every (center, radius) cell on the downscaled grid, count edge pixels
// whose distance from the center rounds into the radius band and normalize by
// the number of lattice points in the band. The best-scoring fully visible
// cell wins.

struct OracleCircle {
    double cx = 0, cy = 0, r = 0;
    double score = 0;
    long votes = 0;
};

inline OracleCircle exhaustive_circle_search(const GrayImage& frame, int ds, const std::vector<double>& radii,
                                             double gradPercentile, double minGradient,
                                             double relFloor, double borderTol) {
    // Block mean.
    const int w = (frame.width() + ds - 1) / ds, h = (frame.height() + ds - 1) / ds;
    std::vector<double> small(static_cast<std::size_t>(w * h));
    for (int by = 0; by < h; ++by) {
        for (int bx = 0; bx < w; ++bx) {
            double s = 0;
            int n = 0;
            for (int y = by * ds; y < std::min((by + 1) * ds, frame.height()); ++y) {
                for (int x = bx * ds; x < std::min((bx + 1) * ds, frame.width()); ++x) {
                    s += frame(x, y);
                    ++n;
                }
            }
            small[static_cast<std::size_t>(by * w + bx)] = s / n;
        }
    }
    auto at = [&](int x, int y) {
        return small[static_cast<std::size_t>(std::clamp(y, 0, h - 1) * w + std::clamp(x, 0, w - 1))];
    };
    // Sobel magnitude.
    std::vector<double> mag(small.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1) - at(x - 1, y - 1) -
                              2 * at(x - 1, y) - at(x - 1, y + 1);
            const double gy = at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1) - at(x - 1, y - 1) -
                              2 * at(x, y - 1) - at(x + 1, y - 1);
            mag[static_cast<std::size_t>(y * w + x)] = std::sqrt(gx * gx + gy * gy);
        }
    }
    std::vector<double> sorted = mag;
    std::sort(sorted.begin(), sorted.end());
    const double pct = sorted[static_cast<std::size_t>(std::floor(gradPercentile * (sorted.size() - 1)))];
    const double gate = std::max({pct, minGradient, relFloor * sorted.back()});
    std::vector<std::pair<int, int>> edges;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = mag[static_cast<std::size_t>(y * w + x)];
            if (m > 0 && m >= gate) edges.emplace_back(x, y);
        }
    }
    auto full = [&](double u) { return u * ds + 0.5 * (ds - 1); };
    OracleCircle best;
    for (double rFull : radii) {
        const double rho = rFull / ds;
        const double lo = rho - 0.5, hi = rho + 0.5;
        long band = 0;
        const int ext = static_cast<int>(std::ceil(hi));
        for (int dy = -ext; dy <= ext; ++dy) {
            for (int dx = -ext; dx <= ext; ++dx) {
                const double d = std::sqrt(double(dx * dx + dy * dy));
                if (d >= lo && d < hi) ++band;
            }
        }
        for (int cy = 0; cy < h; ++cy) {
            for (int cx = 0; cx < w; ++cx) {
                const double fx = full(cx), fy = full(cy);
                if (fx - rFull < -borderTol || fy - rFull < -borderTol ||
                    fx + rFull > frame.width() - 1 + borderTol || fy + rFull > frame.height() - 1 + borderTol) {
                    continue;
                }
                long votes = 0;
                for (const auto& [ex, ey] : edges) {
                    const double d = std::sqrt(double((ex - cx) * (ex - cx) + (ey - cy) * (ey - cy)));
                    if (d >= lo && d < hi) ++votes;
                }
                const double score = static_cast<double>(votes) / static_cast<double>(band);
                // Same ordering as the detector: score, then votes, then first in (r, y, x) order.
                if (score > best.score || (score == best.score && votes > best.votes)) {
                    best = {fx, fy, rFull, score, votes};
                }
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Assignment

// Minimum total distance over all one-to-one assignments of size
// min(nTracks, nDets) restricted to pairs within the gate. Returns the cost
// and number of pairs of the best assignment (maximizing pairs first).
struct OracleAssignment {
    int pairs = 0;
    double cost = 0.0;
    std::vector<int> detOfTrack;  // -1 when unmatched
};

inline OracleAssignment exhaustive_assignment(const std::vector<std::vector<double>>& dist, double gate) {
    const int nt = static_cast<int>(dist.size());
    const int nd = nt ? static_cast<int>(dist[0].size()) : 0;
    OracleAssignment best{-1, 0.0, {}};
    std::vector<int> cur(static_cast<std::size_t>(nt), -1);
    std::vector<bool> used(static_cast<std::size_t>(nd), false);
    std::function<void(int, int, double)> rec = [&](int t, int pairs, double cost) {
        if (t == nt) {
            if (pairs > best.pairs || (pairs == best.pairs && cost < best.cost - 1e-12)) {
                best = {pairs, cost, cur};
            }
            return;
        }
        cur[static_cast<std::size_t>(t)] = -1;
        rec(t + 1, pairs, cost);
        for (int d = 0; d < nd; ++d) {
            if (used[static_cast<std::size_t>(d)] || dist[t][d] > gate) continue;
            used[static_cast<std::size_t>(d)] = true;
            cur[static_cast<std::size_t>(t)] = d;
            rec(t + 1, pairs + 1, cost + dist[t][d]);
            used[static_cast<std::size_t>(d)] = false;
            cur[static_cast<std::size_t>(t)] = -1;
        }
    };
    rec(0, 0, 0.0);
    return best;
}

}  // namespace gelpad::test
