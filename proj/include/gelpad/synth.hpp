#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gelpad/image.hpp"
#include "gelpad/imageio.hpp"
#include "gelpad/membrane.hpp"
#include "gelpad/tracker.hpp"

namespace gelpad {

// SplitMix64 (Steele, Lea & Flood). Seed 1234567 yields
// 6457827717110365317, 3203168211198807973, 9817491932198370423, ...
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one normal per call.
    double gaussian() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Independent stream for a (seed, key) pair.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t key) noexcept {
        SplitMix64 mixer(seed ^ (key * 0xD1B54A32D192ED03ULL));
        return SplitMix64(mixer.next());
    }

private:
    std::uint64_t state_;
};

struct MembraneSpec {
    double cx = 0.0;
    double cy = 0.0;
    double r = 100.0;
    double rimDarkness = 40.0;
    double interiorBrightness = 200.0;
    int worms = -1;  // -1: SceneConfig::wormsPerMembrane
};

// Worm with a fixed start pose and no heading noise, for collision scripts.
struct ScriptedWorm {
    int membrane = 0;
    double headX = 0.0;
    double headY = 0.0;
    double heading = 0.0;  // radians
    double speedPxPerFrame = 2.0;
};

struct SceneConfig {
    int width = 512;
    int height = 512;
    std::vector<MembraneSpec> membranes;
    int wormsPerMembrane = 1;
    double wormLengthPx = 70.0;
    double wormWidthPx = 3.0;
    double wormIntensity = 70.0;
    double speedPxPerFrame = 2.0;
    double headingNoiseStd = 0.08;
    double undulationAmpPx = 1.5;
    double undulationPeriodFrames = 20.0;
    double rimWidthPx = 3.0;
    // Clearance kept between the worm body and the membrane edge.
    double wallMarginPx = 7.0;
    // Darker than the rim so the rim's outer edge does not form a second,
    // opposite-signed edge next to the membrane boundary.
    double backgroundBase = 25.0;
    double illuminationGradientPerPx = 0.05;
    double noiseStd = 2.0;
    std::uint64_t seed = 1;
    double fps = 10.0;
    double umPerPixel = 9.0;
    int frameCount = 100;
    std::vector<ScriptedWorm> scripted;

    int worms_in(std::size_t membrane) const {
        const int w = membranes[membrane].worms;
        return w >= 0 ? w : wormsPerMembrane;
    }

    double allowed_radius(std::size_t membrane) const {
        return membranes[membrane].r - wallMarginPx - 0.5 * wormWidthPx;
    }

    void validate() const {
        if (width < 16 || height < 16) throw std::invalid_argument("scene: frame too small");
        if (frameCount < 1) throw std::invalid_argument("scene: frameCount must be >= 1");
        if (!(fps > 0.0) || !(umPerPixel > 0.0)) throw std::invalid_argument("scene: fps/umPerPixel must be > 0");
        if (!(wormLengthPx > 0.0) || !(wormWidthPx > 0.0)) throw std::invalid_argument("scene: bad worm geometry");
        if (noiseStd < 0.0 || headingNoiseStd < 0.0) throw std::invalid_argument("scene: negative noise");
        if (wormsPerMembrane < 0) throw std::invalid_argument("scene: wormsPerMembrane must be >= 0");
        for (double v : {backgroundBase, wormIntensity}) {
            if (v < 0.0 || v > 255.0) throw std::invalid_argument("scene: intensity outside [0,255]");
        }
        for (std::size_t i = 0; i < membranes.size(); ++i) {
            const auto& m = membranes[i];
            if (!(m.r > 0.0)) throw std::invalid_argument("scene: membrane radius must be > 0");
            if (m.rimDarkness < 0 || m.rimDarkness > 255 || m.interiorBrightness < 0 ||
                m.interiorBrightness > 255) {
                throw std::invalid_argument("scene: intensity outside [0,255]");
            }
            const bool hasWorms =
                worms_in(i) > 0 || std::any_of(scripted.begin(), scripted.end(), [&](const ScriptedWorm& s) {
                    return s.membrane == static_cast<int>(i);
                });
            if (hasWorms && allowed_radius(i) - 0.5 * wormLengthPx <= 1.0) {
                throw std::invalid_argument("scene: worms too large for membrane " + std::to_string(i));
            }
        }
        for (const auto& s : scripted) {
            if (s.membrane < 0 || s.membrane >= static_cast<int>(membranes.size())) {
                throw std::invalid_argument("scene: scripted worm references unknown membrane");
            }
        }
    }

    // Four membranes in a 2x2 layout.
    static SceneConfig four_membrane(int width = 512, int height = 512, double r = 100.0) {
        SceneConfig c;
        c.width = width;
        c.height = height;
        const double qx = width / 4.0;
        const double qy = height / 4.0;
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) {
                c.membranes.push_back({qx * (1 + 2 * i) - 0.5, qy * (1 + 2 * j) - 0.5, r, 40.0, 200.0, -1});
            }
        }
        return c;
    }
};

struct TruthRecord {
    int frameIndex = 0;
    int wormId = 0;
    int membraneId = 0;
    double x = 0.0;
    double y = 0.0;
    double speedPxS = 0.0;
    bool merged = false;

    bool operator==(const TruthRecord&) const = default;
};

struct GroundTruth {
    std::vector<Circle> circles;
    std::vector<TruthRecord> records;  // ordered by frame, then worm id
    int frameCount = 0;
    double fps = 10.0;
};

namespace detail {

struct WormState {
    int id = 0;
    int membrane = 0;
    Point2 head;
    double heading = 0.0;
    double speed = 0.0;
    bool scripted = false;
    double phase = 0.0;
    std::deque<Point2> trail;  // oldest first, head last
};

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

}  // namespace detail

// Steps the scene state frame by frame and renders each frame on demand.
class SceneSimulator {
public:
    explicit SceneSimulator(SceneConfig cfg) : cfg_(std::move(cfg)), rng_(SplitMix64::stream(cfg_.seed, 0)) {
        cfg_.validate();
        build_background();
        spawn();
        // Pre-roll one step so frame 0 has a backward speed.
        for (auto& w : worms_) advance(w);
        prevCentroid_.clear();
        for (const auto& w : worms_) prevCentroid_.push_back(centroid_of(body(w)));
    }

    const SceneConfig& config() const noexcept { return cfg_; }
    int frames_emitted() const noexcept { return nextFrame_; }
    bool done() const noexcept { return nextFrame_ >= cfg_.frameCount; }

    std::vector<Circle> circles() const {
        std::vector<Circle> out;
        for (const auto& m : cfg_.membranes) out.push_back({m.cx, m.cy, m.r, 0, 0.0});
        return out;
    }

    // Advances to the next frame, appends its truth records and returns the image.
    Frame next(std::vector<TruthRecord>& truth) {
        if (done()) throw std::out_of_range("scene: no frames left");
        const int f = nextFrame_++;
        for (auto& w : worms_) advance(w);
        std::vector<std::vector<Point2>> bodies;
        for (const auto& w : worms_) bodies.push_back(body(w));
        for (std::size_t i = 0; i < worms_.size(); ++i) {
            const Point2 c = centroid_of(bodies[i]);
            const Point2 p = prevCentroid_[i];
            TruthRecord r;
            r.frameIndex = f;
            r.wormId = worms_[i].id;
            r.membraneId = worms_[i].membrane;
            r.x = c.x;
            r.y = c.y;
            r.speedPxS = std::hypot(c.x - p.x, c.y - p.y) * cfg_.fps;
            for (std::size_t j = 0; j < worms_.size(); ++j) {
                if (j != i && worms_[j].membrane == worms_[i].membrane &&
                    bodies_touch(bodies[i], bodies[j])) {
                    r.merged = true;
                }
            }
            truth.push_back(r);
            prevCentroid_[i] = c;
        }
        return Frame{render(f, bodies), f, f / cfg_.fps};
    }

    std::vector<std::vector<Point2>> current_bodies() const {
        std::vector<std::vector<Point2>> out;
        for (const auto& w : worms_) out.push_back(body(w));
        return out;
    }

    // Axis-aligned bounding-box center of a body polyline.
    static Point2 centroid_of(const std::vector<Point2>& pts) {
        double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
        for (const auto& p : pts) {
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
    }

private:
    void build_background() {
        background_ = RealImage(cfg_.width, cfg_.height);
        for (int y = 0; y < cfg_.height; ++y) {
            for (int x = 0; x < cfg_.width; ++x) {
                const double illum = cfg_.illuminationGradientPerPx * x;
                double v = cfg_.backgroundBase + illum;
                for (const auto& m : cfg_.membranes) {
                    const double d = std::hypot(x - m.cx, y - m.cy);
                    if (d > m.r + cfg_.rimWidthPx + 1.0) continue;
                    const double inside = std::clamp(m.r + 0.5 - d, 0.0, 1.0);
                    const double ring = std::clamp(m.r + cfg_.rimWidthPx + 0.5 - d, 0.0, 1.0) - inside;
                    v = inside * (m.interiorBrightness + illum) + ring * (m.rimDarkness + illum) +
                        (1.0 - inside - ring) * v;
                }
                background_(x, y) = v;
            }
        }
    }

    void spawn() {
        int id = 1;
        if (!cfg_.scripted.empty()) {
            for (const auto& s : cfg_.scripted) {
                detail::WormState w;
                w.id = id++;
                w.membrane = s.membrane;
                w.head = {s.headX, s.headY};
                w.heading = s.heading;
                w.speed = s.speedPxPerFrame;
                w.scripted = true;
                lay_straight(w);
                worms_.push_back(std::move(w));
            }
            return;
        }
        for (std::size_t m = 0; m < cfg_.membranes.size(); ++m) {
            const auto& mem = cfg_.membranes[m];
            const double room = cfg_.allowed_radius(m) - 0.5 * cfg_.wormLengthPx;
            for (int k = 0; k < cfg_.worms_in(m); ++k) {
                detail::WormState w;
                w.id = id++;
                w.membrane = static_cast<int>(m);
                w.speed = cfg_.speedPxPerFrame;
                w.phase = rng_.uniform(0.0, 2.0 * std::numbers::pi);
                for (int attempt = 0; attempt < 200; ++attempt) {
                    const double rad = room * std::sqrt(rng_.uniform());
                    const double ang = rng_.uniform(0.0, 2.0 * std::numbers::pi);
                    w.heading = rng_.uniform(0.0, 2.0 * std::numbers::pi);
                    const Point2 mid{mem.cx + rad * std::cos(ang), mem.cy + rad * std::sin(ang)};
                    w.head = {mid.x + 0.5 * cfg_.wormLengthPx * std::cos(w.heading),
                              mid.y + 0.5 * cfg_.wormLengthPx * std::sin(w.heading)};
                    lay_straight(w);
                    const auto b = body(w);
                    bool clear = true;
                    for (const auto& o : worms_) {
                        if (o.membrane == w.membrane && bodies_touch(b, body(o), 6.0)) clear = false;
                    }
                    if (clear) break;
                }
                worms_.push_back(std::move(w));
            }
        }
    }

    void lay_straight(detail::WormState& w) const {
        w.trail.clear();
        const int n = static_cast<int>(std::ceil(cfg_.wormLengthPx)) + 1;
        for (int i = n; i >= 0; --i) {
            w.trail.push_back({w.head.x - i * std::cos(w.heading), w.head.y - i * std::sin(w.heading)});
        }
    }

    void advance(detail::WormState& w) {
        const auto& mem = cfg_.membranes[static_cast<std::size_t>(w.membrane)];
        const double limit = cfg_.allowed_radius(static_cast<std::size_t>(w.membrane));
        if (!w.scripted) {
            w.heading += cfg_.headingNoiseStd * rng_.gaussian();
            // Steer along the wall when heading outward near it.
            const double rx = w.head.x - mem.cx, ry = w.head.y - mem.cy;
            const double dist = std::hypot(rx, ry);
            const double lookahead = std::max(0.5 * cfg_.wormLengthPx, 4.0 * w.speed);
            if (dist > limit - lookahead && dist > 0.0) {
                const double nx = rx / dist, ny = ry / dist;
                const double outward = std::cos(w.heading) * nx + std::sin(w.heading) * ny;
                if (outward > 0.0) {
                    const double cross = nx * std::sin(w.heading) - ny * std::cos(w.heading);
                    const double closeness = std::clamp((dist - (limit - lookahead)) / lookahead, 0.0, 1.0);
                    const double turn = (0.05 + 0.25 * closeness) * (cross >= 0.0 ? 1.0 : -1.0);
                    w.heading += turn;
                }
            }
        }
        Point2 next{w.head.x + w.speed * std::cos(w.heading), w.head.y + w.speed * std::sin(w.heading)};
        if (std::hypot(next.x - mem.cx, next.y - mem.cy) > limit) {
            // Specular reflection off the membrane wall.
            const double rx = w.head.x - mem.cx, ry = w.head.y - mem.cy;
            const double d = std::max(std::hypot(rx, ry), 1e-9);
            const double nx = rx / d, ny = ry / d;
            double dx = std::cos(w.heading), dy = std::sin(w.heading);
            const double dot = dx * nx + dy * ny;
            dx -= 2.0 * dot * nx;
            dy -= 2.0 * dot * ny;
            w.heading = std::atan2(dy, dx);
            next = {w.head.x + w.speed * dx, w.head.y + w.speed * dy};
            const double nd = std::hypot(next.x - mem.cx, next.y - mem.cy);
            if (nd > limit) {
                next = {mem.cx + (next.x - mem.cx) * limit / nd, mem.cy + (next.y - mem.cy) * limit / nd};
            }
        }
        w.head = next;
        w.heading = std::remainder(w.heading, 2.0 * std::numbers::pi);
        w.trail.push_back(next);
        w.phase += 2.0 * std::numbers::pi / cfg_.undulationPeriodFrames;
        // Drop trail history beyond the body length.
        double len = 0.0;
        std::size_t keep = w.trail.size();
        for (std::size_t i = w.trail.size() - 1; i > 0; --i) {
            len += std::hypot(w.trail[i].x - w.trail[i - 1].x, w.trail[i].y - w.trail[i - 1].y);
            if (len > cfg_.wormLengthPx + 2.0) {
                keep = w.trail.size() - i + 1;
                break;
            }
        }
        while (w.trail.size() > keep) w.trail.pop_front();
    }

    // Body polyline sampled every pixel of arc length from head to tail, with a
    // travelling lateral wave.
    std::vector<Point2> body(const detail::WormState& w) const {
        std::vector<Point2> pts;
        const double L = cfg_.wormLengthPx;
        const int samples = static_cast<int>(std::ceil(L));
        const double wavelength = 2.0 * L / 3.0;
        std::size_t seg = w.trail.size() - 1;  // segment trail[seg] -> trail[seg - 1]
        double segStart = 0.0;                  // arc length from the head at trail[seg]
        for (int k = 0; k <= samples; ++k) {
            const double s = L * k / samples;
            while (seg > 1) {
                const double sl = std::hypot(w.trail[seg].x - w.trail[seg - 1].x,
                                             w.trail[seg].y - w.trail[seg - 1].y);
                if (segStart + sl >= s) break;
                segStart += sl;
                --seg;
            }
            const Point2& a = w.trail[seg];
            const Point2& b = w.trail[seg - 1];
            const double sl = std::hypot(a.x - b.x, a.y - b.y);
            const double t = sl > 0.0 ? std::min((s - segStart) / sl, 1.0) : 0.0;
            const Point2 p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
            const double tx = sl > 0.0 ? (a.x - b.x) / sl : std::cos(w.heading);
            const double ty = sl > 0.0 ? (a.y - b.y) / sl : std::sin(w.heading);
            const double env = std::sin(std::numbers::pi * s / L);
            const double off = cfg_.undulationAmpPx * env *
                               std::sin(2.0 * std::numbers::pi * s / wavelength - w.phase);
            pts.push_back({p.x - ty * off, p.y + tx * off});
        }
        return pts;
    }

    bool bodies_touch(const std::vector<Point2>& a, const std::vector<Point2>& b, double extra = 1.0) const {
        const double lim = cfg_.wormWidthPx + extra;
        for (const auto& p : a) {
            for (std::size_t i = 0; i + 1 < b.size(); ++i) {
                if (detail::point_segment_distance(p, b[i], b[i + 1]) < lim) return true;
            }
        }
        return false;
    }

    GrayImage render(int frameIndex, const std::vector<std::vector<Point2>>& bodies) const {
        RealImage img = background_;
        const double half = 0.5 * cfg_.wormWidthPx;
        for (const auto& pts : bodies) {
            double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
            for (const auto& p : pts) {
                x0 = std::min(x0, p.x);
                y0 = std::min(y0, p.y);
                x1 = std::max(x1, p.x);
                y1 = std::max(y1, p.y);
            }
            const int bx0 = std::max(0, static_cast<int>(std::floor(x0 - half - 1)));
            const int by0 = std::max(0, static_cast<int>(std::floor(y0 - half - 1)));
            const int bx1 = std::min(cfg_.width - 1, static_cast<int>(std::ceil(x1 + half + 1)));
            const int by1 = std::min(cfg_.height - 1, static_cast<int>(std::ceil(y1 + half + 1)));
            for (int y = by0; y <= by1; ++y) {
                for (int x = bx0; x <= bx1; ++x) {
                    double d = INFINITY;
                    const Point2 q{static_cast<double>(x), static_cast<double>(y)};
                    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                        d = std::min(d, detail::point_segment_distance(q, pts[i], pts[i + 1]));
                    }
                    const double cov = std::clamp(half + 0.5 - d, 0.0, 1.0);
                    if (cov <= 0.0) continue;
                    const double illum = cfg_.illuminationGradientPerPx * x;
                    img(x, y) = img(x, y) * (1.0 - cov) + (cfg_.wormIntensity + illum) * cov;
                }
            }
        }
        GrayImage out(cfg_.width, cfg_.height);
        SplitMix64 noise = SplitMix64::stream(cfg_.seed, 0x1000 + static_cast<std::uint64_t>(frameIndex));
        for (std::size_t i = 0; i < img.size(); ++i) {
            double v = img.buffer()[i];
            if (cfg_.noiseStd > 0.0) v += cfg_.noiseStd * noise.gaussian();
            out.buffer()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
        return out;
    }

    SceneConfig cfg_;
    SplitMix64 rng_;
    RealImage background_;
    std::vector<detail::WormState> worms_;
    std::vector<Point2> prevCentroid_;
    int nextFrame_ = 0;
};

struct Simulation {
    std::vector<Frame> frames;
    GroundTruth truth;
};

// Renders the whole scene in memory. Use SceneSimulator for long runs.
inline Simulation simulate(const SceneConfig& cfg) {
    SceneSimulator sim(cfg);
    Simulation out;
    out.truth.circles = sim.circles();
    out.truth.frameCount = cfg.frameCount;
    out.truth.fps = cfg.fps;
    while (!sim.done()) out.frames.push_back(sim.next(out.truth.records));
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation against ground truth

struct WormVelocityError {
    int wormId = 0;
    double truthMeanPxS = 0.0;
    double trackMeanPxS = 0.0;
    double relError = 0.0;
    long samples = 0;
};

struct EvalMetrics {
    long truthCount = 0;
    long predictedCount = 0;
    long matched = 0;
    double recall = 0.0;
    double precision = 0.0;
    int idSwitches = 0;
    double rmsePx = 0.0;
    std::vector<WormVelocityError> perWorm;
    double maxVelocityRelError = 0.0;
};

// Per-frame greedy one-to-one matching of track points to truth centroids.
inline EvalMetrics evaluate(std::span<const Track> tracks, const GroundTruth& truth,
                            double matchRadiusPx) {
    struct Pred {
        int trackId;
        double x, y;
        double stepSpeed;  // < 0 for the first point of a track
    };
    std::map<int, std::vector<Pred>> predByFrame;
    for (const auto& t : tracks) {
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            const auto& p = t.points[i];
            if (p.frameIndex < 0 || p.frameIndex >= truth.frameCount) {
                throw std::invalid_argument("evaluate: track " + std::to_string(t.id) +
                                            " has frame " + std::to_string(p.frameIndex) +
                                            " outside the ground-truth range");
            }
            double speed = -1.0;
            if (i > 0) {
                const auto& q = t.points[i - 1];
                speed = std::hypot(p.x - q.x, p.y - q.y) * truth.fps / (p.frameIndex - q.frameIndex);
            }
            predByFrame[p.frameIndex].push_back({t.id, p.x, p.y, speed});
        }
    }
    std::map<int, std::vector<const TruthRecord*>> truthByFrame;
    for (const auto& r : truth.records) truthByFrame[r.frameIndex].push_back(&r);

    EvalMetrics m;
    m.truthCount = static_cast<long>(truth.records.size());
    for (const auto& [f, v] : predByFrame) m.predictedCount += static_cast<long>(v.size());

    std::map<int, int> lastTrackOf;
    std::map<int, std::pair<double, double>> speedSums;  // worm -> (truth, track)
    std::map<int, long> speedCounts;
    double sq = 0.0;
    for (const auto& [frame, truths] : truthByFrame) {
        auto pit = predByFrame.find(frame);
        if (pit == predByFrame.end()) continue;
        const auto& preds = pit->second;
        std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
        for (std::size_t ti = 0; ti < truths.size(); ++ti) {
            for (std::size_t pi = 0; pi < preds.size(); ++pi) {
                const double d = std::hypot(truths[ti]->x - preds[pi].x, truths[ti]->y - preds[pi].y);
                if (d <= matchRadiusPx) pairs.emplace_back(d, ti, pi);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<bool> tu(truths.size(), false), pu(preds.size(), false);
        for (const auto& [d, ti, pi] : pairs) {
            if (tu[ti] || pu[pi]) continue;
            tu[ti] = pu[pi] = true;
            ++m.matched;
            sq += d * d;
            const int worm = truths[ti]->wormId;
            const int trackId = preds[pi].trackId;
            auto last = lastTrackOf.find(worm);
            if (last != lastTrackOf.end() && last->second != trackId) ++m.idSwitches;
            lastTrackOf[worm] = trackId;
            if (preds[pi].stepSpeed >= 0.0) {
                speedSums[worm].first += truths[ti]->speedPxS;
                speedSums[worm].second += preds[pi].stepSpeed;
                ++speedCounts[worm];
            }
        }
    }
    m.recall = m.truthCount ? static_cast<double>(m.matched) / m.truthCount : 1.0;
    m.precision = m.predictedCount ? static_cast<double>(m.matched) / m.predictedCount : 1.0;
    m.rmsePx = m.matched ? std::sqrt(sq / m.matched) : 0.0;
    for (const auto& [worm, sums] : speedSums) {
        WormVelocityError e;
        e.wormId = worm;
        e.samples = speedCounts[worm];
        e.truthMeanPxS = sums.first / e.samples;
        e.trackMeanPxS = sums.second / e.samples;
        e.relError = e.truthMeanPxS > 0.0 ? std::abs(e.trackMeanPxS - e.truthMeanPxS) / e.truthMeanPxS
                                          : std::abs(e.trackMeanPxS);
        m.maxVelocityRelError = std::max(m.maxVelocityRelError, e.relError);
        m.perWorm.push_back(e);
    }
    return m;
}

inline EvalMetrics evaluate(std::span<const TrackedWorm> worms, const GroundTruth& truth,
                            double matchRadiusPx) {
    std::vector<Track> tracks;
    for (const auto& w : worms) tracks.push_back(w.track);
    return evaluate(std::span<const Track>(tracks), truth, matchRadiusPx);
}

}  // namespace gelpad
