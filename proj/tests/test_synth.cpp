#include <gtest/gtest.h>

#include "gelpad/imageio.hpp"
#include "gelpad/segment.hpp"
#include "gelpad/synth.hpp"
#include "scenes.hpp"
#include "support.hpp"

using namespace gelpad;

TEST(SplitMix64, ReferenceVectors) {
    SplitMix64 rng(1234567);
    const std::uint64_t expected[] = {6457827717110365317ULL, 3203168211198807973ULL, 9817491932198370423ULL,
                                      4593380528125082431ULL, 16408922859458223821ULL};
    for (auto e : expected) EXPECT_EQ(rng.next(), e);
}

TEST(SplitMix64, UniformRangeAndGaussianMoments) {
    SplitMix64 rng(7);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Scene, SameSeedSameBytes) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.frameCount = 5;
    cfg.seed = 42;
    const auto a = simulate(cfg), b = simulate(cfg);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(encode_pgm(a.frames[i].image), encode_pgm(b.frames[i].image));
    EXPECT_EQ(a.truth.records, b.truth.records);
    cfg.seed = 43;
    const auto c = simulate(cfg);
    EXPECT_NE(a.frames[0].image, c.frames[0].image);
}

TEST(Scene, NoWormsIsBackgroundAndRings) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.wormsPerMembrane = 0;
    cfg.noiseStd = 0.0;
    cfg.frameCount = 2;
    const auto sim = simulate(cfg);
    EXPECT_TRUE(sim.truth.records.empty());
    EXPECT_EQ(sim.frames[0].image, sim.frames[1].image);
    const auto& img = sim.frames[0].image;
    const auto& m = cfg.membranes[0];
    const int cx = static_cast<int>(std::lround(m.cx)), cy = static_cast<int>(std::lround(m.cy));
    EXPECT_NEAR(img(cx, cy), m.interiorBrightness + cfg.illuminationGradientPerPx * cx, 1.0);
    const int rimX = cx + static_cast<int>(m.r) + 2;
    EXPECT_NEAR(img(rimX, cy), m.rimDarkness + cfg.illuminationGradientPerPx * rimX, 1.0);
    EXPECT_NEAR(img(2, 2), cfg.backgroundBase + cfg.illuminationGradientPerPx * 2, 1.0);
}

TEST(Scene, WormAreaWithinClassifierRange) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.frameCount = 30;
    const auto sim = simulate(cfg);
    long inRange = 0, total = 0;
    for (const auto& f : sim.frames) {
        // Foreground of the default local threshold, strictly inside a membrane.
        Mask m = local_threshold(f.image, ThresholdConfig{});
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) {
                bool inside = false;
                for (const auto& mem : cfg.membranes) inside |= std::hypot(x - mem.cx, y - mem.cy) < mem.r - 3;
                if (!inside) m(x, y) = 0;
            }
        }
        for (const auto& b : connected_components(m)) {
            ++total;
            inRange += b.area >= 200 && b.area <= 300;
        }
    }
    ASSERT_EQ(total, 4 * 30);
    EXPECT_GE(static_cast<double>(inRange) / total, 0.90);
}

TEST(Scene, TruthSpeedMatchesCentroidDisplacement) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.frameCount = 50;
    const auto sim = simulate(cfg);
    std::map<int, const TruthRecord*> prev;
    for (const auto& r : sim.truth.records) {
        auto it = prev.find(r.wormId);
        if (it != prev.end()) {
            const double expect = std::hypot(r.x - it->second->x, r.y - it->second->y) * cfg.fps;
            EXPECT_NEAR(r.speedPxS, expect, 1e-9);
        }
        prev[r.wormId] = &r;
    }
}

TEST(Scene, RigidScriptedSpeedIsExact) {
    const SceneConfig cfg = test::rigid_speed_scene(2.5, 20, 3);
    const auto sim = simulate(cfg);
    for (const auto& r : sim.truth.records) EXPECT_NEAR(r.speedPxS, 25.0, 1e-9);
}

TEST(Scene, WormPixelsStayInsideMembrane) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.frameCount = 200;
    cfg.speedPxPerFrame = 4.0;
    SceneSimulator sim(cfg);
    std::vector<TruthRecord> truth;
    while (!sim.done()) {
        sim.next(truth);
        const auto bodies = sim.current_bodies();
        for (std::size_t w = 0; w < bodies.size(); ++w) {
            const auto& m = cfg.membranes[w];
            for (const auto& p : bodies[w]) {
                ASSERT_LE(std::hypot(p.x - m.cx, p.y - m.cy) + 0.5 * cfg.wormWidthPx, m.r + 1.0);
            }
        }
    }
}

TEST(Scene, ConfigValidation) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.frameCount = 0;
    EXPECT_THROW(simulate(cfg), std::invalid_argument);
    cfg = SceneConfig::four_membrane(512, 512, 30);
    EXPECT_THROW(simulate(cfg), std::invalid_argument);
    cfg = SceneConfig::four_membrane();
    cfg.scripted.push_back({7, 0, 0, 0, 1});
    EXPECT_THROW(simulate(cfg), std::invalid_argument);
}

TEST(Evaluate, TruthAsTracksIsPerfect) {
    SceneConfig cfg = SceneConfig::four_membrane();
    cfg.frameCount = 20;
    const auto sim = simulate(cfg);
    std::map<int, Track> byWorm;
    for (const auto& r : sim.truth.records) {
        auto& t = byWorm[r.wormId];
        t.id = r.wormId;
        t.points.push_back({r.frameIndex, r.x, r.y});
    }
    std::vector<Track> tracks;
    for (auto& [id, t] : byWorm) tracks.push_back(t);
    const auto m = evaluate(std::span<const Track>(tracks), sim.truth, 5.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.idSwitches, 0);
    EXPECT_EQ(m.rmsePx, 0.0);
    EXPECT_NEAR(m.maxVelocityRelError, 0.0, 1e-12);

    for (auto& t : tracks) {
        for (auto& p : t.points) p.x += 1.0;
    }
    const auto shifted = evaluate(std::span<const Track>(tracks), sim.truth, 5.0);
    EXPECT_NEAR(shifted.rmsePx, 1.0, 1e-12);
    EXPECT_EQ(shifted.recall, 1.0);
}

TEST(Evaluate, CountsIdSwitchAndRejectsOutOfRangeFrames) {
    GroundTruth gt;
    gt.frameCount = 4;
    for (int f = 0; f < 4; ++f) gt.records.push_back({f, 1, 0, 10.0 + f, 10.0, 10.0, false});
    Track a, b;
    a.id = 1;
    b.id = 2;
    a.points = {{0, 10, 10}, {1, 11, 10}};
    b.points = {{2, 12, 10}, {3, 13, 10}};
    const std::vector<Track> tracks{a, b};
    const auto m = evaluate(std::span<const Track>(tracks), gt, 5.0);
    EXPECT_EQ(m.idSwitches, 1);
    EXPECT_EQ(m.matched, 4);
    Track c;
    c.points = {{9, 0, 0}};
    EXPECT_THROW(evaluate(std::span<const Track>(std::vector<Track>{c}), gt, 5.0), std::invalid_argument);
}
