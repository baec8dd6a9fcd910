#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gelpad/pipeline.hpp"
#include "gelpad/synth.hpp"

namespace gelpad {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvalThresholds {
    double matchRadiusPx = 5.0;
    double minRecall = 0.95;
    double minPrecision = 0.90;
    int maxIdSwitches = 0;
    double maxRmsePx = 1.5;
    double maxVelocityRelError = 0.05;
};

struct RunPaths {
    std::string input;
    std::string output;
    std::string doseMap;
};

struct RunConfig {
    PipelineConfig pipeline;
    // Tracks shorter than this are left out of velocity summaries.
    int minTrackPoints = 10;
    SceneConfig scene = SceneConfig::four_membrane();
    EvalThresholds eval;
    RunPaths paths;
};

// Two-way binding between a JSON object and struct fields. Reading rejects
// keys that no field claims.
class Binder {
public:
    enum class Mode { Read, Write };

    Binder(Mode mode, nlohmann::json& j, std::string where)
        : mode_(mode), j_(j), where_(std::move(where)) {
        if (mode_ == Mode::Read && !j_.is_object()) {
            throw ConfigError(where_ + ": expected an object");
        }
    }

    template <typename T>
    void field(const char* key, T& value) {
        if (mode_ == Mode::Write) {
            j_[key] = value;
            return;
        }
        claimed_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            value = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    template <typename Fn>
    void section(const char* key, Fn&& fn) {
        if (mode_ == Mode::Write) {
            nlohmann::json sub = nlohmann::json::object();
            Binder b(mode_, sub, where_ + "." + key);
            fn(b);
            j_[key] = std::move(sub);
            return;
        }
        claimed_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        Binder b(mode_, *it, where_ + "." + key);
        fn(b);
        b.finish();
    }

    template <typename T, typename Fn>
    void list(const char* key, std::vector<T>& items, Fn&& fn) {
        if (mode_ == Mode::Write) {
            nlohmann::json arr = nlohmann::json::array();
            for (auto& item : items) {
                nlohmann::json sub = nlohmann::json::object();
                Binder b(mode_, sub, where_ + "." + key + "[]");
                fn(b, item);
                arr.push_back(std::move(sub));
            }
            j_[key] = std::move(arr);
            return;
        }
        claimed_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        if (!it->is_array()) throw ConfigError(where_ + "." + key + ": expected an array");
        items.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            T item{};
            Binder b(mode_, (*it)[i], where_ + "." + key + "[" + std::to_string(i) + "]");
            fn(b, item);
            b.finish();
            items.push_back(std::move(item));
        }
    }

    bool reading() const noexcept { return mode_ == Mode::Read; }
    bool has(const char* key) const { return j_.contains(key); }

    void finish() const {
        if (mode_ != Mode::Read) return;
        for (const auto& [key, _] : j_.items()) {
            if (!claimed_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
        }
    }

private:
    Mode mode_;
    nlohmann::json& j_;
    std::string where_;
    std::set<std::string> claimed_;
};

inline void bind(Binder& b, ChtConfig& c) {
    b.field("downscale", c.downscale);
    b.field("gradPercentile", c.gradPercentile);
    b.field("rMinPx", c.rMinPx);
    b.field("rMaxPx", c.rMaxPx);
    b.field("rStepPx", c.rStepPx);
    b.field("peakFraction", c.peakFraction);
    b.field("minCenterSepPx", c.minCenterSepPx);
    b.field("minGradient", c.minGradient);
    b.field("relGradientFloor", c.relGradientFloor);
    b.field("minScore", c.minScore);
    b.field("borderTolerancePx", c.borderTolerancePx);
    b.field("refine", c.refine);
}

inline void bind(Binder& b, SnakeConfig& c) {
    b.field("nPoints", c.nPoints);
    b.field("alpha", c.alpha);
    b.field("beta", c.beta);
    b.field("gamma", c.gamma);
    b.field("stepSize", c.stepSize);
    b.field("edgeSigma", c.edgeSigma);
    b.field("maxIters", c.maxIters);
    b.field("epsilon", c.epsilon);
}

inline void bind(Binder& b, ThresholdConfig& c) {
    b.field("windowW", c.windowW);
    b.field("windowH", c.windowH);
    b.field("ratio", c.ratio);
}

inline void bind(Binder& b, WormFilterConfig& c) {
    b.field("minAreaPx", c.minAreaPx);
    b.field("maxAreaPx", c.maxAreaPx);
    b.field("minPA", c.minPA);
    b.field("maxPA", c.maxPA);
    b.field("occlusionMaxAreaPx", c.occlusionMaxAreaPx);
}

inline void bind(Binder& b, TrackerConfig& c) {
    b.field("maxAssocDistPx", c.maxAssocDistPx);
    b.field("maxGapFrames", c.maxGapFrames);
    b.field("mergeAreaPx", c.mergeAreaPx);
    std::string mode = c.occlusionArea == OcclusionArea::Blob ? "blob" : "bbox";
    b.field("occlusionArea", mode);
    if (b.reading()) {
        if (mode == "blob") c.occlusionArea = OcclusionArea::Blob;
        else if (mode == "bbox") c.occlusionArea = OcclusionArea::BoundingBox;
        else throw ConfigError("tracker.occlusionArea: expected 'blob' or 'bbox'");
    }
}

inline void bind(Binder& b, SceneConfig& c) {
    b.field("width", c.width);
    b.field("height", c.height);
    double layoutRadius = 0.0;
    b.field("layoutRadiusPx", layoutRadius);
    b.list("membranes", c.membranes, [](Binder& m, MembraneSpec& s) {
        m.field("cx", s.cx);
        m.field("cy", s.cy);
        m.field("r", s.r);
        m.field("rimDarkness", s.rimDarkness);
        m.field("interiorBrightness", s.interiorBrightness);
        m.field("worms", s.worms);
    });
    if (b.reading() && layoutRadius > 0.0) {
        if (b.has("membranes")) throw ConfigError("scene: give either layoutRadiusPx or membranes");
        c.membranes = SceneConfig::four_membrane(c.width, c.height, layoutRadius).membranes;
    }
    b.field("wormsPerMembrane", c.wormsPerMembrane);
    b.field("wormLengthPx", c.wormLengthPx);
    b.field("wormWidthPx", c.wormWidthPx);
    b.field("wormIntensity", c.wormIntensity);
    b.field("speedPxPerFrame", c.speedPxPerFrame);
    b.field("headingNoiseStd", c.headingNoiseStd);
    b.field("undulationAmpPx", c.undulationAmpPx);
    b.field("undulationPeriodFrames", c.undulationPeriodFrames);
    b.field("rimWidthPx", c.rimWidthPx);
    b.field("wallMarginPx", c.wallMarginPx);
    b.field("backgroundBase", c.backgroundBase);
    b.field("illuminationGradientPerPx", c.illuminationGradientPerPx);
    b.field("noiseStd", c.noiseStd);
    b.field("seed", c.seed);
    b.field("fps", c.fps);
    b.field("umPerPixel", c.umPerPixel);
    b.field("frameCount", c.frameCount);
    b.list("scripted", c.scripted, [](Binder& s, ScriptedWorm& w) {
        s.field("membrane", w.membrane);
        s.field("headX", w.headX);
        s.field("headY", w.headY);
        s.field("heading", w.heading);
        s.field("speedPxPerFrame", w.speedPxPerFrame);
    });
}

inline void bind(Binder& b, EvalThresholds& e) {
    b.field("matchRadiusPx", e.matchRadiusPx);
    b.field("minRecall", e.minRecall);
    b.field("minPrecision", e.minPrecision);
    b.field("maxIdSwitches", e.maxIdSwitches);
    b.field("maxRmsePx", e.maxRmsePx);
    b.field("maxVelocityRelError", e.maxVelocityRelError);
}

inline void bind(Binder& b, RunConfig& c) {
    b.section("cht", [&](Binder& s) { bind(s, c.pipeline.cht); });
    b.section("snake", [&](Binder& s) { bind(s, c.pipeline.snake); });
    b.section("threshold", [&](Binder& s) { bind(s, c.pipeline.threshold); });
    b.section("filter", [&](Binder& s) { bind(s, c.pipeline.filter); });
    b.section("tracker", [&](Binder& s) { bind(s, c.pipeline.tracker); });
    b.section("pipeline", [&](Binder& s) {
        s.field("membraneInsetPx", c.pipeline.membraneInsetPx);
        s.field("minTrackPoints", c.minTrackPoints);
    });
    b.section("scene", [&](Binder& s) { bind(s, c.scene); });
    b.section("eval", [&](Binder& s) { bind(s, c.eval); });
    b.section("paths", [&](Binder& s) {
        s.field("input", c.paths.input);
        s.field("output", c.paths.output);
        s.field("doseMap", c.paths.doseMap);
    });
}

// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
// possible, otherwise taken as a string.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;
    }
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("--set: empty key segment in '" + path + "'");
        if (!node->is_object()) throw ConfigError("--set: '" + path + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = nlohmann::json::object();
        start = dot + 1;
    }
}

inline RunConfig config_from_json(nlohmann::json doc) {
    if (doc.is_null()) doc = nlohmann::json::object();
    RunConfig cfg;
    Binder b(Binder::Mode::Read, doc, "config");
    bind(b, cfg);
    b.finish();
    try {
        cfg.pipeline.validate();
        cfg.scene.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.minTrackPoints < 2) throw ConfigError("pipeline.minTrackPoints must be >= 2");
    return cfg;
}

inline nlohmann::json config_to_json(RunConfig cfg) {
    nlohmann::json doc = nlohmann::json::object();
    Binder b(Binder::Mode::Write, doc, "config");
    bind(b, cfg);
    return doc;
}

inline RunConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides = {}) {
    nlohmann::json doc = nlohmann::json::object();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot open config " + path->string());
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config " + path->string() + ": " + e.what());
        }
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return config_from_json(std::move(doc));
}

}  // namespace gelpad
