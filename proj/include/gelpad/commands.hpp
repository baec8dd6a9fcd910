#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gelpad/assay.hpp"
#include "gelpad/config.hpp"
#include "gelpad/formats.hpp"
#include "gelpad/imageio.hpp"
#include "gelpad/pipeline.hpp"
#include "gelpad/synth.hpp"

namespace gelpad::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kIoError = 2,
    kDetectionFailure = 3,
    kEvalFailure = 4,
};

struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides;
    std::optional<std::filesystem::path> out;
    int threads = 1;
    bool verbose = false;
    std::ostream* out_stream = &std::cout;
    std::ostream* err_stream = &std::cerr;

    std::ostream& log() const { return *out_stream; }
    std::ostream& err() const { return *err_stream; }
};

// Failure carrying the exit code it maps to.
class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex errorMutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(errorMutex);
                    if (!error) error = std::current_exception();
                    next = n;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

inline std::filesystem::path require_out(const CommonOptions& o, const RunConfig& cfg) {
    if (o.out) return *o.out;
    if (!cfg.paths.output.empty()) return cfg.paths.output;
    throw ConfigError("no output directory (use --out or paths.output)");
}

inline std::filesystem::path require_input(const std::optional<std::filesystem::path>& flag,
                                           const std::string& fromConfig, const char* what) {
    std::filesystem::path p;
    if (flag) p = *flag;
    else if (!fromConfig.empty()) p = fromConfig;
    else throw ConfigError(std::string("no ") + what + " given");
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
    return p;
}

// Resolved configuration without paths, so that logs from runs into different
// directories compare equal.
inline std::string config_artifact(RunConfig cfg) {
    cfg.paths = {};
    auto j = config_to_json(cfg);
    j.erase("paths");
    return j.dump(2) + "\n";
}

// Translates exceptions into exit codes and prints the message.
template <typename Fn>
int guarded(const CommonOptions& o, Fn&& fn) {
    try {
        return fn();
    } catch (const CommandError& e) {
        o.err() << "error: " << e.what() << "\n";
        return e.code();
    } catch (const ConfigError& e) {
        o.err() << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        o.err() << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const PgmError& e) {
        o.err() << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const CsvError& e) {
        o.err() << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        o.err() << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        o.err() << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}

// ---------------------------------------------------------------------------
// synth

inline int cmd_synth(const CommonOptions& o) {
    return guarded(o, [&] {
        const RunConfig cfg = load_config(o.config, o.overrides);
        const auto dir = require_out(o, cfg);
        ensure_directory(dir);

        SequenceManifest manifest;
        manifest.fps = cfg.scene.fps;
        manifest.umPerPixel = cfg.scene.umPerPixel;
        manifest.frameCount = cfg.scene.frameCount;

        SceneSimulator sim(cfg.scene);
        GroundTruth truth;
        truth.circles = sim.circles();
        truth.frameCount = cfg.scene.frameCount;
        truth.fps = cfg.scene.fps;
        while (!sim.done()) {
            Frame f = sim.next(truth.records);
            write_pgm(dir / manifest.frame_name(f.index), f.image);
            if (o.verbose && (f.index + 1) % 100 == 0) {
                o.err() << "synth: " << f.index + 1 << "/" << manifest.frameCount << " frames\n";
            }
        }
        write_manifest(dir / "manifest.json", manifest);
        write_text_file(dir / "truth.csv", truth_csv(truth));
        write_text_file(dir / "truth_circles.csv", truth_circles_csv(truth.circles));
        write_text_file(dir / "config.json", config_artifact(cfg));

        int worms = 0;
        for (std::size_t i = 0; i < cfg.scene.membranes.size(); ++i) worms += cfg.scene.worms_in(i);
        worms += static_cast<int>(cfg.scene.scripted.size());
        o.log() << "synth: " << cfg.scene.width << "x" << cfg.scene.height << ", "
                << cfg.scene.membranes.size() << " membranes, " << worms << " worms, "
                << manifest.frameCount << " frames at " << manifest.fps << " fps, seed "
                << cfg.scene.seed << " -> " << dir.string() << "\n";
        return kOk;
    });
}

// ---------------------------------------------------------------------------
// Sequence processing shared by detect, run

struct SequenceResult {
    SequenceManifest manifest;
    MembraneSet membranes;
    std::vector<std::vector<Detection>> detections;  // per frame
};

// Membranes from frame 0, then per-frame segmentation. Frames are decoded in
// batches so memory stays bounded; segmentation inside a batch runs on the
// worker pool.
inline SequenceResult detect_sequence(const std::filesystem::path& dir, const RunConfig& cfg, int threads,
                                      const CommonOptions& o) {
    SequenceResult res;
    FrameSequence seq = open_sequence(dir);
    res.manifest = seq.manifest();
    {
        const Frame first = seq.frame_at(0);
        res.membranes = detect_membranes(first, cfg.pipeline);
    }
    if (res.membranes.circles.empty()) {
        throw CommandError(kDetectionFailure, "no membranes found in " + dir.string());
    }
    if (o.verbose) {
        o.err() << "detect: " << res.membranes.circles.size() << " membranes in " << dir.string() << "\n";
    }
    res.detections.resize(static_cast<std::size_t>(seq.size()));
    const std::size_t batch = static_cast<std::size_t>(std::max(1, threads)) * 8;
    std::vector<Frame> frames;
    for (;;) {
        frames.clear();
        while (frames.size() < batch) {
            auto f = seq.next();
            if (!f) break;
            frames.push_back(std::move(*f));
        }
        if (frames.empty()) break;
        parallel_for(frames.size(), threads, [&](std::size_t i) {
            const Frame& f = frames[i];
            res.detections[static_cast<std::size_t>(f.index)] =
                segment_frame(f, res.membranes.masks, cfg.pipeline.threshold, cfg.pipeline.filter);
        });
    }
    return res;
}

struct TrackResult {
    std::vector<TrackedWorm> all;
    std::vector<TrackedWorm> kept;  // tracks with at least minTrackPoints points
};

inline TrackResult track_detections(const std::vector<std::vector<Detection>>& perFrame,
                                    const SequenceManifest& m, const RunConfig& cfg) {
    TrackResult r;
    r.all = track_sequence(perFrame, cfg.pipeline.tracker, m.fps, m.umPerPixel);
    for (const auto& w : r.all) {
        if (static_cast<int>(w.track.points.size()) >= cfg.minTrackPoints) r.kept.push_back(w);
    }
    return r;
}

inline void write_tracks(const std::filesystem::path& out, const TrackResult& tr, const SequenceManifest& m,
                         const CommonOptions& o) {
    const auto tracksDir = out / "tracks";
    ensure_directory(tracksDir);
    for (const auto& entry : std::filesystem::directory_iterator(tracksDir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("track_", 0) == 0 && entry.path().extension() == ".csv") {
            std::filesystem::remove(entry.path());
        }
    }
    for (const auto& w : tr.kept) {
        write_text_file(tracksDir / track_file_name(w.track.id), track_csv(w, m.fps));
    }
    write_text_file(out / "velocity_summary.csv", velocity_summary_csv(tr.kept));
    if (tr.kept.empty()) {
        o.err() << "warning: no worms found\n";
        write_text_file(out / "population.csv", population_csv(VelocitySummary{}));
    } else {
        write_text_file(out / "population.csv", population_csv(summarize_velocities(tr.kept)));
    }
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
    std::optional<std::filesystem::path> input;
};

inline int cmd_detect(const CommonOptions& o, const DetectArgs& a) {
    return guarded(o, [&] {
        const RunConfig cfg = load_config(o.config, o.overrides);
        const auto in = require_input(a.input, cfg.paths.input, "input sequence");
        const auto out = require_out(o, cfg);
        ensure_directory(out);
        const SequenceResult res = detect_sequence(in, cfg, o.threads, o);
        write_text_file(out / "circles.csv", circles_csv(res.membranes.circles));
        write_text_file(out / "detections.csv", detections_csv(res.detections));
        write_manifest(out / "manifest.json", res.manifest);
        std::size_t n = 0;
        for (const auto& f : res.detections) n += f.size();
        o.log() << "detect: " << res.membranes.circles.size() << " membranes, " << n << " detections over "
                << res.detections.size() << " frames\n";
        return kOk;
    });
}

// ---------------------------------------------------------------------------
// track

struct TrackArgs {
    std::optional<std::filesystem::path> input;  // directory written by detect
    std::optional<std::filesystem::path> detections;
    std::optional<std::filesystem::path> manifest;
};

inline int cmd_track(const CommonOptions& o, const TrackArgs& a) {
    return guarded(o, [&] {
        const RunConfig cfg = load_config(o.config, o.overrides);
        std::filesystem::path detPath, manPath;
        if (a.detections) {
            detPath = *a.detections;
        } else {
            detPath = require_input(a.input, cfg.paths.input, "detections directory") / "detections.csv";
        }
        if (a.manifest) manPath = *a.manifest;
        else manPath = detPath.parent_path() / "manifest.json";
        if (!std::filesystem::exists(detPath)) throw ConfigError("detections not found: " + detPath.string());
        if (!std::filesystem::exists(manPath)) throw ConfigError("manifest not found: " + manPath.string());

        const SequenceManifest m = read_manifest(manPath);
        const auto perFrame = parse_detections(read_csv(detPath), m.frameCount);
        const auto out = require_out(o, cfg);
        ensure_directory(out);
        const TrackResult tr = track_detections(perFrame, m, cfg);
        write_tracks(out, tr, m, o);
        o.log() << "track: " << tr.all.size() << " tracks, " << tr.kept.size() << " written\n";
        return kOk;
    });
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> doseMap;
};

struct ConditionResult {
    TrackResult tracks;
    std::optional<VelocitySummary> summary;
};

inline void write_assay(const std::filesystem::path& out, const std::vector<AssayCondition>& conditions,
                        const CommonOptions& o) {
    const AssayReport rep = assay_report(conditions);
    write_text_file(out / "dose_points.csv", rep.dosePointsCsv);
    write_text_file(out / "hill_fits.csv", rep.fitsCsv);
    write_text_file(out / "hill_plot.csv", rep.plotCsv);
    write_text_file(out / "assay_notes.txt", rep.notes);
    for (const auto& c : conditions) {
        if (c.fit) {
            o.log() << "assay: " << c.name << " ec50 " << fmt6(c.fit->ec50) << " uM, hill slope "
                    << fmt6(c.fit->hillSlope) << (c.fit->converged ? "" : " (not converged)") << "\n";
        }
    }
}

inline int run_single(const CommonOptions& o, const RunConfig& cfg, const std::filesystem::path& in,
                      const std::filesystem::path& out) {
    const SequenceResult res = detect_sequence(in, cfg, o.threads, o);
    const TrackResult tr = track_detections(res.detections, res.manifest, cfg);
    write_text_file(out / "circles.csv", circles_csv(res.membranes.circles));
    write_tracks(out, tr, res.manifest, o);
    write_text_file(out / "config.json", config_artifact(cfg));
    o.log() << "run: " << res.membranes.circles.size() << " membranes, " << tr.kept.size() << " tracks over "
            << res.manifest.frameCount << " frames\n";
    return kOk;
}

inline int run_dose_series(const CommonOptions& o, const RunConfig& cfg, const std::filesystem::path& in,
                           const std::filesystem::path& doseMapPath, const std::filesystem::path& out) {
    const auto doses = parse_dose_map(read_csv(doseMapPath));
    if (doses.empty()) throw ConfigError("dose map is empty");
    int controls = 0;
    for (const auto& d : doses) {
        if (d.concentration == 0.0) ++controls;
        if (!std::filesystem::is_directory(in / d.condition)) {
            throw ConfigError("condition directory not found: " + (in / d.condition).string());
        }
    }
    if (controls != 1) throw ConfigError("dose map needs exactly one control (concentration 0)");

    // Conditions are independent sequences: one worker each, results merged
    // in dose-map order.
    std::vector<ConditionResult> results(doses.size());
    std::vector<std::string> errors(doses.size());
    std::vector<int> codes(doses.size(), kOk);
    CommonOptions inner = o;
    inner.threads = 1;
    parallel_for(doses.size(), o.threads, [&](std::size_t i) {
        try {
            const SequenceResult res = detect_sequence(in / doses[i].condition, cfg, 1, inner);
            results[i].tracks = track_detections(res.detections, res.manifest, cfg);
            if (!results[i].tracks.kept.empty()) {
                results[i].summary = summarize_velocities(results[i].tracks.kept);
            }
            const auto sub = out / doses[i].condition;
            ensure_directory(sub);
            write_text_file(sub / "circles.csv", circles_csv(res.membranes.circles));
            std::ostringstream sink;
            CommonOptions quiet = inner;
            quiet.err_stream = &sink;
            write_tracks(sub, results[i].tracks, res.manifest, quiet);
        } catch (const CommandError& e) {
            codes[i] = e.code();
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < doses.size(); ++i) {
        if (codes[i] != kOk) throw CommandError(codes[i], doses[i].condition + ": " + errors[i]);
    }

    const auto controlIt = std::find_if(doses.begin(), doses.end(),
                                        [](const DoseMapEntry& d) { return d.concentration == 0.0; });
    const std::size_t ci = static_cast<std::size_t>(controlIt - doses.begin());
    if (!results[ci].summary) throw CommandError(kDetectionFailure, "no worms tracked in the control condition");

    AssayCondition cond;
    cond.name = std::filesystem::absolute(in).lexically_normal().filename().string();
    if (cond.name.empty()) cond.name = std::filesystem::absolute(in).parent_path().filename().string();
    for (std::size_t i = 0; i < doses.size(); ++i) {
        if (!results[i].summary) {
            o.err() << "warning: no worms tracked in " << doses[i].condition << "; condition skipped\n";
            continue;
        }
        cond.points.push_back({doses[i].concentration, percent_response(*results[i].summary, *results[ci].summary)});
    }
    std::sort(cond.points.begin(), cond.points.end(),
              [](const DosePoint& a, const DosePoint& b) { return a.concentration < b.concentration; });
    try {
        cond.fit = fit_hill(cond.points);
    } catch (const AssayError& e) {
        o.err() << "warning: " << e.what() << "\n";
    }
    write_assay(out, {cond}, o);
    write_text_file(out / "config.json", config_artifact(cfg));
    o.log() << "run: " << doses.size() << " conditions\n";
    return kOk;
}

inline int cmd_run(const CommonOptions& o, const RunArgs& a) {
    return guarded(o, [&] {
        const RunConfig cfg = load_config(o.config, o.overrides);
        const auto in = require_input(a.input, cfg.paths.input, "input");
        const auto out = require_out(o, cfg);
        std::optional<std::filesystem::path> doseMap = a.doseMap;
        if (!doseMap && !cfg.paths.doseMap.empty()) doseMap = cfg.paths.doseMap;
        if (doseMap && !std::filesystem::exists(*doseMap)) {
            throw ConfigError("dose map not found: " + doseMap->string());
        }
        ensure_directory(out);
        if (doseMap) return run_dose_series(o, cfg, in, *doseMap, out);
        return run_single(o, cfg, in, out);
    });
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
    std::optional<std::filesystem::path> input;  // dose-point CSV
    std::string condition = "assay";
};

inline int cmd_analyze(const CommonOptions& o, const AnalyzeArgs& a) {
    return guarded(o, [&] {
        const RunConfig cfg = load_config(o.config, o.overrides);
        const auto in = require_input(a.input, cfg.paths.input, "dose-point CSV");
        const auto out = require_out(o, cfg);
        auto conditions = parse_dose_points(read_csv(in), a.condition);
        if (conditions.empty()) throw ConfigError("no dose points in " + in.string());
        for (auto& c : conditions) {
            try {
                c.fit = fit_hill(c.points);
            } catch (const AssayError& e) {
                o.err() << "warning: " << c.name << ": " << e.what() << "\n";
            }
        }
        ensure_directory(out);
        write_assay(out, conditions, o);
        return kOk;
    });
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::optional<std::filesystem::path> tracks;
    std::optional<std::filesystem::path> truth;
    std::optional<double> matchRadiusPx;
    std::optional<double> fps;
};

inline std::vector<Track> read_track_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("track_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Track> tracks;
    for (const auto& f : files) {
        const std::string stem = f.stem().string().substr(6);
        int id = 0;
        try {
            id = static_cast<int>(cell_long(stem));
        } catch (const CsvError&) {
            throw CsvError("track file name without numeric id: " + f.string());
        }
        tracks.push_back(parse_track(read_csv(f), id));
    }
    return tracks;
}

inline bool thresholds_met(const EvalMetrics& m, const EvalThresholds& t, std::vector<std::string>& failed) {
    if (m.recall < t.minRecall) failed.push_back("recall " + fmt6(m.recall) + " < " + fmt6(t.minRecall));
    if (m.precision < t.minPrecision) {
        failed.push_back("precision " + fmt6(m.precision) + " < " + fmt6(t.minPrecision));
    }
    if (m.idSwitches > t.maxIdSwitches) {
        failed.push_back("id switches " + std::to_string(m.idSwitches) + " > " + std::to_string(t.maxIdSwitches));
    }
    if (m.rmsePx > t.maxRmsePx) failed.push_back("rmse " + fmt6(m.rmsePx) + " > " + fmt6(t.maxRmsePx));
    if (m.maxVelocityRelError > t.maxVelocityRelError) {
        failed.push_back("velocity error " + fmt6(m.maxVelocityRelError) + " > " + fmt6(t.maxVelocityRelError));
    }
    return failed.empty();
}

inline int cmd_eval(const CommonOptions& o, const EvalArgs& a) {
    return guarded(o, [&] {
        const RunConfig cfg = load_config(o.config, o.overrides);
        const auto tracksDir = require_input(a.tracks, "", "tracks directory");
        const auto truthPath = require_input(a.truth, "", "truth file");
        const double radius = a.matchRadiusPx.value_or(cfg.eval.matchRadiusPx);
        if (!(radius > 0.0)) throw ConfigError("match radius must be > 0");

        GroundTruth truth;
        truth.records = parse_truth(read_csv(truthPath));
        const auto manifestPath = truthPath.parent_path() / "manifest.json";
        if (a.fps) {
            truth.fps = *a.fps;
        } else if (std::filesystem::exists(manifestPath)) {
            truth.fps = read_manifest(manifestPath).fps;
        } else {
            truth.fps = cfg.scene.fps;
        }
        if (!(truth.fps > 0.0)) throw ConfigError("fps must be > 0");
        int maxFrame = -1;
        for (const auto& r : truth.records) maxFrame = std::max(maxFrame, r.frameIndex);
        if (std::filesystem::exists(manifestPath)) {
            truth.frameCount = read_manifest(manifestPath).frameCount;
        } else {
            truth.frameCount = maxFrame + 1;
        }

        const auto tracks = read_track_dir(tracksDir);
        EvalMetrics m;
        try {
            m = evaluate(std::span<const Track>(tracks), truth, radius);
        } catch (const std::invalid_argument& e) {
            throw CommandError(kConfigError, std::string("mismatched inputs: ") + e.what());
        }
        const std::string csv = metrics_csv(m);
        o.log() << csv;
        const auto out = o.out ? std::optional(*o.out)
                               : (cfg.paths.output.empty() ? std::nullopt
                                                           : std::optional<std::filesystem::path>(cfg.paths.output));
        if (out) {
            ensure_directory(*out);
            write_text_file(*out / "metrics.csv", csv);
        }
        std::vector<std::string> failed;
        if (!thresholds_met(m, cfg.eval, failed)) {
            for (const auto& f : failed) o.err() << "threshold not met: " << f << "\n";
            return kEvalFailure;
        }
        return kOk;
    });
}

}  // namespace gelpad::cli
