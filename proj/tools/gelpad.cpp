// gelpad command-line entry point.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gelpad/commands.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gelpad::cli;

struct Flags {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    int threads = 1;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON run configuration");
    cmd->add_option("--set", f.overrides, "Override a config value, e.g. --set cht.rMaxPx=120")
        ->take_all();
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--threads", f.threads, "Worker threads")->envname("GELPAD_THREADS")->check(CLI::PositiveNumber);
    cmd->add_flag("--verbose", f.verbose, "Progress messages on stderr");
}

CommonOptions to_common(const Flags& f) {
    CommonOptions o;
    if (!f.config.empty()) o.config = fs::path(f.config);
    o.overrides = f.overrides;
    if (!f.out.empty()) o.out = fs::path(f.out);
    o.threads = f.threads;
    o.verbose = f.verbose;
    return o;
}

std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gelpad: membrane detection, worm tracking and dose-response analysis"};
    app.require_subcommand(1);
    Flags flags;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic scene with ground truth");
    add_common(synth, flags);

    std::string input, doseMap, detections, manifest, tracks, truth, condition = "assay";
    std::optional<double> matchRadius, fps;

    auto* detect = app.add_subcommand("detect", "Detect membranes and segment worms in a sequence");
    add_common(detect, flags);
    detect->add_option("--input", input, "Sequence directory with manifest.json");

    auto* track = app.add_subcommand("track", "Track worms from a detections file");
    add_common(track, flags);
    track->add_option("--input", input, "Directory written by detect");
    track->add_option("--detections", detections, "Detections CSV");
    track->add_option("--manifest", manifest, "Sequence manifest (fps, scale)");

    auto* run = app.add_subcommand("run", "Full pipeline: membranes, worms, tracks, velocities");
    add_common(run, flags);
    run->add_option("--input", input, "Sequence directory, or a dose-series directory with --dose-map");
    run->add_option("--dose-map", doseMap, "CSV with condition,concentration_uM");

    auto* analyze = app.add_subcommand("analyze", "Fit dose-response curves to dose points");
    add_common(analyze, flags);
    analyze->add_option("--input", input, "CSV with concentration_uM,percent_response[,condition]");
    analyze->add_option("--condition", condition, "Condition name when the CSV has no condition column");

    auto* eval = app.add_subcommand("eval", "Score tracks against ground truth");
    add_common(eval, flags);
    eval->add_option("--tracks", tracks, "Directory of track_*.csv files")->required();
    eval->add_option("--truth", truth, "Ground-truth CSV")->required();
    eval->add_option("--match-radius", matchRadius, "Match radius in px");
    eval->add_option("--fps", fps, "Frame rate when no manifest sits next to the truth file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    const CommonOptions o = to_common(flags);
    if (synth->parsed()) return cmd_synth(o);
    if (detect->parsed()) return cmd_detect(o, {opt_path(input)});
    if (track->parsed()) return cmd_track(o, {opt_path(input), opt_path(detections), opt_path(manifest)});
    if (run->parsed()) return cmd_run(o, {opt_path(input), opt_path(doseMap)});
    if (analyze->parsed()) return cmd_analyze(o, {opt_path(input), condition});
    if (eval->parsed()) return cmd_eval(o, {opt_path(tracks), opt_path(truth), matchRadius, fps});
    return kConfigError;
}
