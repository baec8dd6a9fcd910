#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gelpad/assay.hpp"
#include "gelpad/imageio.hpp"
#include "gelpad/membrane.hpp"
#include "gelpad/segment.hpp"
#include "gelpad/synth.hpp"
#include "gelpad/tracker.hpp"

namespace gelpad {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Minimal CSV table: a header row and comma-separated cells, no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    int require(const std::string& name) const {
        const int c = column(name);
        if (c < 0) throw CsvError("missing column '" + name + "'");
        return c;
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw CsvError("row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (first) throw CsvError("empty CSV");
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_csv(ss.str());
    } catch (const CsvError& e) {
        throw CsvError(path.string() + ": " + e.what());
    }
}

inline double cell_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw CsvError("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw CsvError("bad number '" + s + "'");
    }
}

inline long cell_long(const std::string& s) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw CsvError("bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw CsvError("bad integer '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// Circles

inline std::string circles_csv(const std::vector<Circle>& circles) {
    std::string s = "cx,cy,r,votes\n";
    for (const auto& c : circles) {
        s += fmt6(c.cx) + "," + fmt6(c.cy) + "," + fmt6(c.r) + "," + std::to_string(c.votes) + "\n";
    }
    return s;
}

inline std::string truth_circles_csv(const std::vector<Circle>& circles) {
    std::string s = "cx,cy,r\n";
    for (const auto& c : circles) s += fmt6(c.cx) + "," + fmt6(c.cy) + "," + fmt6(c.r) + "\n";
    return s;
}

inline std::vector<Circle> parse_circles(const CsvTable& t) {
    const int cx = t.require("cx"), cy = t.require("cy"), r = t.require("r");
    const int votes = t.column("votes");
    std::vector<Circle> out;
    for (const auto& row : t.rows) {
        Circle c;
        c.cx = cell_double(row[cx]);
        c.cy = cell_double(row[cy]);
        c.r = cell_double(row[r]);
        if (votes >= 0) c.votes = cell_long(row[votes]);
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Detections. The bounding box and occlusion flag follow the core columns so
// that tracking can be rerun from the file alone.

inline std::string detections_csv(const std::vector<std::vector<Detection>>& perFrame) {
    std::string s = "frame,membraneId,cx,cy,area,perimeter,xmin,ymin,xmax,ymax,occluded\n";
    for (const auto& frame : perFrame) {
        for (const auto& d : frame) {
            s += std::to_string(d.frameIndex) + "," + std::to_string(d.membraneId) + "," +
                 fmt6(d.centroid.x) + "," + fmt6(d.centroid.y) + "," + std::to_string(d.areaPx) + "," +
                 std::to_string(d.perimeterPx) + "," + std::to_string(d.bbox.xmin) + "," +
                 std::to_string(d.bbox.ymin) + "," + std::to_string(d.bbox.xmax) + "," +
                 std::to_string(d.bbox.ymax) + "," + (d.occluded ? "1" : "0") + "\n";
        }
    }
    return s;
}

// Returns detections grouped by frame; the outer size is frameCount.
inline std::vector<std::vector<Detection>> parse_detections(const CsvTable& t, int frameCount) {
    const int f = t.require("frame"), m = t.require("membraneId"), cx = t.require("cx"),
              cy = t.require("cy"), area = t.require("area"), per = t.require("perimeter");
    const int x0 = t.column("xmin"), y0 = t.column("ymin"), x1 = t.column("xmax"), y1 = t.column("ymax"),
              occ = t.column("occluded");
    std::vector<std::vector<Detection>> out(static_cast<std::size_t>(frameCount));
    for (const auto& row : t.rows) {
        Detection d;
        d.frameIndex = static_cast<int>(cell_long(row[f]));
        if (d.frameIndex < 0 || d.frameIndex >= frameCount) {
            throw CsvError("detection frame " + row[f] + " outside [0," + std::to_string(frameCount) + ")");
        }
        d.membraneId = static_cast<int>(cell_long(row[m]));
        d.centroid = {cell_double(row[cx]), cell_double(row[cy])};
        d.areaPx = cell_long(row[area]);
        d.perimeterPx = cell_long(row[per]);
        if (x0 >= 0 && y0 >= 0 && x1 >= 0 && y1 >= 0) {
            d.bbox = {static_cast<int>(cell_long(row[x0])), static_cast<int>(cell_long(row[y0])),
                      static_cast<int>(cell_long(row[x1])), static_cast<int>(cell_long(row[y1]))};
        } else {
            const int px = static_cast<int>(std::lround(d.centroid.x));
            const int py = static_cast<int>(std::lround(d.centroid.y));
            d.bbox = {px, py, px, py};
        }
        if (occ >= 0) d.occluded = cell_long(row[occ]) != 0;
        out[static_cast<std::size_t>(d.frameIndex)].push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tracks

inline std::string track_file_name(int trackId) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "track_%04d.csv", trackId);
    return buf;
}

inline std::string track_csv(const TrackedWorm& w, double fps) {
    std::string s = "frame_index,time_s,cx_px,cy_px,velocity_px_s,velocity_um_s\n";
    const auto& pts = w.track.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s += std::to_string(pts[i].frameIndex) + "," + fmt6(pts[i].frameIndex / fps) + "," +
             fmt6(pts[i].x) + "," + fmt6(pts[i].y) + ",";
        if (i > 0) s += fmt6(w.velocity.pxPerS[i - 1]) + "," + fmt6(w.velocity.umPerS[i - 1]);
        else s += ",";
        s += "\n";
    }
    return s;
}

inline Track parse_track(const CsvTable& t, int id) {
    const int f = t.require("frame_index"), x = t.require("cx_px"), y = t.require("cy_px");
    Track tr;
    tr.id = id;
    for (const auto& row : t.rows) {
        TrackPoint p{static_cast<int>(cell_long(row[f])), cell_double(row[x]), cell_double(row[y])};
        if (!tr.points.empty() && p.frameIndex <= tr.points.back().frameIndex) {
            throw CsvError("track " + std::to_string(id) + ": frames not increasing");
        }
        tr.points.push_back(p);
    }
    return tr;
}

inline const char* reason_name(const Track& t) {
    if (t.active()) return "active";
    switch (t.reason) {
        case TerminationReason::Gap: return "gap";
        case TerminationReason::Occlusion: return "occlusion";
        default: return "terminated";
    }
}

inline std::string velocity_summary_csv(const std::vector<TrackedWorm>& worms) {
    std::string s =
        "track_id,membrane_id,n_points,first_frame,last_frame,state,mean_velocity_px_s,mean_velocity_um_s\n";
    for (const auto& w : worms) {
        const auto& t = w.track;
        s += std::to_string(t.id) + "," + std::to_string(t.membraneId) + "," +
             std::to_string(t.points.size()) + "," + std::to_string(t.points.front().frameIndex) + "," +
             std::to_string(t.points.back().frameIndex) + "," + reason_name(t) + "," +
             (w.velocity.meanPxPerS ? fmt6(*w.velocity.meanPxPerS) : std::string()) + "," +
             (w.velocity.meanUmPerS ? fmt6(*w.velocity.meanUmPerS) : std::string()) + "\n";
    }
    return s;
}

inline std::string population_csv(const VelocitySummary& s) {
    return "n,mean_velocity_um_s,std_velocity_um_s\n" + std::to_string(s.n) + "," +
           (s.n ? fmt6(s.populationMean) : std::string()) + "," +
           (s.stdDefined ? fmt6(s.populationStd) : std::string()) + "\n";
}

// ---------------------------------------------------------------------------
// Ground truth

inline std::string truth_csv(const GroundTruth& g) {
    std::string s = "frame_index,worm_id,membrane_id,x_px,y_px,speed_px_s,merged\n";
    for (const auto& r : g.records) {
        s += std::to_string(r.frameIndex) + "," + std::to_string(r.wormId) + "," +
             std::to_string(r.membraneId) + "," + fmt6(r.x) + "," + fmt6(r.y) + "," + fmt6(r.speedPxS) +
             "," + (r.merged ? "1" : "0") + "\n";
    }
    return s;
}

inline std::vector<TruthRecord> parse_truth(const CsvTable& t) {
    const int f = t.require("frame_index"), w = t.require("worm_id"), m = t.require("membrane_id"),
              x = t.require("x_px"), y = t.require("y_px"), sp = t.require("speed_px_s"),
              mg = t.require("merged");
    std::vector<TruthRecord> out;
    for (const auto& row : t.rows) {
        out.push_back({static_cast<int>(cell_long(row[f])), static_cast<int>(cell_long(row[w])),
                       static_cast<int>(cell_long(row[m])), cell_double(row[x]), cell_double(row[y]),
                       cell_double(row[sp]), cell_long(row[mg]) != 0});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

inline std::string metrics_csv(const EvalMetrics& m) {
    std::string s = "metric,value\n";
    s += "truth_count," + std::to_string(m.truthCount) + "\n";
    s += "predicted_count," + std::to_string(m.predictedCount) + "\n";
    s += "matched," + std::to_string(m.matched) + "\n";
    s += "recall," + fmt6(m.recall) + "\n";
    s += "precision," + fmt6(m.precision) + "\n";
    s += "id_switches," + std::to_string(m.idSwitches) + "\n";
    s += "rmse_px," + fmt6(m.rmsePx) + "\n";
    s += "max_velocity_rel_error," + fmt6(m.maxVelocityRelError) + "\n";
    for (const auto& w : m.perWorm) {
        s += "worm_" + std::to_string(w.wormId) + "_velocity_rel_error," + fmt6(w.relError) + "\n";
    }
    return s;
}

inline std::map<std::string, double> parse_metrics(const CsvTable& t) {
    const int k = t.require("metric"), v = t.require("value");
    std::map<std::string, double> out;
    for (const auto& row : t.rows) out[row[k]] = cell_double(row[v]);
    return out;
}

// ---------------------------------------------------------------------------
// Assay inputs

struct DoseMapEntry {
    std::string condition;
    double concentration = 0.0;
};

inline std::vector<DoseMapEntry> parse_dose_map(const CsvTable& t) {
    const int c = t.require("condition"), k = t.require("concentration_uM");
    std::vector<DoseMapEntry> out;
    for (const auto& row : t.rows) {
        const double conc = cell_double(row[k]);
        if (conc < 0.0) throw CsvError("negative concentration for " + row[c]);
        out.push_back({row[c], conc});
    }
    return out;
}

// Dose points grouped by condition. Files without a condition column form a
// single group named `defaultName`.
inline std::vector<AssayCondition> parse_dose_points(const CsvTable& t, const std::string& defaultName) {
    const int k = t.require("concentration_uM"), r = t.require("percent_response");
    const int c = t.column("condition");
    std::vector<AssayCondition> out;
    for (const auto& row : t.rows) {
        const std::string name = c >= 0 ? row[c] : defaultName;
        auto it = std::find_if(out.begin(), out.end(), [&](const AssayCondition& a) { return a.name == name; });
        if (it == out.end()) {
            out.push_back({name, {}, std::nullopt});
            it = out.end() - 1;
        }
        it->points.push_back({cell_double(row[k]), cell_double(row[r])});
    }
    return out;
}

}  // namespace gelpad
