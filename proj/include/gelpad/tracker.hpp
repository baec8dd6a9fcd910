#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gelpad/segment.hpp"

namespace gelpad {

enum class TrackState { Active, Terminated };

enum class TerminationReason { None, Gap, Occlusion };

struct TrackPoint {
    int frameIndex = 0;
    double x = 0.0;
    double y = 0.0;

    bool operator==(const TrackPoint&) const = default;
};

struct Track {
    int id = 0;
    int membraneId = 0;
    std::vector<TrackPoint> points;
    TrackState state = TrackState::Active;
    TerminationReason reason = TerminationReason::None;
    int gapCount = 0;

    bool active() const noexcept { return state == TrackState::Active; }
    const TrackPoint& last() const { return points.back(); }

    void terminate(TerminationReason why) {
        state = TrackState::Terminated;
        reason = why;
    }
};

// Which area the occlusion threshold is compared against.
enum class OcclusionArea { Blob, BoundingBox };

struct TrackerConfig {
    double maxAssocDistPx = 25.0;
    int maxGapFrames = 5;
    long mergeAreaPx = 300;
    OcclusionArea occlusionArea = OcclusionArea::Blob;

    void validate() const {
        if (!(maxAssocDistPx > 0.0)) throw std::invalid_argument("tracker: maxAssocDistPx must be > 0");
        if (maxGapFrames < 1) throw std::invalid_argument("tracker: maxGapFrames must be >= 1");
        if (mergeAreaPx < 1) throw std::invalid_argument("tracker: mergeAreaPx must be >= 1");
    }
};

struct OcclusionResult {
    std::vector<Detection> kept;
    std::vector<Detection> dropped;
    std::vector<int> terminatedIds;
};

inline long occlusion_area(const Detection& d, const TrackerConfig& cfg) {
    return cfg.occlusionArea == OcclusionArea::Blob ? d.areaPx : d.bbox.area();
}

// Oversized blobs are withheld from association and end every active track
// of the same membrane whose last centroid falls inside their bounding box.
inline OcclusionResult apply_occlusion_rule(const std::vector<Detection>& detections,
                                            std::vector<Track>& tracks, const TrackerConfig& cfg) {
    OcclusionResult res;
    for (const auto& d : detections) {
        if (occlusion_area(d, cfg) > cfg.mergeAreaPx) res.dropped.push_back(d);
        else res.kept.push_back(d);
    }
    for (auto& t : tracks) {
        if (!t.active()) continue;
        for (const auto& d : res.dropped) {
            if (d.membraneId == t.membraneId && d.bbox.contains(t.last().x, t.last().y)) {
                t.terminate(TerminationReason::Occlusion);
                res.terminatedIds.push_back(t.id);
                break;
            }
        }
    }
    return res;
}

struct Assignment {
    int trackId = 0;
    std::size_t detection = 0;
    double distance = 0.0;
};

struct AssociationResult {
    std::vector<Assignment> matches;
    std::vector<int> newTrackIds;
    std::vector<int> terminatedIds;
};

// Greedy nearest-neighbour association, globally ordered by distance and
// restricted to the same membrane. `nextId` supplies ids for new tracks.
inline AssociationResult associate(std::vector<Track>& tracks,
                                   const std::vector<Detection>& detections,
                                   const TrackerConfig& cfg, int& nextId) {
    cfg.validate();
    AssociationResult res;
    if (!detections.empty()) {
        const int frame = detections.front().frameIndex;
        for (const auto& d : detections) {
            if (d.frameIndex != frame) {
                throw std::invalid_argument("associate: detections span several frames");
            }
        }
        for (const auto& t : tracks) {
            if (t.active() && !t.points.empty() && t.last().frameIndex >= frame) {
                throw std::invalid_argument("associate: detection frame " + std::to_string(frame) +
                                            " is not after track " + std::to_string(t.id));
            }
        }
    }

    std::vector<std::tuple<double, int, std::size_t, std::size_t>> pairs;  // dist, id, track, det
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
        const Track& t = tracks[ti];
        if (!t.active()) continue;
        for (std::size_t di = 0; di < detections.size(); ++di) {
            const Detection& d = detections[di];
            if (d.membraneId != t.membraneId) continue;
            const double dist = std::hypot(d.centroid.x - t.last().x, d.centroid.y - t.last().y);
            if (dist <= cfg.maxAssocDistPx) pairs.emplace_back(dist, t.id, ti, di);
        }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<bool> trackUsed(tracks.size(), false);
    std::vector<bool> detUsed(detections.size(), false);
    for (const auto& [dist, id, ti, di] : pairs) {
        if (trackUsed[ti] || detUsed[di]) continue;
        trackUsed[ti] = true;
        detUsed[di] = true;
        res.matches.push_back({id, di, dist});
    }

    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
        Track& t = tracks[ti];
        if (!t.active()) continue;
        if (trackUsed[ti]) {
            const auto it = std::find_if(res.matches.begin(), res.matches.end(),
                                         [&](const Assignment& a) { return a.trackId == t.id; });
            const Detection& d = detections[it->detection];
            t.points.push_back({d.frameIndex, d.centroid.x, d.centroid.y});
            t.gapCount = 0;
        } else if (++t.gapCount >= cfg.maxGapFrames) {
            t.terminate(TerminationReason::Gap);
            res.terminatedIds.push_back(t.id);
        }
    }

    for (std::size_t di = 0; di < detections.size(); ++di) {
        if (detUsed[di]) continue;
        const Detection& d = detections[di];
        Track t;
        t.id = nextId++;
        t.membraneId = d.membraneId;
        t.points.push_back({d.frameIndex, d.centroid.x, d.centroid.y});
        tracks.push_back(std::move(t));
        res.newTrackIds.push_back(tracks.back().id);
    }
    return res;
}

struct VelocitySeries {
    std::vector<double> pxPerS;
    std::vector<double> umPerS;
    // Empty for tracks with fewer than two points.
    std::optional<double> meanPxPerS;
    std::optional<double> meanUmPerS;
};

// Step speed = centroid displacement * fps / frames elapsed.
inline VelocitySeries compute_velocities(const Track& track, double fps, double umPerPixel) {
    if (!(fps > 0.0)) throw std::invalid_argument("compute_velocities: fps must be > 0");
    VelocitySeries v;
    if (track.points.size() < 2) return v;
    double sum = 0.0;
    for (std::size_t i = 1; i < track.points.size(); ++i) {
        const TrackPoint& a = track.points[i - 1];
        const TrackPoint& b = track.points[i];
        const double frames = static_cast<double>(b.frameIndex - a.frameIndex);
        const double speed = std::hypot(b.x - a.x, b.y - a.y) * fps / frames;
        v.pxPerS.push_back(speed);
        v.umPerS.push_back(speed * umPerPixel);
        sum += speed;
    }
    const double mean = sum / static_cast<double>(v.pxPerS.size());
    v.meanPxPerS = mean;
    v.meanUmPerS = mean * umPerPixel;
    return v;
}

struct TrackedWorm {
    Track track;
    VelocitySeries velocity;
};

// Stateful frame-by-frame tracker.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    const TrackerConfig& config() const noexcept { return cfg_; }
    const std::vector<Track>& tracks() const noexcept { return tracks_; }

    void step(int frameIndex, const std::vector<Detection>& detections) {
        if (frameIndex <= lastFrame_) {
            throw std::invalid_argument("tracker: frame " + std::to_string(frameIndex) +
                                        " out of order after " + std::to_string(lastFrame_));
        }
        for (const auto& d : detections) {
            if (d.frameIndex != frameIndex) {
                throw std::invalid_argument("tracker: detection frame index mismatch");
            }
        }
        lastFrame_ = frameIndex;
        auto occ = apply_occlusion_rule(detections, tracks_, cfg_);
        associate(tracks_, occ.kept, cfg_, nextId_);
    }

    // Tracks still active at the end of the sequence stay active.
    std::vector<Track> finish() const { return tracks_; }

private:
    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    int nextId_ = 1;
    int lastFrame_ = -1;
};

// `perFrame[i]` holds the detections of frame i.
inline std::vector<TrackedWorm> track_sequence(std::span<const std::vector<Detection>> perFrame,
                                               const TrackerConfig& cfg, double fps,
                                               double umPerPixel) {
    Tracker tracker(cfg);
    for (std::size_t i = 0; i < perFrame.size(); ++i) {
        tracker.step(static_cast<int>(i), perFrame[i]);
    }
    std::vector<TrackedWorm> out;
    for (auto& t : tracker.finish()) {
        auto v = compute_velocities(t, fps, umPerPixel);
        out.push_back({std::move(t), std::move(v)});
    }
    return out;
}

}  // namespace gelpad
