#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "gelpad/image.hpp"
#include "gelpad/vision.hpp"

namespace gelpad {

struct ThresholdConfig {
    int windowW = 100;
    int windowH = 100;
    double ratio = 0.90;

    void validate() const {
        if (windowW < 3 || windowH < 3) throw std::invalid_argument("threshold: window must be >= 3");
        if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("threshold: ratio must be in (0, 1)");
    }
};

struct WormFilterConfig {
    long minAreaPx = 200;
    long maxAreaPx = 300;
    double minPA = 0.5;
    double maxPA = 1.0;
    // Blobs larger than maxAreaPx but up to this size, with a worm-like P/A,
    // are reported as occlusion candidates for the tracker. 0 disables.
    long occlusionMaxAreaPx = 900;

    void validate() const {
        if (!(minAreaPx > 0 && minAreaPx < maxAreaPx)) {
            throw std::invalid_argument("filter: need 0 < minAreaPx < maxAreaPx");
        }
        if (!(minPA > 0.0 && minPA < maxPA)) throw std::invalid_argument("filter: need 0 < minPA < maxPA");
        if (occlusionMaxAreaPx < 0) throw std::invalid_argument("filter: occlusionMaxAreaPx must be >= 0");
    }
};

struct Detection {
    int frameIndex = 0;
    Point2 centroid;
    BoundingBox bbox;
    long areaPx = 0;
    long perimeterPx = 0;
    int membraneId = 0;
    // Oversized worm-like blob, most likely touching worms.
    bool occluded = false;

    bool operator==(const Detection&) const = default;
};

struct MembraneMask {
    int id = 0;
    Mask mask;
    BoundingBox bbox;  // foreground extent of `mask`
};

inline MembraneMask make_membrane_mask(int id, Mask mask) {
    BoundingBox b{mask.width(), mask.height(), -1, -1};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask(x, y)) continue;
            b.xmin = std::min(b.xmin, x);
            b.xmax = std::max(b.xmax, x);
            b.ymin = std::min(b.ymin, y);
            b.ymax = std::max(b.ymax, y);
        }
    }
    return MembraneMask{id, std::move(mask), b};
}

// Sliding centered window mean via the integral image; a pixel is foreground
// when it is darker than ratio * mean. Windows are clamped at the borders.
inline Mask local_threshold(const GrayImage& img, const ThresholdConfig& cfg) {
    cfg.validate();
    const IntegralImage ii(img);
    const int w = img.width();
    const int h = img.height();
    Mask out(w, h, 0);
    const int hx = cfg.windowW / 2;
    const int hy = cfg.windowH / 2;
    for (int y = 0; y < h; ++y) {
        const int y0 = y - hy;
        const int y1 = y0 + cfg.windowH - 1;
        for (int x = 0; x < w; ++x) {
            const int x0 = x - hx;
            const int x1 = x0 + cfg.windowW - 1;
            const double sum = static_cast<double>(ii.rect_sum(x0, y0, x1, y1));
            const double count = static_cast<double>(IntegralImage::rect_count(x0, y0, x1, y1, w, h));
            const double mean = sum / count;
            out(x, y) = static_cast<double>(img(x, y)) < cfg.ratio * mean ? 255 : 0;
        }
    }
    return out;
}

inline Mask local_threshold(const Frame& frame, const ThresholdConfig& cfg) {
    return local_threshold(frame.image, cfg);
}

inline bool is_worm_shaped(const Blob& b, const WormFilterConfig& cfg) {
    if (b.area < cfg.minAreaPx || b.area > cfg.maxAreaPx) return false;
    const double pa = b.perimeter_area_ratio();
    return pa >= cfg.minPA && pa <= cfg.maxPA;
}

inline std::vector<Blob> classify_worms(const std::vector<Blob>& blobs, const WormFilterConfig& cfg) {
    std::vector<Blob> kept;
    std::copy_if(blobs.begin(), blobs.end(), std::back_inserter(kept),
                 [&](const Blob& b) { return is_worm_shaped(b, cfg); });
    return kept;
}

inline bool is_occlusion_candidate(const Blob& b, const WormFilterConfig& cfg) {
    if (cfg.occlusionMaxAreaPx <= cfg.maxAreaPx) return false;
    if (b.area <= cfg.maxAreaPx || b.area > cfg.occlusionMaxAreaPx) return false;
    const double pa = b.perimeter_area_ratio();
    return pa >= cfg.minPA && pa <= cfg.maxPA;
}

// Segments worms from a precomputed threshold mask, restricted to each
// membrane interior in turn.
inline std::vector<Detection> segment_mask(const Mask& fg, int frameIndex,
                                           const std::vector<MembraneMask>& membranes,
                                           const WormFilterConfig& cfg) {
    cfg.validate();
    std::vector<Detection> out;
    for (const auto& mem : membranes) {
        if (mem.bbox.xmax < mem.bbox.xmin) continue;
        if (mem.mask.width() != fg.width() || mem.mask.height() != fg.height()) {
            throw std::invalid_argument("segment: membrane mask size differs from frame");
        }
        const BoundingBox& b = mem.bbox;
        Mask clipped(b.width(), b.height(), 0);
        for (int y = b.ymin; y <= b.ymax; ++y) {
            for (int x = b.xmin; x <= b.xmax; ++x) {
                if (fg(x, y) && mem.mask(x, y)) clipped(x - b.xmin, y - b.ymin) = 255;
            }
        }
        for (const Blob& blob : connected_components(clipped)) {
            const bool worm = is_worm_shaped(blob, cfg);
            if (!worm && !is_occlusion_candidate(blob, cfg)) continue;
            Detection d;
            d.frameIndex = frameIndex;
            d.bbox = {blob.bbox.xmin + b.xmin, blob.bbox.ymin + b.ymin, blob.bbox.xmax + b.xmin,
                      blob.bbox.ymax + b.ymin};
            d.centroid = d.bbox.center();
            d.areaPx = blob.area;
            d.perimeterPx = blob.perimeter;
            d.membraneId = mem.id;
            d.occluded = !worm;
            out.push_back(d);
        }
    }
    return out;
}

// threshold -> per-membrane intersection -> components -> classifier.
inline std::vector<Detection> segment_frame(const Frame& frame,
                                            const std::vector<MembraneMask>& membranes,
                                            const ThresholdConfig& thr,
                                            const WormFilterConfig& filt) {
    return segment_mask(local_threshold(frame.image, thr), frame.index, membranes, filt);
}

}  // namespace gelpad
