#pragma once

#include <vector>

#include "gelpad/membrane.hpp"
#include "gelpad/segment.hpp"
#include "gelpad/tracker.hpp"

namespace gelpad {

struct PipelineConfig {
    ChtConfig cht;
    SnakeConfig snake;
    ThresholdConfig threshold;
    WormFilterConfig filter;
    TrackerConfig tracker;
    // Membrane masks are pulled this far inside the refined contour so the
    // dark rim never reaches the threshold stage.
    double membraneInsetPx = 3.0;

    void validate() const {
        cht.validate();
        snake.validate();
        threshold.validate();
        filter.validate();
        tracker.validate();
    }
};

struct MembraneSet {
    std::vector<Circle> circles;
    std::vector<Contour> contours;
    std::vector<MembraneMask> masks;  // masks[i].id == i
};

// Circles on one frame, snake refinement, inset interior masks. Membrane ids
// follow the circle order.
inline MembraneSet detect_membranes(const GrayImage& image, const PipelineConfig& cfg) {
    MembraneSet set;
    set.circles = detect_circles(image, cfg.cht);
    if (set.circles.empty()) return set;
    const EdgeForce force = edge_force(image, cfg.snake.edgeSigma);
    for (std::size_t i = 0; i < set.circles.size(); ++i) {
        Contour c = refine_contour(force, set.circles[i], cfg.snake);
        Contour inner = inset_contour(c, cfg.membraneInsetPx);
        Mask m = contour_mask(inner, image.width(), image.height());
        set.contours.push_back(std::move(c));
        set.masks.push_back(make_membrane_mask(static_cast<int>(i), std::move(m)));
    }
    return set;
}

inline MembraneSet detect_membranes(const Frame& frame, const PipelineConfig& cfg) {
    return detect_membranes(frame.image, cfg);
}

}  // namespace gelpad
