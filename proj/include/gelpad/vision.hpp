#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "gelpad/image.hpp"

namespace gelpad {

template <typename T>
using gradient_t = std::conditional_t<std::is_integral_v<T>, std::int32_t, double>;

template <typename Acc>
struct GradientField {
    Image<Acc> gx;
    Image<Acc> gy;
    RealImage magnitude;
};

// 3x3 Sobel with edge-pixel replication. Integral inputs give exact integer
// derivatives.
template <typename T>
GradientField<gradient_t<T>> sobel(const Image<T>& img) {
    using Acc = gradient_t<T>;
    if (img.width() < 3 || img.height() < 3) {
        throw std::invalid_argument("sobel: image smaller than 3x3 kernel");
    }
    const int w = img.width();
    const int h = img.height();
    GradientField<Acc> g{Image<Acc>(w, h), Image<Acc>(w, h), RealImage(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto p = [&](int dx, int dy) { return static_cast<Acc>(img.clamped(x + dx, y + dy)); };
            Acc gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            Acc gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            g.gx(x, y) = gx;
            g.gy(x, y) = gy;
            const double fx = static_cast<double>(gx);
            const double fy = static_cast<double>(gy);
            g.magnitude(x, y) = std::sqrt(fx * fx + fy * fy);
        }
    }
    return g;
}

inline std::vector<double> gaussian_kernel(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian kernel: negative sigma");
    if (sigma == 0.0) return {1.0};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable Gaussian, radius ceil(3 sigma), replicated borders.
template <typename T>
RealImage gaussian_blur(const Image<T>& img, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: negative sigma");
    const int w = img.width();
    const int h = img.height();
    RealImage out(w, h);
    if (sigma == 0.0) {
        for (std::size_t i = 0; i < img.size(); ++i) {
            out.buffer()[i] = static_cast<double>(img.buffer()[i]);
        }
        return out;
    }
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    RealImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                acc += k[static_cast<std::size_t>(i + r)] * static_cast<double>(img.clamped(x + i, y));
            }
            tmp(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                acc += k[static_cast<std::size_t>(i + r)] * tmp.clamped(x, y + i);
            }
            out(x, y) = acc;
        }
    }
    return out;
}

// Block-average downscale; trailing partial blocks are averaged over the
// pixels they actually contain.
template <typename T>
RealImage downscale_mean(const Image<T>& img, int factor) {
    if (factor < 1) throw std::invalid_argument("downscale: factor must be >= 1");
    const int w = (img.width() + factor - 1) / factor;
    const int h = (img.height() + factor - 1) / factor;
    RealImage out(w, h);
    for (int by = 0; by < h; ++by) {
        for (int bx = 0; bx < w; ++bx) {
            double sum = 0.0;
            int n = 0;
            for (int y = by * factor; y < std::min((by + 1) * factor, img.height()); ++y) {
                for (int x = bx * factor; x < std::min((bx + 1) * factor, img.width()); ++x) {
                    sum += static_cast<double>(img(x, y));
                    ++n;
                }
            }
            out(bx, by) = sum / n;
        }
    }
    return out;
}

// Summed-area table with a zero first row and column.
class IntegralImage {
public:
    IntegralImage() = default;

    template <typename T>
    explicit IntegralImage(const Image<T>& img)
        : width_(img.width()), height_(img.height()),
          table_(static_cast<std::size_t>(width_ + 1) * static_cast<std::size_t>(height_ + 1), 0) {
        static_assert(std::is_integral_v<T>, "integral image requires integer pixels");
        for (int y = 0; y < height_; ++y) {
            std::int64_t row = 0;
            for (int x = 0; x < width_; ++x) {
                row += static_cast<std::int64_t>(img(x, y));
                at(x + 1, y + 1) = at(x + 1, y) + row;
            }
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    // Inclusive window, clamped to the image. Empty after clamping gives 0.
    std::int64_t rect_sum(int x0, int y0, int x1, int y1) const noexcept {
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, width_ - 1);
        y1 = std::min(y1, height_ - 1);
        if (x1 < x0 || y1 < y0) return 0;
        return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0);
    }

    static std::int64_t rect_count(int x0, int y0, int x1, int y1, int w, int h) noexcept {
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, w - 1);
        y1 = std::min(y1, h - 1);
        if (x1 < x0 || y1 < y0) return 0;
        return static_cast<std::int64_t>(x1 - x0 + 1) * (y1 - y0 + 1);
    }

private:
    std::int64_t& at(int x, int y) noexcept {
        return table_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) +
                      static_cast<std::size_t>(x)];
    }
    const std::int64_t& at(int x, int y) const noexcept {
        return table_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) +
                      static_cast<std::size_t>(x)];
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::int64_t> table_;
};

template <typename T>
IntegralImage integral(const Image<T>& img) {
    return IntegralImage(img);
}

struct Blob {
    int label = 0;
    long area = 0;
    // Pixel edges facing background or the image border.
    long perimeter = 0;
    BoundingBox bbox;

    Point2 centroid() const noexcept { return bbox.center(); }
    double perimeter_area_ratio() const noexcept {
        return static_cast<double>(perimeter) / static_cast<double>(area);
    }

    bool operator==(const Blob&) const = default;
};

struct Labeling {
    Image<int> labels;  // 0 background, 1..n blob labels
    std::vector<Blob> blobs;  // blobs[i].label == i + 1
};

namespace detail {

inline int uf_find(std::vector<int>& parent, int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
        parent[static_cast<std::size_t>(a)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
        a = parent[static_cast<std::size_t>(a)];
    }
    return a;
}

inline void uf_union(std::vector<int>& parent, int a, int b) {
    a = uf_find(parent, a);
    b = uf_find(parent, b);
    if (a == b) return;
    if (a < b) parent[static_cast<std::size_t>(b)] = a;
    else parent[static_cast<std::size_t>(a)] = b;
}

}  // namespace detail

// Two-pass 8-connected labeling. Labels are numbered in raster order of each
// blob's first pixel.
inline Labeling label_components(const Mask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    Image<int> provisional(w, h, 0);
    std::vector<int> parent{0};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask(x, y)) continue;
            int best = 0;
            const int nbr[4][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}};
            for (const auto& d : nbr) {
                int nx = x + d[0];
                int ny = y + d[1];
                if (!mask.contains(nx, ny)) continue;
                int l = provisional(nx, ny);
                if (l == 0) continue;
                if (best == 0) best = l;
                else detail::uf_union(parent, best, l);
            }
            if (best == 0) {
                best = static_cast<int>(parent.size());
                parent.push_back(best);
            }
            provisional(x, y) = best;
        }
    }

    std::vector<int> remap(parent.size(), 0);
    Labeling out{Image<int>(w, h, 0), {}};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int l = provisional(x, y);
            if (l == 0) continue;
            int root = detail::uf_find(parent, l);
            int& final_label = remap[static_cast<std::size_t>(root)];
            if (final_label == 0) {
                out.blobs.push_back(Blob{static_cast<int>(out.blobs.size()) + 1, 0, 0,
                                         BoundingBox{x, y, x, y}});
                final_label = static_cast<int>(out.blobs.size());
            }
            out.labels(x, y) = final_label;
            Blob& b = out.blobs[static_cast<std::size_t>(final_label - 1)];
            b.area += 1;
            b.bbox.xmin = std::min(b.bbox.xmin, x);
            b.bbox.xmax = std::max(b.bbox.xmax, x);
            b.bbox.ymin = std::min(b.bbox.ymin, y);
            b.bbox.ymax = std::max(b.bbox.ymax, y);
            auto background = [&](int nx, int ny) { return !mask.contains(nx, ny) || !mask(nx, ny); };
            b.perimeter += background(x - 1, y) + background(x + 1, y) + background(x, y - 1) +
                           background(x, y + 1);
        }
    }
    return out;
}

inline std::vector<Blob> connected_components(const Mask& mask) {
    return label_components(mask).blobs;
}

}  // namespace gelpad
