#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gelpad {

// Pixel (x, y) covers [x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]; its center sits
// at integer coordinates. Every geometric quantity in the library (circle
// centers, contour points, centroids) uses this convention.
template <typename T>
class Image {
public:
    using value_type = T;

    Image() = default;

    Image(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("image dimensions must be positive, got " +
                                        std::to_string(width) + "x" + std::to_string(height));
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Image(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("image dimensions must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw std::invalid_argument("pixel buffer length " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(width) + "x" +
                                        std::to_string(height));
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    // Border-replicating accessor.
    const T& clamped(int x, int y) const noexcept {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return data_[index(x, y)];
    }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    std::vector<T>& buffer() noexcept { return data_; }
    const std::vector<T>& buffer() const noexcept { return data_; }

    std::span<const T> row(int y) const noexcept {
        return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
    }

    bool operator==(const Image&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using GrayImage = Image<std::uint8_t>;
using RealImage = Image<double>;
using Mask = Image<std::uint8_t>;  // 0 background, nonzero foreground

// One decoded video frame.
struct Frame {
    GrayImage image;
    int index = 0;
    double timestampS = 0.0;

    int width() const noexcept { return image.width(); }
    int height() const noexcept { return image.height(); }
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

struct BoundingBox {
    int xmin = 0;
    int ymin = 0;
    int xmax = 0;
    int ymax = 0;

    int width() const noexcept { return xmax - xmin + 1; }
    int height() const noexcept { return ymax - ymin + 1; }
    long area() const noexcept { return static_cast<long>(width()) * height(); }
    Point2 center() const noexcept { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
    bool contains(double x, double y) const noexcept {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }

    bool operator==(const BoundingBox&) const = default;
};

}  // namespace gelpad
