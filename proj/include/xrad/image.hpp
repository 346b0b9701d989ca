#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xrad {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 2D scalar intensity grid, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw InputError("GrayImage: dimensions must be >= 1");
    }

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return pixels.size(); }
};

/// Binary region of interest, row-major bits.
struct RoiMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    RoiMask() = default;
    RoiMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {
        if (w < 1 || h < 1) throw InputError("RoiMask: dimensions must be >= 1");
    }

    bool test(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) {
        bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0;
    }
    size_t count() const {
        size_t n = 0;
        for (uint8_t b : bits) n += (b != 0);
        return n;
    }
    bool empty() const { return count() == 0; }
};

/// Axis-aligned rectangle; (x, y) is the top-left pixel, w/h in pixels.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const BoundingBox&) const = default;
    long long area() const { return static_cast<long long>(w) * h; }
    bool contains(int px, int py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    /// True if this box lies entirely inside `other`.
    bool inside(const BoundingBox& other) const {
        return x >= other.x && y >= other.y && x + w <= other.x + other.w &&
               y + h <= other.y + other.h;
    }
};

/// Unnormalized per-class activation map.
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    int class_id = 0;

    Heatmap() = default;
    Heatmap(int w, int h, double fill = 0.0, int cls = 0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill), class_id(cls) {
        if (w < 1 || h < 1) throw InputError("Heatmap: dimensions must be >= 1");
    }

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

}  // namespace xrad
