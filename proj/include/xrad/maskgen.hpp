#pragma once

#include <utility>
#include <vector>

#include "xrad/image.hpp"

namespace xrad {

/// Min-max normalize a heatmap to [0, 255] with round-half-away-from-zero.
/// A constant map normalizes to all zeros (no localization signal).
GrayImage normalize_heatmap(const Heatmap& h);

/// Bit set iff pixel intensity >= t. Requires t in (0, 255).
RoiMask threshold_binary(const GrayImage& img, double t);

/// Maximal connected regions of a mask, ordered by topmost-then-leftmost pixel.
std::vector<RoiMask> connected_components(const RoiMask& mask, int connectivity = 8);

/// Minimal axis-aligned cover of each (non-empty) region.
std::vector<BoundingBox> boxes_from_components(const std::vector<RoiMask>& regions);

struct TaggedBox {
    double threshold = 0.0;
    BoundingBox box;
};

/// Full mask-generation pipeline: normalize, then per threshold independently
/// binarize, extract components, and cover each with a box. Components smaller
/// than min_area pixels are dropped.
std::vector<TaggedBox> generate_bboxes(const Heatmap& h, const std::vector<double>& thresholds,
                                       int connectivity = 8, long long min_area = 1);

/// 8-bit interleaved RGB raster.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // 3 bytes per pixel, row-major

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}
};

/// Base image with the heatmap alpha-blended (jet-style colormap) and 1-px box
/// outlines drawn on top. Deterministic for fixed inputs.
RgbImage render_overlay(const GrayImage& img, const Heatmap& h,
                        const std::vector<BoundingBox>& boxes);

}  // namespace xrad
