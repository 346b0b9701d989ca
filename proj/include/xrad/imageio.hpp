#pragma once

#include <string>
#include <vector>

#include "xrad/image.hpp"
#include "xrad/maskgen.hpp"

namespace xrad::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Load a grayscale image: 8/16-bit gray PNG or binary PGM (P5), by content.
GrayImage load_gray(const std::string& path);

/// Load a binary mask (nonzero pixel = set) from PNG or PGM.
RoiMask load_mask(const std::string& path);

/// Heatmap sources: ".json" sidecar {width,height,class_id} next to a raw
/// little-endian float32 payload (same stem, ".f32"), or an 8-bit gray PNG
/// treated as already normalized.
Heatmap load_heatmap(const std::string& path);

void save_gray_png(const GrayImage& img, const std::string& path);  // 8-bit, clamped
void save_rgb_png(const RgbImage& img, const std::string& path);
void save_pgm(const GrayImage& img, const std::string& path);  // P5, 8-bit

void save_heatmap_raw(const Heatmap& h, const std::string& stem);  // stem.f32 + stem.json

}  // namespace xrad::io
