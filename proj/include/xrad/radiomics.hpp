#pragma once

#include <map>
#include <string>
#include <vector>

#include "xrad/image.hpp"

namespace xrad {

/// Masked image discretized into [1, ng]; 0 marks pixels outside the mask.
struct QuantizedRoi {
    int width = 0;
    int height = 0;
    std::vector<int> levels;  // row-major, 0 = unmasked
    int ng = 0;
    double src_min = 0.0;
    double src_max = 0.0;
    size_t masked_count = 0;

    int at(int x, int y) const { return levels[static_cast<size_t>(y) * width + x]; }
};

enum class MatrixKind { GLCM, GLSZM, GLRLM, NGTDM, GLDM };

/// Dense level-by-axis count matrix shared by all texture families.
/// GLCM: ng x ng symmetric pair counts. GLSZM: ng x max-zone-size.
/// GLRLM: ng x max-run-length. GLDM: ng x max-dependence+1.
/// NGTDM: ng x 2 with column 0 = n_i and column 1 = s_i.
struct TextureMatrix {
    MatrixKind kind;
    int rows = 0;
    int cols = 0;
    std::vector<double> entries;  // row-major

    double& at(int r, int c) { return entries[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return entries[static_cast<size_t>(r) * cols + c]; }
    double sum() const;
};

/// Ordered, named feature map; names are "family.Feature".
using FeatureVector = std::map<std::string, double>;

enum class AngleAggregation { MeanOverAngles, PerAngle };

struct RadiomicsConfig {
    int ng = 32;
    int delta = 1;
    int alpha = 0;
    std::vector<int> angles_deg = {0, 45, 90, 135};
    AngleAggregation aggregation = AngleAggregation::MeanOverAngles;

    void validate() const;
};

/// Unit step for a direction angle; 45 degrees is up-right in image coords.
struct Offset {
    int dx;
    int dy;
};
Offset angle_offset(int angle_deg);

/// Uniform binning of masked intensities over [min, max] into ng levels.
/// Constant regions quantize to level 1 everywhere.
QuantizedRoi quantize(const GrayImage& img, const RoiMask& mask, int ng);

/// Intensity statistics over masked pixels; entropy/uniformity use the
/// ng-level quantized histogram. Skewness/kurtosis of a constant region are 0.
FeatureVector first_order(const GrayImage& img, const RoiMask& mask, int ng = 32);

/// Geometric descriptors of the mask itself.
FeatureVector shape_2d(const RoiMask& mask);

TextureMatrix glcm(const QuantizedRoi& q, int delta, int angle_deg);
TextureMatrix glszm(const QuantizedRoi& q);
TextureMatrix glrlm(const QuantizedRoi& q, int angle_deg);
TextureMatrix ngtdm(const QuantizedRoi& q, int delta);
TextureMatrix gldm(const QuantizedRoi& q, int delta, int alpha);

FeatureVector glcm_features(const TextureMatrix& m);
FeatureVector glszm_features(const TextureMatrix& m, size_t masked_count);
FeatureVector glrlm_features(const TextureMatrix& m, size_t masked_count);
FeatureVector ngtdm_features(const TextureMatrix& m);
FeatureVector gldm_features(const TextureMatrix& m);

/// The full radiomic vector: first-order + shape + all five texture families.
FeatureVector extract_all(const GrayImage& img, const RoiMask& mask, const RadiomicsConfig& cfg);

}  // namespace xrad
