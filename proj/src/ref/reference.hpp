#pragma once

// Serial brute-force reference implementations. Deliberately written as
// direct nested-loop enumerations, independent of the library kernels, so
// tests and benchmarks can compare against them.

#include <vector>

#include "xrad/metrics.hpp"
#include "xrad/radiomics.hpp"
#include "xrad/tensor.hpp"

namespace xrad::ref {

TextureMatrix glcm_ref(const QuantizedRoi& q, int delta, int angle_deg);
TextureMatrix glszm_ref(const QuantizedRoi& q);
TextureMatrix glrlm_ref(const QuantizedRoi& q, int angle_deg);
TextureMatrix ngtdm_ref(const QuantizedRoi& q, int delta);
TextureMatrix gldm_ref(const QuantizedRoi& q, int delta, int alpha);

Tensor4 conv2d_ref(const Tensor4& x, const Tensor4& kernel, const std::vector<double>& bias);

/// O(n^2) pairwise-counting AUC.
double roc_auc_pairwise(const std::vector<ScoredSample>& samples);

/// O(n^2) maximum pairwise distance over all masked pixel centers.
double max_diameter_ref(const RoiMask& mask);

}  // namespace xrad::ref
