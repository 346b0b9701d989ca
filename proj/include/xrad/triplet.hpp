#pragma once

#include <string>

#include "xrad/tensor.hpp"

namespace xrad {

/// Per-branch gating parameters: a (1, 2, k, k) kernel and a scalar bias,
/// one set per branch.
struct TripletParams {
    int k = 7;
    std::array<Tensor4, 3> kernels;
    std::array<double, 3> biases{0.0, 0.0, 0.0};

    static TripletParams zeros(int k = 7);
    static TripletParams random(int k, uint64_t seed);

    static TripletParams load_json(const std::string& path);
    void save_json(const std::string& path) const;
};

/// Intermediates kept by the forward pass for the exact backward.
struct TripletCache {
    std::array<int, 4> input_dims{};
    std::array<Tensor4, 3> rotated;   // x' per branch
    std::array<Tensor4, 3> pooled;    // zpool(x')
    std::array<Tensor4, 3> gate;      // sigmoid(conv(zpool(x')))
    Tensor4 aligned_gate_mean;        // mean of gate fields rotated back to x
};

struct TripletGrads {
    Tensor4 dinput;
    std::array<Tensor4, 3> dkernels;
    std::array<double, 3> dbiases{0.0, 0.0, 0.0};
};

/// Three-branch cross-dimension attention: rotate, z-pool, conv, sigmoid,
/// gate, rotate back; output is the mean of the three gated branches.
Tensor4 triplet_forward(const Tensor4& x, const TripletParams& p, TripletCache* cache = nullptr);

TripletGrads triplet_backward(const TripletCache& cache, const TripletParams& p,
                              const Tensor4& dy);

struct GradcheckReport {
    std::array<int, 4> dims{};
    uint64_t seed = 0;
    double eps = 1e-6;
    // groups: input, kernel1..3, bias1..3
    double err_input = 0.0;
    std::array<double, 3> err_kernels{};
    std::array<double, 3> err_biases{};
    double max_err() const;
    std::string to_json() const;
};

/// Compares analytic gradients of L(y) = sum(y^2)/2 against central finite
/// differences on a seeded random instance. Axis extents must be <= 8.
GradcheckReport gradcheck(const std::array<int, 4>& dims, int k, uint64_t seed,
                          double eps = 1e-6);

}  // namespace xrad
