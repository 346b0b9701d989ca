#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "xrad/image.hpp"

namespace xrad {

/// Dense rank-4 tensor (batch, channel, height, width), row-major, double.
struct Tensor4 {
    std::array<int, 4> dims{0, 0, 0, 0};
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(int b, int c, int h, int w, double fill = 0.0)
        : dims{b, c, h, w},
          data(static_cast<size_t>(b) * c * h * w, fill) {
        if (b < 1 || c < 1 || h < 1 || w < 1) throw InputError("Tensor4: dims must be >= 1");
    }

    size_t index(int b, int c, int h, int w) const {
        return ((static_cast<size_t>(b) * dims[1] + c) * dims[2] + h) * dims[3] + w;
    }
    double& at(int b, int c, int h, int w) { return data[index(b, c, h, w)]; }
    double at(int b, int c, int h, int w) const { return data[index(b, c, h, w)]; }
    size_t size() const { return data.size(); }

    bool same_shape(const Tensor4& o) const { return dims == o.dims; }
};

enum class RotPlane { ChannelWidth, ChannelHeight, None };
enum class RotDir { CounterClockwise, Clockwise };

/// Axis-permuted-and-reversed copy; a quarter turn in the given axis plane.
/// Batch is never touched. CounterClockwise then Clockwise is the identity.
Tensor4 rotate90(const Tensor4& x, RotPlane plane, RotDir dir);

/// Concatenated max- and mean-reduction along `axis`; that axis gets extent 2
/// (slice 0 = max, slice 1 = mean).
Tensor4 zpool(const Tensor4& x, int axis = 1);

/// Gradient of zpool: max routes to the first argmax, mean spreads uniformly.
Tensor4 zpool_backward(const Tensor4& x, const Tensor4& dz, int axis = 1);

/// Zero-padded cross-correlation; kernel (Cout, Cin, k, k), k odd, spatial
/// dims preserved.
Tensor4 conv2d(const Tensor4& x, const Tensor4& kernel, const std::vector<double>& bias);

struct ConvGrads {
    Tensor4 dinput;
    Tensor4 dkernel;
    std::vector<double> dbias;
};
ConvGrads conv2d_backward(const Tensor4& x, const Tensor4& kernel, const Tensor4& dout);

Tensor4 sigmoid(const Tensor4& x);

}  // namespace xrad
