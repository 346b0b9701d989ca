#include "xrad/tensor.hpp"

#include <cmath>

namespace xrad {

namespace {

void plane_axes(RotPlane plane, int& a, int& b) {
    switch (plane) {
        case RotPlane::ChannelWidth:
            a = 1;
            b = 3;
            return;
        case RotPlane::ChannelHeight:
            a = 1;
            b = 2;
            return;
        default: throw InputError("rotate90: plane must name two axes");
    }
}

}  // namespace

Tensor4 rotate90(const Tensor4& x, RotPlane plane, RotDir dir) {
    if (plane == RotPlane::None) return x;
    int axA, axB;
    plane_axes(plane, axA, axB);
    const int extA = x.dims[axA], extB = x.dims[axB];

    std::array<int, 4> odims = x.dims;
    odims[axA] = extB;
    odims[axB] = extA;
    Tensor4 out(odims[0], odims[1], odims[2], odims[3]);

    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < x.dims[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < x.dims[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < x.dims[2]; ++idx[2])
                for (idx[3] = 0; idx[3] < x.dims[3]; ++idx[3]) {
                    std::array<int, 4> o = idx;
                    if (dir == RotDir::CounterClockwise) {
                        o[axA] = extB - 1 - idx[axB];
                        o[axB] = idx[axA];
                    } else {
                        o[axA] = idx[axB];
                        o[axB] = extA - 1 - idx[axA];
                    }
                    out.at(o[0], o[1], o[2], o[3]) = x.at(idx[0], idx[1], idx[2], idx[3]);
                }
    return out;
}

Tensor4 zpool(const Tensor4& x, int axis) {
    if (axis < 0 || axis > 3) throw InputError("zpool: bad axis");
    const int ext = x.dims[axis];
    std::array<int, 4> odims = x.dims;
    odims[axis] = 2;
    Tensor4 out(odims[0], odims[1], odims[2], odims[3]);

    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < odims[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < odims[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < odims[2]; ++idx[2])
                for (idx[3] = 0; idx[3] < odims[3]; ++idx[3]) {
                    if (idx[axis] != 0) continue;
                    std::array<int, 4> src = idx;
                    double mx = -1.0, sum = 0.0;
                    for (int a = 0; a < ext; ++a) {
                        src[axis] = a;
                        double v = x.at(src[0], src[1], src[2], src[3]);
                        if (a == 0 || v > mx) mx = v;
                        sum += v;
                    }
                    std::array<int, 4> dst = idx;
                    dst[axis] = 0;
                    out.at(dst[0], dst[1], dst[2], dst[3]) = mx;
                    dst[axis] = 1;
                    out.at(dst[0], dst[1], dst[2], dst[3]) = sum / ext;
                }
    return out;
}

Tensor4 zpool_backward(const Tensor4& x, const Tensor4& dz, int axis) {
    const int ext = x.dims[axis];
    if (dz.dims[axis] != 2) throw InputError("zpool_backward: upstream axis extent must be 2");
    Tensor4 dx(x.dims[0], x.dims[1], x.dims[2], x.dims[3]);

    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < dz.dims[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < dz.dims[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < dz.dims[2]; ++idx[2])
                for (idx[3] = 0; idx[3] < dz.dims[3]; ++idx[3]) {
                    if (idx[axis] != 0) continue;
                    std::array<int, 4> src = idx;
                    int argmax = 0;
                    double mx = 0.0;
                    for (int a = 0; a < ext; ++a) {
                        src[axis] = a;
                        double v = x.at(src[0], src[1], src[2], src[3]);
                        if (a == 0 || v > mx) {
                            mx = v;
                            argmax = a;
                        }
                    }
                    std::array<int, 4> g = idx;
                    g[axis] = 0;
                    double dmax = dz.at(g[0], g[1], g[2], g[3]);
                    g[axis] = 1;
                    double dmean = dz.at(g[0], g[1], g[2], g[3]) / ext;
                    src[axis] = argmax;
                    dx.at(src[0], src[1], src[2], src[3]) += dmax;
                    for (int a = 0; a < ext; ++a) {
                        src[axis] = a;
                        dx.at(src[0], src[1], src[2], src[3]) += dmean;
                    }
                }
    return dx;
}

Tensor4 conv2d(const Tensor4& x, const Tensor4& kernel, const std::vector<double>& bias) {
    const int cout = kernel.dims[0], cin = kernel.dims[1], k = kernel.dims[2];
    if (kernel.dims[3] != k || k % 2 == 0) throw InputError("conv2d: kernel must be odd square");
    if (cin != x.dims[1]) throw InputError("conv2d: kernel in-channels must match input");
    if (static_cast<int>(bias.size()) != cout) throw InputError("conv2d: bias size mismatch");
    const int pad = (k - 1) / 2;
    const int B = x.dims[0], H = x.dims[2], W = x.dims[3];
    Tensor4 out(B, cout, H, W);

#ifdef _OPENMP
#pragma omp parallel for collapse(2) if (out.size() > 4096)
#endif
    for (int b = 0; b < B; ++b)
        for (int co = 0; co < cout; ++co)
            for (int oy = 0; oy < H; ++oy)
                for (int ox = 0; ox < W; ++ox) {
                    double acc = bias[co];
                    for (int ci = 0; ci < cin; ++ci)
                        for (int ky = 0; ky < k; ++ky) {
                            int iy = oy + ky - pad;
                            if (iy < 0 || iy >= H) continue;
                            for (int kx = 0; kx < k; ++kx) {
                                int ix = ox + kx - pad;
                                if (ix < 0 || ix >= W) continue;
                                acc += x.at(b, ci, iy, ix) * kernel.at(co, ci, ky, kx);
                            }
                        }
                    out.at(b, co, oy, ox) = acc;
                }
    return out;
}

ConvGrads conv2d_backward(const Tensor4& x, const Tensor4& kernel, const Tensor4& dout) {
    const int cout = kernel.dims[0], cin = kernel.dims[1], k = kernel.dims[2];
    const int pad = (k - 1) / 2;
    const int B = x.dims[0], H = x.dims[2], W = x.dims[3];
    if (dout.dims != std::array<int, 4>{B, cout, H, W})
        throw InputError("conv2d_backward: upstream shape mismatch");

    ConvGrads g{Tensor4(B, cin, H, W), Tensor4(cout, cin, k, k),
                std::vector<double>(static_cast<size_t>(cout), 0.0)};

    // dinput: each element an independent sum, safe to parallelize
#ifdef _OPENMP
#pragma omp parallel for collapse(2) if (x.size() > 4096)
#endif
    for (int b = 0; b < B; ++b)
        for (int ci = 0; ci < cin; ++ci)
            for (int iy = 0; iy < H; ++iy)
                for (int ix = 0; ix < W; ++ix) {
                    double acc = 0.0;
                    for (int co = 0; co < cout; ++co)
                        for (int ky = 0; ky < k; ++ky) {
                            int oy = iy - ky + pad;
                            if (oy < 0 || oy >= H) continue;
                            for (int kx = 0; kx < k; ++kx) {
                                int ox = ix - kx + pad;
                                if (ox < 0 || ox >= W) continue;
                                acc += dout.at(b, co, oy, ox) * kernel.at(co, ci, ky, kx);
                            }
                        }
                    g.dinput.at(b, ci, iy, ix) = acc;
                }

    // dkernel: one sequential sum per kernel element keeps results
    // independent of thread count
#ifdef _OPENMP
#pragma omp parallel for collapse(2)
#endif
    for (int co = 0; co < cout; ++co)
        for (int ci = 0; ci < cin; ++ci)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    double acc = 0.0;
                    for (int b = 0; b < B; ++b)
                        for (int oy = 0; oy < H; ++oy) {
                            int iy = oy + ky - pad;
                            if (iy < 0 || iy >= H) continue;
                            for (int ox = 0; ox < W; ++ox) {
                                int ix = ox + kx - pad;
                                if (ix < 0 || ix >= W) continue;
                                acc += dout.at(b, co, oy, ox) * x.at(b, ci, iy, ix);
                            }
                        }
                    g.dkernel.at(co, ci, ky, kx) = acc;
                }

    for (int co = 0; co < cout; ++co) {
        double acc = 0.0;
        for (int b = 0; b < B; ++b)
            for (int oy = 0; oy < H; ++oy)
                for (int ox = 0; ox < W; ++ox) acc += dout.at(b, co, oy, ox);
        g.dbias[co] = acc;
    }
    return g;
}

Tensor4 sigmoid(const Tensor4& x) {
    Tensor4 out = x;
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    return out;
}

}  // namespace xrad
