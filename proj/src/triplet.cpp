#include "xrad/triplet.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace xrad {

namespace {

constexpr std::array<RotPlane, 3> kBranchPlanes = {
    RotPlane::ChannelWidth,   // H-C interaction
    RotPlane::ChannelHeight,  // W-C interaction
    RotPlane::None,           // W-H interaction (no rotation)
};

Tensor4 rotate_fwd(const Tensor4& x, RotPlane plane) {
    return rotate90(x, plane, RotDir::CounterClockwise);
}
Tensor4 rotate_back(const Tensor4& x, RotPlane plane) {
    return rotate90(x, plane, RotDir::Clockwise);
}

/// Broadcast a (B,1,H,W) gate to channel extent `ext`.
Tensor4 broadcast_gate(const Tensor4& g, int ext) {
    Tensor4 out(g.dims[0], ext, g.dims[2], g.dims[3]);
    for (int b = 0; b < g.dims[0]; ++b)
        for (int c = 0; c < ext; ++c)
            for (int h = 0; h < g.dims[2]; ++h)
                for (int w = 0; w < g.dims[3]; ++w) out.at(b, c, h, w) = g.at(b, 0, h, w);
    return out;
}

/// Sum a (B,C,H,W) tensor over the channel axis into (B,1,H,W).
Tensor4 sum_channels(const Tensor4& x) {
    Tensor4 out(x.dims[0], 1, x.dims[2], x.dims[3]);
    for (int b = 0; b < x.dims[0]; ++b)
        for (int c = 0; c < x.dims[1]; ++c)
            for (int h = 0; h < x.dims[2]; ++h)
                for (int w = 0; w < x.dims[3]; ++w) out.at(b, 0, h, w) += x.at(b, c, h, w);
    return out;
}

}  // namespace

TripletParams TripletParams::zeros(int k) {
    if (k < 1 || k % 2 == 0) throw ConfigError("TripletParams: k must be odd and >= 1");
    TripletParams p;
    p.k = k;
    for (auto& kn : p.kernels) kn = Tensor4(1, 2, k, k);
    return p;
}

TripletParams TripletParams::random(int k, uint64_t seed) {
    TripletParams p = zeros(k);
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(2.0 * k * k);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& kn : p.kernels)
        for (double& v : kn.data) v = dist(rng);
    for (double& b : p.biases) b = dist(rng);
    return p;
}

TripletParams TripletParams::load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open parameter file " + path);
    nlohmann::json j;
    f >> j;
    int k = j.at("k").get<int>();
    TripletParams p = zeros(k);
    auto kernels = j.at("kernels");
    auto biases = j.at("biases");
    if (kernels.size() != 3 || biases.size() != 3)
        throw InputError("parameter file must hold 3 kernels and 3 biases");
    for (int br = 0; br < 3; ++br) {
        // nested [2][k][k] per branch
        for (int ci = 0; ci < 2; ++ci)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx)
                    p.kernels[br].at(0, ci, ky, kx) =
                        kernels[br][ci][ky][kx].get<double>();
        p.biases[br] = biases[br].get<double>();
    }
    return p;
}

void TripletParams::save_json(const std::string& path) const {
    nlohmann::json jkernels = nlohmann::json::array();
    for (int br = 0; br < 3; ++br) {
        nlohmann::json branch = nlohmann::json::array();
        for (int ci = 0; ci < 2; ++ci) {
            nlohmann::json plane = nlohmann::json::array();
            for (int ky = 0; ky < k; ++ky) {
                nlohmann::json row = nlohmann::json::array();
                for (int kx = 0; kx < k; ++kx) row.push_back(kernels[br].at(0, ci, ky, kx));
                plane.push_back(row);
            }
            branch.push_back(plane);
        }
        jkernels.push_back(branch);
    }
    nlohmann::json j{{"k", k}, {"kernels", jkernels}, {"biases", biases}};
    std::ofstream f(path);
    if (!f) throw InputError("cannot write parameter file " + path);
    f << j.dump(2) << "\n";
}

Tensor4 triplet_forward(const Tensor4& x, const TripletParams& p, TripletCache* cache) {
    TripletCache local;
    TripletCache& c = cache ? *cache : local;
    c.input_dims = x.dims;

    // Rotation commutes with elementwise gating, so each branch contributes a
    // gate field aligned with x; averaging the gate fields and applying one
    // multiply is exact for the all-equal-gates case.
    Tensor4 gate_mean(x.dims[0], x.dims[1], x.dims[2], x.dims[3]);
    for (int br = 0; br < 3; ++br) {
        RotPlane plane = kBranchPlanes[br];
        c.rotated[br] = rotate_fwd(x, plane);
        c.pooled[br] = zpool(c.rotated[br], 1);
        Tensor4 pre = conv2d(c.pooled[br], p.kernels[br], {p.biases[br]});
        c.gate[br] = sigmoid(pre);
        Tensor4 aligned = rotate_back(broadcast_gate(c.gate[br], c.rotated[br].dims[1]), plane);
        for (size_t i = 0; i < gate_mean.size(); ++i) gate_mean.data[i] += aligned.data[i];
    }
    for (double& v : gate_mean.data) v /= 3.0;
    c.aligned_gate_mean = gate_mean;

    Tensor4 y = x;
    for (size_t i = 0; i < y.size(); ++i) y.data[i] *= gate_mean.data[i];
    return y;
}

TripletGrads triplet_backward(const TripletCache& cache, const TripletParams& p,
                              const Tensor4& dy) {
    if (dy.dims != cache.input_dims)
        throw InputError("triplet_backward: upstream gradient shape mismatch");

    // Reconstruct x from the unrotated branch 3 cache.
    const Tensor4& x = cache.rotated[2];
    TripletGrads g{Tensor4(x.dims[0], x.dims[1], x.dims[2], x.dims[3]), {}, {}};

    // y = x .* G with G the mean aligned gate field
    for (size_t i = 0; i < g.dinput.size(); ++i)
        g.dinput.data[i] = dy.data[i] * cache.aligned_gate_mean.data[i];

    Tensor4 dG = dy;
    for (size_t i = 0; i < dG.size(); ++i) dG.data[i] = dy.data[i] * x.data[i] / 3.0;

    for (int br = 0; br < 3; ++br) {
        RotPlane plane = kBranchPlanes[br];
        // dG flows back through rotate-back and the channel broadcast
        Tensor4 d_broadcast = rotate_fwd(dG, plane);
        Tensor4 dgate = sum_channels(d_broadcast);
        // sigmoid
        Tensor4 dpre = dgate;
        for (size_t i = 0; i < dpre.size(); ++i) {
            double s = cache.gate[br].data[i];
            dpre.data[i] *= s * (1.0 - s);
        }
        ConvGrads cg = conv2d_backward(cache.pooled[br], p.kernels[br], dpre);
        g.dkernels[br] = cg.dkernel;
        g.dbiases[br] = cg.dbias[0];
        Tensor4 dxr = zpool_backward(cache.rotated[br], cg.dinput, 1);
        Tensor4 dx_branch = rotate_back(dxr, plane);
        for (size_t i = 0; i < g.dinput.size(); ++i) g.dinput.data[i] += dx_branch.data[i];
    }
    return g;
}

double GradcheckReport::max_err() const {
    double m = err_input;
    for (double e : err_kernels) m = std::max(m, e);
    for (double e : err_biases) m = std::max(m, e);
    return m;
}

std::string GradcheckReport::to_json() const {
    nlohmann::json j{
        {"dims", dims},
        {"seed", seed},
        {"eps", eps},
        {"groups",
         {{"input", err_input},
          {"kernel1", err_kernels[0]},
          {"kernel2", err_kernels[1]},
          {"kernel3", err_kernels[2]},
          {"bias1", err_biases[0]},
          {"bias2", err_biases[1]},
          {"bias3", err_biases[2]}}},
        {"max_rel_err", max_err()}};
    return j.dump(2);
}

GradcheckReport gradcheck(const std::array<int, 4>& dims, int k, uint64_t seed, double eps) {
    for (int d : dims)
        if (d < 1 || d > 8) throw ConfigError("gradcheck: axis extents must be in [1, 8]");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor4 x(dims[0], dims[1], dims[2], dims[3]);
    for (double& v : x.data) v = dist(rng);
    TripletParams p = TripletParams::random(k, seed ^ 0x9e3779b97f4a7c15ull);

    auto loss = [&](const Tensor4& xx, const TripletParams& pp) {
        Tensor4 y = triplet_forward(xx, pp);
        double l = 0.0;
        for (double v : y.data) l += v * v;
        return 0.5 * l;
    };

    TripletCache cache;
    Tensor4 y = triplet_forward(x, p, &cache);
    Tensor4 dy = y;  // dL/dy for L = sum(y^2)/2
    TripletGrads grads = triplet_backward(cache, p, dy);

    auto rel_err = [](double a, double n) {
        return std::abs(a - n) / std::max({1.0, std::abs(a), std::abs(n)});
    };

    GradcheckReport rep;
    rep.dims = dims;
    rep.seed = seed;
    rep.eps = eps;

    for (size_t i = 0; i < x.size(); ++i) {
        Tensor4 xp = x, xm = x;
        xp.data[i] += eps;
        xm.data[i] -= eps;
        double num = (loss(xp, p) - loss(xm, p)) / (2.0 * eps);
        rep.err_input = std::max(rep.err_input, rel_err(grads.dinput.data[i], num));
    }
    for (int br = 0; br < 3; ++br) {
        for (size_t i = 0; i < p.kernels[br].size(); ++i) {
            TripletParams pp = p, pm = p;
            pp.kernels[br].data[i] += eps;
            pm.kernels[br].data[i] -= eps;
            double num = (loss(x, pp) - loss(x, pm)) / (2.0 * eps);
            rep.err_kernels[br] =
                std::max(rep.err_kernels[br], rel_err(grads.dkernels[br].data[i], num));
        }
        TripletParams pp = p, pm = p;
        pp.biases[br] += eps;
        pm.biases[br] -= eps;
        double num = (loss(x, pp) - loss(x, pm)) / (2.0 * eps);
        rep.err_biases[br] = rel_err(grads.dbiases[br], num);
    }
    return rep;
}

}  // namespace xrad
