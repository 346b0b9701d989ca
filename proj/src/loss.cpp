#include "xrad/loss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace xrad {

Projection Projection::identity(int d) {
    Projection p;
    p.d_in = p.d_out = d;
    p.weights.assign(static_cast<size_t>(d) * d, 0.0);
    p.bias.assign(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) p.weights[static_cast<size_t>(i) * d + i] = 1.0;
    return p;
}

Projection Projection::random(int d_in, int d_out, uint64_t seed) {
    Projection p;
    p.d_in = d_in;
    p.d_out = d_out;
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    p.weights.resize(static_cast<size_t>(d_out) * d_in);
    p.bias.resize(static_cast<size_t>(d_out));
    for (double& v : p.weights) v = dist(rng);
    for (double& v : p.bias) v = dist(rng);
    return p;
}

Projection Projection::load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open projection file " + path);
    nlohmann::json j;
    f >> j;
    Projection p;
    p.d_in = j.at("d_in").get<int>();
    p.d_out = j.at("d_out").get<int>();
    auto w = j.at("weights");
    auto b = j.at("bias");
    if (static_cast<int>(w.size()) != p.d_out || static_cast<int>(b.size()) != p.d_out)
        throw InputError(path + ": weights/bias rows must equal d_out");
    for (const auto& row : w) {
        if (static_cast<int>(row.size()) != p.d_in)
            throw InputError(path + ": weight row length must equal d_in");
        for (const auto& v : row) p.weights.push_back(v.get<double>());
    }
    for (const auto& v : b) p.bias.push_back(v.get<double>());
    return p;
}

void Projection::save_json(const std::string& path) const {
    nlohmann::json w = nlohmann::json::array();
    for (int r = 0; r < d_out; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < d_in; ++c) row.push_back(this->w(r, c));
        w.push_back(row);
    }
    nlohmann::json j{{"d_in", d_in}, {"d_out", d_out}, {"weights", w}, {"bias", bias}};
    std::ofstream f(path);
    if (!f) throw InputError("cannot write projection file " + path);
    f << j.dump(2) << "\n";
}

double bce(double p, double y, double eps) {
    p = std::clamp(p, eps, 1.0 - eps);
    return -y * std::log(p) - (1.0 - y) * std::log(1.0 - p);
}

double classification_loss(const std::vector<double>& probs,
                           const std::vector<double>& labels) {
    if (probs.size() != labels.size())
        throw InputError("classification_loss: probs/labels length mismatch");
    double sum = 0.0;
    for (size_t k = 0; k < probs.size(); ++k) sum += bce(probs[k], labels[k]);
    return sum;
}

std::vector<double> project(const std::vector<double>& v, const Projection& proj) {
    if (static_cast<int>(v.size()) != proj.d_in)
        throw InputError("project: input length does not match d_in");
    std::vector<double> out(static_cast<size_t>(proj.d_out));
    for (int r = 0; r < proj.d_out; ++r) {
        double acc = proj.bias[r];
        for (int c = 0; c < proj.d_in; ++c) acc += proj.w(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

namespace {

std::vector<double> projected_diff(const std::vector<double>& image_features,
                                   const std::vector<double>& radiomic_features,
                                   const Projection& proj_img, const Projection& proj_rad) {
    if (proj_img.d_out != proj_rad.d_out)
        throw InputError("radiomic_distance: projections disagree on d_out");
    std::vector<double> a = project(image_features, proj_img);
    std::vector<double> b = project(radiomic_features, proj_rad);
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

double pnorm(const std::vector<double>& v, int p) {
    if (p == 1) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    if (p == 2) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }
    throw ConfigError("p_norm must be 1 or 2");
}

}  // namespace

double radiomic_distance(const std::vector<double>& image_features,
                         const std::vector<double>& radiomic_features,
                         const Projection& proj_img, const Projection& proj_rad, int p_norm) {
    return pnorm(projected_diff(image_features, radiomic_features, proj_img, proj_rad), p_norm);
}

LossReport total_loss(const std::vector<double>& probs, const std::vector<double>& labels,
                      const std::vector<double>& image_features,
                      const std::vector<double>& radiomic_features, const Projection& proj_img,
                      const Projection& proj_rad, int p_norm, double lambda) {
    LossReport r;
    r.classification = classification_loss(probs, labels);
    r.distance =
        radiomic_distance(image_features, radiomic_features, proj_img, proj_rad, p_norm);
    r.total = r.classification + lambda * r.distance;
    return r;
}

DistanceGrads distance_gradients(const std::vector<double>& image_features,
                                 const std::vector<double>& radiomic_features,
                                 const Projection& proj_img, const Projection& proj_rad,
                                 int p_norm, double lambda) {
    std::vector<double> diff =
        projected_diff(image_features, radiomic_features, proj_img, proj_rad);

    // dD/d(diff_r)
    std::vector<double> u(diff.size());
    if (p_norm == 2) {
        double norm = pnorm(diff, 2);
        if (norm == 0.0) throw InputError("distance_gradients: 2-norm gradient undefined at 0");
        for (size_t i = 0; i < diff.size(); ++i) u[i] = diff[i] / norm;
    } else if (p_norm == 1) {
        for (size_t i = 0; i < diff.size(); ++i)
            u[i] = diff[i] > 0.0 ? 1.0 : (diff[i] < 0.0 ? -1.0 : 0.0);
    } else {
        throw ConfigError("p_norm must be 1 or 2");
    }

    DistanceGrads g;
    g.d_image_features.assign(image_features.size(), 0.0);
    for (int c = 0; c < proj_img.d_in; ++c) {
        double acc = 0.0;
        for (int r = 0; r < proj_img.d_out; ++r) acc += proj_img.w(r, c) * u[r];
        g.d_image_features[c] = lambda * acc;
    }
    g.d_proj_img_weights.assign(proj_img.weights.size(), 0.0);
    for (int r = 0; r < proj_img.d_out; ++r)
        for (int c = 0; c < proj_img.d_in; ++c)
            g.d_proj_img_weights[static_cast<size_t>(r) * proj_img.d_in + c] =
                lambda * u[r] * image_features[c];
    return g;
}

}  // namespace xrad
