#pragma once

#include <string>
#include <vector>

#include "xrad/image.hpp"

namespace xrad {

/// Single affine projection layer mapping d_in -> d_out.
struct Projection {
    int d_in = 0;
    int d_out = 0;
    std::vector<double> weights;  // row-major d_out x d_in
    std::vector<double> bias;     // d_out

    static Projection identity(int d);
    static Projection random(int d_in, int d_out, uint64_t seed);
    static Projection load_json(const std::string& path);
    void save_json(const std::string& path) const;

    double w(int r, int c) const { return weights[static_cast<size_t>(r) * d_in + c]; }
};

/// Binary cross-entropy in nats; p clamped to [eps, 1-eps].
double bce(double p, double y, double eps = 1e-12);

/// Sum of per-class BCE terms.
double classification_loss(const std::vector<double>& probs, const std::vector<double>& labels);

std::vector<double> project(const std::vector<double>& v, const Projection& proj);

/// p-norm distance between the two projected feature vectors.
double radiomic_distance(const std::vector<double>& image_features,
                         const std::vector<double>& radiomic_features, const Projection& proj_img,
                         const Projection& proj_rad, int p_norm = 2);

struct LossReport {
    double classification = 0.0;  // L_I
    double distance = 0.0;
    double total = 0.0;  // L_II
};

/// L_II = L_I + lambda * || proj(I_F) - proj(R_F) ||_p; lambda defaults to 1.
LossReport total_loss(const std::vector<double>& probs, const std::vector<double>& labels,
                      const std::vector<double>& image_features,
                      const std::vector<double>& radiomic_features, const Projection& proj_img,
                      const Projection& proj_rad, int p_norm = 2, double lambda = 1.0);

struct DistanceGrads {
    std::vector<double> d_image_features;   // d L_II / d I_F
    std::vector<double> d_proj_img_weights;  // row-major d_out x d_in
};

/// Analytic gradient of the distance term wrt the image feature vector and
/// the image-side projection weights. Undefined at zero distance for p=2.
DistanceGrads distance_gradients(const std::vector<double>& image_features,
                                 const std::vector<double>& radiomic_features,
                                 const Projection& proj_img, const Projection& proj_rad,
                                 int p_norm = 2, double lambda = 1.0);

}  // namespace xrad
