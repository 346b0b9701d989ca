#pragma once

#include <map>
#include <string>
#include <vector>

#include "xrad/image.hpp"

namespace xrad {

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScoredSample {
    double score = 0.0;
    int label = 0;  // {0, 1}
    int class_id = 0;
    std::string image_id;
};

struct LocalizationCase {
    std::string image_id;
    int class_id = 0;
    BoundingBox ground_truth;
    std::vector<BoundingBox> predictions;
};

/// Rank-based (Mann-Whitney) AUC; ties contribute 1/2.
double roc_auc(const std::vector<ScoredSample>& samples);

/// Pixel-area intersection over union of two boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

struct LocalizationAccuracy {
    std::map<int, double> per_class;  // class_id -> accuracy
    double mean = 0.0;                // unweighted mean over classes
};

/// A case counts as correct when any predicted box reaches IoU >= t_iou with
/// its ground-truth box.
LocalizationAccuracy localization_accuracy(const std::vector<LocalizationCase>& cases,
                                           double t_iou);

struct SweepReport {
    std::vector<double> thresholds;
    std::vector<int> class_ids;                   // sorted
    std::vector<LocalizationAccuracy> rows;       // one per threshold
    std::string to_csv() const;                   // header: T(IoU),<classes...>,Mean
    std::string to_json() const;
};

SweepReport sweep_report(const std::vector<LocalizationCase>& cases,
                         const std::vector<double>& thresholds);

}  // namespace xrad
