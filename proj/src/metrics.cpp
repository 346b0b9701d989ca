#include "xrad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace xrad {

double roc_auc(const std::vector<ScoredSample>& samples) {
    size_t n_pos = 0, n_neg = 0;
    for (const auto& s : samples) (s.label ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0)
        throw MetricError("roc_auc: need at least one positive and one negative sample");

    // Average ranks over tie groups, then the Mann-Whitney statistic.
    std::vector<size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return samples[a].score < samples[b].score; });

    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && samples[order[j]].score == samples[order[i]].score) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (size_t t = i; t < j; ++t)
            if (samples[order[t]].label) rank_sum_pos += avg_rank;
        i = j;
    }
    double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    long long ix = std::max(0LL, static_cast<long long>(std::min(a.x + a.w, b.x + b.w)) -
                                     std::max(a.x, b.x));
    long long iy = std::max(0LL, static_cast<long long>(std::min(a.y + a.h, b.y + b.h)) -
                                     std::max(a.y, b.y));
    long long inter = ix * iy;
    long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

LocalizationAccuracy localization_accuracy(const std::vector<LocalizationCase>& cases,
                                           double t_iou) {
    if (cases.empty()) throw MetricError("localization_accuracy: empty case set");
    if (!(t_iou > 0.0 && t_iou <= 1.0))
        throw MetricError("localization_accuracy: t_iou must be in (0, 1]");

    std::map<int, std::pair<long long, long long>> tally;  // class -> (correct, total)
    for (const auto& c : cases) {
        bool hit = std::any_of(c.predictions.begin(), c.predictions.end(),
                               [&](const BoundingBox& p) { return iou(p, c.ground_truth) >= t_iou; });
        auto& [correct, total] = tally[c.class_id];
        correct += hit ? 1 : 0;
        total += 1;
    }
    LocalizationAccuracy out;
    double sum = 0.0;
    for (const auto& [cls, ct] : tally) {
        double acc = static_cast<double>(ct.first) / static_cast<double>(ct.second);
        out.per_class[cls] = acc;
        sum += acc;
    }
    out.mean = sum / static_cast<double>(tally.size());
    return out;
}

SweepReport sweep_report(const std::vector<LocalizationCase>& cases,
                         const std::vector<double>& thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw MetricError("sweep_report: thresholds must be ascending");
    SweepReport rep;
    rep.thresholds = thresholds;
    std::set<int> classes;
    for (const auto& c : cases) classes.insert(c.class_id);
    rep.class_ids.assign(classes.begin(), classes.end());
    for (double t : thresholds) rep.rows.push_back(localization_accuracy(cases, t));
    return rep;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string SweepReport::to_csv() const {
    std::ostringstream os;
    os << "T(IoU)";
    for (int c : class_ids) os << ",class_" << c;
    os << ",Mean\n";
    for (size_t r = 0; r < rows.size(); ++r) {
        os << fmt(thresholds[r]);
        for (int c : class_ids) os << "," << fmt(rows[r].per_class.at(c));
        os << "," << fmt(rows[r].mean) << "\n";
    }
    return os.str();
}

std::string SweepReport::to_json() const {
    nlohmann::json j;
    j["thresholds"] = thresholds;
    j["class_ids"] = class_ids;
    nlohmann::json jrows = nlohmann::json::array();
    for (size_t r = 0; r < rows.size(); ++r) {
        nlohmann::json row;
        row["t_iou"] = thresholds[r];
        nlohmann::json pc;
        for (int c : class_ids) pc["class_" + std::to_string(c)] = rows[r].per_class.at(c);
        row["per_class"] = pc;
        row["mean"] = rows[r].mean;
        jrows.push_back(row);
    }
    j["rows"] = jrows;
    return j.dump(2);
}

}  // namespace xrad
