#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "ref/reference.hpp"
#include "xrad/metrics.hpp"

using namespace xrad;

namespace {

std::vector<ScoredSample> make_samples(const std::vector<double>& scores,
                                       const std::vector<int>& labels) {
    std::vector<ScoredSample> out;
    for (size_t i = 0; i < scores.size(); ++i) out.push_back({scores[i], labels[i], 0, ""});
    return out;
}

}  // namespace

TEST_CASE("roc_auc: perfect ranking, pure ties, single class") {
    CHECK(roc_auc(make_samples({0.9, 0.1}, {1, 0})) == 1.0);
    CHECK(roc_auc(make_samples({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0})) == 0.5);
    CHECK_THROWS_AS(roc_auc(make_samples({0.2, 0.8}, {1, 1})), MetricError);
}

TEST_CASE("roc_auc: matches pairwise counting, tie-heavy included") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> n_dist(2, 100);
    std::bernoulli_distribution lab(0.4);
    for (int trial = 0; trial < 500; ++trial) {
        int n = n_dist(rng);
        std::vector<ScoredSample> s(n);
        // quantized scores force plenty of ties
        std::uniform_int_distribution<int> q(0, trial % 7 + 1);
        bool has_pos = false, has_neg = false;
        for (auto& x : s) {
            x.score = q(rng) / 10.0;
            x.label = lab(rng) ? 1 : 0;
            (x.label ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(std::abs(roc_auc(s) - ref::roc_auc_pairwise(s)) < 1e-12);
    }
}

TEST_CASE("roc_auc: invariant under strictly monotone score transforms") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ScoredSample> s(30);
        bool has_pos = false, has_neg = false;
        for (auto& x : s) {
            x.score = dist(rng);
            x.label = dist(rng) < 0.5 ? 1 : 0;
            (x.label ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        double base = roc_auc(s);
        std::vector<ScoredSample> t = s;
        for (auto& x : t) x.score = std::exp(3.0 * x.score) + 1.0;
        CHECK(roc_auc(t) == doctest::Approx(base).epsilon(1e-14));
    }
}

TEST_CASE("roc_auc: label flip complements the score (tie-free)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0, 1);
    std::vector<ScoredSample> s(40);
    for (size_t i = 0; i < s.size(); ++i) {
        s[i].score = (static_cast<double>(i) + dist(rng) * 0.5) / 50.0;  // distinct
        s[i].label = i % 3 == 0 ? 1 : 0;
    }
    double a = roc_auc(s);
    for (auto& x : s) x.label = 1 - x.label;
    CHECK(roc_auc(s) == doctest::Approx(1.0 - a).epsilon(1e-14));
}

TEST_CASE("iou") {
    BoundingBox a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {20, 20, 5, 5}) == 0.0);
    CHECK(iou(a, {5, 5, 10, 10}) == doctest::Approx(25.0 / 175.0));
    CHECK(iou(a, {5, 5, 10, 10}) == iou({5, 5, 10, 10}, a));
}

TEST_CASE("iou: symmetry, range, identity on random boxes") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> pos(0, 20), ext(1, 15);
    for (int trial = 0; trial < 500; ++trial) {
        BoundingBox a{pos(rng), pos(rng), ext(rng), ext(rng)};
        BoundingBox b{pos(rng), pos(rng), ext(rng), ext(rng)};
        double v = iou(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == iou(b, a));
        if (v == 1.0) CHECK(a == b);
    }
}

TEST_CASE("localization_accuracy: perfect predictions and monotonicity") {
    std::vector<LocalizationCase> cases;
    for (int cls = 0; cls < 4; ++cls)
        cases.push_back({"img" + std::to_string(cls), cls,
                         {cls, cls, 10, 10},
                         {{cls, cls, 10, 10}}});
    for (double t : {0.1, 0.5, 1.0}) {
        LocalizationAccuracy acc = localization_accuracy(cases, t);
        CHECK(acc.mean == 1.0);
        for (const auto& [cls, v] : acc.per_class) CHECK(v == 1.0);
    }

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pos(0, 10), ext(2, 10);
    std::vector<LocalizationCase> rand_cases;
    for (int i = 0; i < 40; ++i) {
        LocalizationCase c;
        c.class_id = i % 5;
        c.ground_truth = {pos(rng), pos(rng), ext(rng), ext(rng)};
        for (int p = 0; p < 3; ++p)
            c.predictions.push_back({pos(rng), pos(rng), ext(rng), ext(rng)});
        rand_cases.push_back(c);
    }
    CHECK(localization_accuracy(rand_cases, 0.3).mean <=
          localization_accuracy(rand_cases, 0.1).mean);

    CHECK_THROWS_AS(localization_accuracy({}, 0.5), MetricError);
}

TEST_CASE("sweep_report: shape, monotone rows, per-cell recomputation") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> pos(0, 10), ext(2, 10);
    std::vector<LocalizationCase> cases;
    for (int i = 0; i < 60; ++i) {
        LocalizationCase c;
        c.class_id = i % 8;
        c.ground_truth = {pos(rng), pos(rng), ext(rng), ext(rng)};
        for (int p = 0; p < 2; ++p)
            c.predictions.push_back({pos(rng), pos(rng), ext(rng), ext(rng)});
        cases.push_back(c);
    }
    std::vector<double> ts = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    SweepReport rep = sweep_report(cases, ts);
    REQUIRE(rep.rows.size() == 7);
    REQUIRE(rep.class_ids.size() == 8);

    for (size_t r = 0; r + 1 < rep.rows.size(); ++r)
        for (int c : rep.class_ids)
            CHECK(rep.rows[r + 1].per_class.at(c) <= rep.rows[r].per_class.at(c));

    // recompute each cell independently
    for (size_t r = 0; r < ts.size(); ++r) {
        for (int c : rep.class_ids) {
            long long correct = 0, total = 0;
            for (const auto& cs : cases) {
                if (cs.class_id != c) continue;
                ++total;
                for (const auto& p : cs.predictions)
                    if (iou(p, cs.ground_truth) >= ts[r]) {
                        ++correct;
                        break;
                    }
            }
            CHECK(rep.rows[r].per_class.at(c) ==
                  doctest::Approx(static_cast<double>(correct) / total).epsilon(1e-15));
        }
    }

    std::string csv = rep.to_csv();
    CHECK(csv.rfind("T(IoU)", 0) == 0);
    CHECK(csv.find(",Mean") != std::string::npos);
}
