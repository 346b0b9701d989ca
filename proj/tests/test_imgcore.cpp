#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "xrad/maskgen.hpp"

using namespace xrad;

namespace {

Heatmap make_heatmap(int w, int h, const std::vector<double>& vals) {
    Heatmap m(w, h);
    m.values = vals;
    return m;
}

RoiMask random_mask(std::mt19937_64& rng, int w, int h, double density = 0.4) {
    RoiMask m(w, h);
    std::bernoulli_distribution bit(density);
    for (auto& b : m.bits) b = bit(rng) ? 1 : 0;
    return m;
}

// independent flood fill used as the component oracle
int count_components_oracle(const RoiMask& m, int connectivity) {
    std::vector<uint8_t> seen(m.bits.size(), 0);
    int n = 0;
    auto flood = [&](int sx, int sy) {
        std::vector<std::pair<int, int>> stack{{sx, sy}};
        seen[static_cast<size_t>(sy) * m.width + sx] = 1;
        while (!stack.empty()) {
            auto [x, y] = stack.back();
            stack.pop_back();
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (connectivity == 4 && dx != 0 && dy != 0) continue;
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
                    size_t i = static_cast<size_t>(ny) * m.width + nx;
                    if (m.bits[i] && !seen[i]) {
                        seen[i] = 1;
                        stack.emplace_back(nx, ny);
                    }
                }
        }
    };
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.test(x, y) && !seen[static_cast<size_t>(y) * m.width + x]) {
                ++n;
                flood(x, y);
            }
    return n;
}

Heatmap gaussian_blob(int w, int h, double cx, double cy, double sigma) {
    Heatmap m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.at(x, y) = std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) /
                                  (2.0 * sigma * sigma));
    return m;
}

}  // namespace

TEST_CASE("normalize_heatmap: direct formula") {
    GrayImage g = normalize_heatmap(make_heatmap(3, 1, {0, 128, 256}));
    CHECK(g.pixels[0] == 0);
    CHECK(g.pixels[1] == 128);  // 127.5 rounds away from zero
    CHECK(g.pixels[2] == 255);

    GrayImage g2 = normalize_heatmap(make_heatmap(2, 1, {-1, 1}));
    CHECK(g2.pixels[0] == 0);
    CHECK(g2.pixels[1] == 255);
}

TEST_CASE("normalize_heatmap: constant map is all-zero") {
    GrayImage g = normalize_heatmap(Heatmap(4, 4, 3.7));
    CHECK(std::all_of(g.pixels.begin(), g.pixels.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("normalize_heatmap: non-constant input spans [0, 255]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-10, 10);
    Heatmap h(8, 8);
    for (auto& v : h.values) v = dist(rng);
    GrayImage g = normalize_heatmap(h);
    CHECK(*std::min_element(g.pixels.begin(), g.pixels.end()) == 0);
    CHECK(*std::max_element(g.pixels.begin(), g.pixels.end()) == 255);
}

TEST_CASE("normalize_heatmap: invariant under positive affine transforms") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        Heatmap h(6, 5);
        for (auto& v : h.values) v = dist(rng);
        Heatmap h2 = h;
        double a = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        double b = dist(rng);
        for (auto& v : h2.values) v = a * v + b;
        GrayImage g1 = normalize_heatmap(h);
        GrayImage g2 = normalize_heatmap(h2);
        // rounding at .5 boundaries may flip by one count under rescaling
        for (size_t i = 0; i < g1.pixels.size(); ++i)
            CHECK(std::abs(g1.pixels[i] - g2.pixels[i]) <= 1.0);
    }
}

TEST_CASE("threshold_binary") {
    GrayImage img(3, 1);
    img.pixels = {50, 60, 200};
    RoiMask m = threshold_binary(img, 60);
    CHECK(m.bits == std::vector<uint8_t>{0, 1, 1});

    CHECK(threshold_binary(GrayImage(2, 2, 255), 60).count() == 4);
    CHECK(threshold_binary(GrayImage(2, 2, 0), 60).count() == 0);
    CHECK_THROWS_AS(threshold_binary(img, 0), ConfigError);
    CHECK_THROWS_AS(threshold_binary(img, 255), ConfigError);
}

TEST_CASE("connected_components: disjoint blobs and empty mask") {
    RoiMask m(8, 8);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) {
            m.set(x, y);
            m.set(x + 5, y + 5);
        }
    auto comps = connected_components(m, 8);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].count() == 4);
    CHECK(comps[1].count() == 4);
    CHECK(comps[0].test(0, 0));  // topmost-leftmost first

    CHECK(connected_components(RoiMask(4, 4), 8).empty());
}

TEST_CASE("connected_components: 8-connectivity joins a checkerboard") {
    RoiMask m(6, 6);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x)
            if ((x + y) % 2 == 0) m.set(x, y);
    CHECK(connected_components(m, 8).size() == 1);
    CHECK(connected_components(m, 4).size() == m.count());
}

TEST_CASE("connected_components: partition property on random masks") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        RoiMask m = random_mask(rng, 10, 10);
        int conn = trial % 2 == 0 ? 8 : 4;
        auto comps = connected_components(m, conn);
        CHECK(static_cast<int>(comps.size()) == count_components_oracle(m, conn));
        // disjoint and union-reconstructing
        RoiMask acc(10, 10);
        size_t total = 0;
        for (const auto& c : comps) {
            for (size_t i = 0; i < c.bits.size(); ++i) {
                if (c.bits[i]) {
                    CHECK(!acc.bits[i]);
                    acc.bits[i] = 1;
                }
            }
            total += c.count();
        }
        CHECK(acc.bits == m.bits);
        CHECK(total == m.count());
    }
}

TEST_CASE("boxes_from_components: tight covers") {
    RoiMask single(8, 8);
    single.set(3, 5);
    CHECK(boxes_from_components({single})[0] == BoundingBox{3, 5, 1, 1});

    CHECK(boxes_from_components({RoiMask(10, 8, true)})[0] == BoundingBox{0, 0, 10, 8});

    RoiMask ell(8, 8);
    for (int y = 2; y <= 6; ++y) ell.set(1, y);
    for (int x = 1; x <= 4; ++x) ell.set(x, 6);
    CHECK(boxes_from_components({ell})[0] == BoundingBox{1, 2, 4, 5});
}

TEST_CASE("box tightness: shrinking any edge excludes a region pixel") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        RoiMask m = random_mask(rng, 9, 9, 0.3);
        for (const auto& [region, box] : [&] {
                 auto comps = connected_components(m, 8);
                 auto boxes = boxes_from_components(comps);
                 std::vector<std::pair<RoiMask, BoundingBox>> out;
                 for (size_t i = 0; i < comps.size(); ++i) out.emplace_back(comps[i], boxes[i]);
                 return out;
             }()) {
            auto covered_outside = [&](const BoundingBox& b) {
                for (int y = 0; y < m.height; ++y)
                    for (int x = 0; x < m.width; ++x)
                        if (region.test(x, y) && !b.contains(x, y)) return true;
                return false;
            };
            CHECK(covered_outside({box.x + 1, box.y, box.w - 1, box.h}));
            CHECK(covered_outside({box.x, box.y + 1, box.w, box.h - 1}));
            CHECK(covered_outside({box.x, box.y, box.w - 1, box.h}));
            CHECK(covered_outside({box.x, box.y, box.w, box.h - 1}));
        }
    }
}

TEST_CASE("generate_bboxes: constant heatmap yields nothing") {
    CHECK(generate_bboxes(Heatmap(16, 16, 1.0), {60, 180}).empty());
}

TEST_CASE("generate_bboxes: gaussian blob, both thresholds, nesting") {
    Heatmap h = gaussian_blob(64, 64, 32, 32, 6.0);
    auto boxes = generate_bboxes(h, {60, 180});
    bool has60 = false, has180 = false;
    for (const auto& tb : boxes) {
        CHECK(tb.box.contains(32, 32));
        if (tb.threshold == 60) has60 = true;
        if (tb.threshold == 180) has180 = true;
    }
    CHECK(has60);
    CHECK(has180);
    for (const auto& hi : boxes) {
        if (hi.threshold != 180) continue;
        bool nested = false;
        for (const auto& lo : boxes)
            if (lo.threshold == 60 && hi.box.inside(lo.box)) nested = true;
        CHECK(nested);
    }
}

TEST_CASE("threshold monotonicity on random heatmaps") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        Heatmap h(12, 12);
        for (auto& v : h.values) v = dist(rng);
        GrayImage norm = normalize_heatmap(h);
        RoiMask lo = threshold_binary(norm, 60);
        RoiMask hi = threshold_binary(norm, 180);
        for (size_t i = 0; i < lo.bits.size(); ++i)
            if (hi.bits[i]) CHECK(lo.bits[i]);
        // every 180-box nests inside some 60-box
        auto boxes = generate_bboxes(h, {60, 180});
        for (const auto& b : boxes) {
            if (b.threshold != 180) continue;
            bool nested = false;
            for (const auto& c : boxes)
                if (c.threshold == 60 && b.box.inside(c.box)) nested = true;
            CHECK(nested);
        }
    }
}

TEST_CASE("generate_bboxes: min_area filters small components") {
    Heatmap h(16, 16, 0.0);
    h.at(2, 2) = 1.0;  // 1-px blob
    for (int y = 8; y < 12; ++y)
        for (int x = 8; x < 12; ++x) h.at(x, y) = 1.0;  // 16-px blob
    auto all = generate_bboxes(h, {60}, 8, 1);
    CHECK(all.size() == 2);
    auto filtered = generate_bboxes(h, {60}, 8, 4);
    REQUIRE(filtered.size() == 1);
    CHECK(filtered[0].box == BoundingBox{8, 8, 4, 4});
}

TEST_CASE("render_overlay") {
    GrayImage img(6, 6, 100.0);
    Heatmap zero(6, 6, 0.0);

    SUBCASE("zero heatmap, no boxes: grayscale replication") {
        RgbImage rgb = render_overlay(img, zero, {});
        for (size_t i = 0; i < rgb.data.size(); ++i) CHECK(rgb.data[i] == 100);
    }

    SUBCASE("one box recolors exactly its outline") {
        BoundingBox b{1, 2, 3, 2};
        RgbImage base = render_overlay(img, zero, {});
        RgbImage with = render_overlay(img, zero, {b});
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x) {
                size_t o = (static_cast<size_t>(y) * 6 + x) * 3;
                bool on_outline = b.contains(x, y) &&
                                  (x == b.x || x == b.x + b.w - 1 || y == b.y ||
                                   y == b.y + b.h - 1);
                if (on_outline) {
                    CHECK(with.data[o] == 0);
                    CHECK(with.data[o + 1] == 255);
                    CHECK(with.data[o + 2] == 0);
                } else {
                    CHECK(with.data[o] == base.data[o]);
                    CHECK(with.data[o + 1] == base.data[o + 1]);
                    CHECK(with.data[o + 2] == base.data[o + 2]);
                }
            }
    }

    SUBCASE("mismatched sizes rejected") {
        CHECK_THROWS_AS(render_overlay(img, Heatmap(5, 6), {}), InputError);
    }
}
