#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "ref/reference.hpp"
#include "xrad/radiomics.hpp"

using namespace xrad;

namespace {

GrayImage image_from(int w, int h, const std::vector<double>& px) {
    GrayImage img(w, h);
    img.pixels = px;
    return img;
}

QuantizedRoi random_roi(std::mt19937_64& rng, int w = 8, int h = 8) {
    std::uniform_int_distribution<int> ng_dist(2, 6);
    std::bernoulli_distribution bit(0.7);
    int ng = ng_dist(rng);
    QuantizedRoi q;
    q.width = w;
    q.height = h;
    q.ng = ng;
    q.levels.assign(static_cast<size_t>(w) * h, 0);
    std::uniform_int_distribution<int> lv(1, ng);
    for (auto& cell : q.levels)
        if (bit(rng)) {
            cell = lv(rng);
            ++q.masked_count;
        }
    if (q.masked_count == 0) {
        q.levels[0] = 1;
        q.masked_count = 1;
    }
    return q;
}

bool same_matrix(const TextureMatrix& a, const TextureMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
}

}  // namespace

TEST_CASE("quantize: formula, constant region, empty mask") {
    GrayImage img = image_from(4, 1, {0, 1, 2, 3});
    RoiMask mask(4, 1, true);
    QuantizedRoi q = quantize(img, mask, 4);
    CHECK(q.levels == std::vector<int>{1, 2, 3, 4});

    QuantizedRoi qc = quantize(GrayImage(3, 3, 5.0), RoiMask(3, 3, true), 8);
    for (int lv : qc.levels) CHECK(lv == 1);

    CHECK_THROWS_AS(quantize(img, RoiMask(4, 1), 4), InputError);
}

TEST_CASE("quantize: masked pixels in range, unmasked zero") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-100, 100);
    GrayImage img(8, 8);
    for (auto& v : img.pixels) v = dist(rng);
    RoiMask mask(8, 8);
    for (int i = 0; i < 30; ++i) mask.bits[std::uniform_int_distribution<int>(0, 63)(rng)] = 1;
    QuantizedRoi q = quantize(img, mask, 16);
    for (size_t i = 0; i < q.levels.size(); ++i) {
        if (mask.bits[i]) {
            CHECK(q.levels[i] >= 1);
            CHECK(q.levels[i] <= 16);
        } else {
            CHECK(q.levels[i] == 0);
        }
    }
}

TEST_CASE("first_order: hand arithmetic and constant case") {
    GrayImage img = image_from(4, 1, {1, 2, 3, 4});
    RoiMask mask(4, 1, true);
    FeatureVector f = first_order(img, mask);
    CHECK(f.at("firstorder.Mean") == doctest::Approx(2.5));
    CHECK(f.at("firstorder.Median") == doctest::Approx(2.5));
    CHECK(f.at("firstorder.Maximum") == 4);
    CHECK(f.at("firstorder.Minimum") == 1);

    FeatureVector c = first_order(GrayImage(3, 3, 7.0), RoiMask(3, 3, true));
    CHECK(c.at("firstorder.Mean") == 7);
    CHECK(c.at("firstorder.Variance") == 0);
    CHECK(c.at("firstorder.Entropy") == 0);
    CHECK(c.at("firstorder.Uniformity") == 1);
    CHECK(c.at("firstorder.Skewness") == 0);
    CHECK(c.at("firstorder.Kurtosis") == 0);
}

TEST_CASE("first_order: ignores pixels outside the mask") {
    GrayImage a = image_from(2, 2, {1, 2, 900, -900});
    GrayImage b = image_from(2, 2, {1, 2, 0, 0});
    RoiMask mask(2, 2);
    mask.set(0, 0);
    mask.set(1, 0);
    CHECK(first_order(a, mask) == first_order(b, mask));
}

TEST_CASE("first_order: mean/variance vs two-pass direct computation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-50, 50);
    for (int trial = 0; trial < 100; ++trial) {
        GrayImage img(8, 8);
        for (auto& v : img.pixels) v = dist(rng);
        RoiMask mask(8, 8, true);
        FeatureVector f = first_order(img, mask);
        double mean = 0;
        for (double v : img.pixels) mean += v;
        mean /= 64.0;
        double var = 0;
        for (double v : img.pixels) var += (v - mean) * (v - mean);
        var /= 64.0;
        CHECK(f.at("firstorder.Mean") == doctest::Approx(mean).epsilon(1e-12));
        CHECK(f.at("firstorder.Variance") == doctest::Approx(var).epsilon(1e-12));
    }
}

TEST_CASE("shape_2d") {
    RoiMask square(12, 12);
    for (int y = 1; y <= 10; ++y)
        for (int x = 1; x <= 10; ++x) square.set(x, y);
    FeatureVector f = shape_2d(square);
    CHECK(f.at("shape.PixelArea") == 100);
    CHECK(f.at("shape.Perimeter") == 40);

    RoiMask single(4, 4);
    single.set(2, 2);
    FeatureVector s = shape_2d(single);
    CHECK(s.at("shape.PixelArea") == 1);
    CHECK(s.at("shape.MaximumDiameter") == 0);

    RoiMask bar(5, 5);
    bar.set(1, 2);
    bar.set(2, 2);
    bar.set(3, 2);
    CHECK(shape_2d(bar).at("shape.MaximumDiameter") == doctest::Approx(2.0));
}

TEST_CASE("shape_2d: maximum diameter matches all-pairs oracle") {
    std::mt19937_64 rng(9);
    std::bernoulli_distribution bit(0.4);
    for (int trial = 0; trial < 200; ++trial) {
        RoiMask m(9, 9);
        for (auto& b : m.bits) b = bit(rng) ? 1 : 0;
        if (m.empty()) continue;
        CHECK(shape_2d(m).at("shape.MaximumDiameter") ==
              doctest::Approx(ref::max_diameter_ref(m)).epsilon(1e-12));
    }
}

TEST_CASE("glcm: worked example and degenerate cases") {
    QuantizedRoi q;
    q.width = q.height = 2;
    q.ng = 2;
    q.levels = {1, 1, 1, 2};
    q.masked_count = 4;
    TextureMatrix m = glcm(q, 1, 0);
    CHECK(m.at(0, 0) == 2);
    CHECK(m.at(0, 1) == 1);
    CHECK(m.at(1, 0) == 1);
    CHECK(m.at(1, 1) == 0);

    QuantizedRoi qc = quantize(GrayImage(3, 1, 9.0), RoiMask(3, 1, true), 4);
    TextureMatrix mc = glcm(qc, 1, 0);
    CHECK(mc.at(0, 0) == 4);  // 2 ordered pairs, symmetrized
    CHECK(mc.sum() == 4);

    QuantizedRoi iso;
    iso.width = 3;
    iso.height = 1;
    iso.ng = 2;
    iso.levels = {1, 0, 2};
    iso.masked_count = 2;
    CHECK(glcm(iso, 1, 0).sum() == 0);
}

TEST_CASE("glcm_features: closed forms") {
    TextureMatrix diag{MatrixKind::GLCM, 3, 3, {2, 0, 0, 0, 4, 0, 0, 0, 2}};
    FeatureVector f = glcm_features(diag);
    CHECK(f.at("glcm.Contrast") == 0);

    int ng = 4;
    TextureMatrix uniform{MatrixKind::GLCM, ng, ng,
                          std::vector<double>(static_cast<size_t>(ng) * ng, 1.0)};
    CHECK(glcm_features(uniform).at("glcm.Energy") == doctest::Approx(1.0 / (ng * ng)));

    TextureMatrix constant{MatrixKind::GLCM, 2, 2, {8, 0, 0, 0}};
    FeatureVector c = glcm_features(constant);
    CHECK(c.at("glcm.Entropy") == 0);
    CHECK(c.at("glcm.Energy") == 1);

    TextureMatrix zero{MatrixKind::GLCM, 2, 2, {0, 0, 0, 0}};
    CHECK_THROWS_AS(glcm_features(zero), InputError);
}

TEST_CASE("glcm: symmetry property on random inputs") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> angle_pick(0, 3);
    const int angles[] = {0, 45, 90, 135};
    for (int trial = 0; trial < 500; ++trial) {
        QuantizedRoi q = random_roi(rng);
        int delta = std::uniform_int_distribution<int>(1, 3)(rng);
        TextureMatrix m = glcm(q, delta, angles[angle_pick(rng)]);
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j) CHECK(m.at(i, j) == m.at(j, i));
    }
}

TEST_CASE("glszm: constant region and disjoint zones") {
    QuantizedRoi qc = quantize(GrayImage(3, 3, 2.0), RoiMask(3, 3, true), 4);
    TextureMatrix m = glszm(qc);
    CHECK(m.at(0, 8) == 1);  // one zone of size 9 at level 1
    CHECK(m.sum() == 1);

    QuantizedRoi q;
    q.width = 8;
    q.height = 1;
    q.ng = 4;
    q.levels = {3, 3, 0, 3, 3, 3, 3, 3};
    q.masked_count = 7;
    TextureMatrix z = glszm(q);
    CHECK(z.at(2, 1) == 1);  // size-2 zone of level 3
    CHECK(z.at(2, 4) == 1);  // size-5 zone of level 3
}

TEST_CASE("glrlm: runs along a row") {
    QuantizedRoi q;
    q.width = 4;
    q.height = 1;
    q.ng = 2;
    q.levels = {1, 1, 1, 2};
    q.masked_count = 4;
    TextureMatrix m = glrlm(q, 0);
    CHECK(m.at(0, 2) == 1);
    CHECK(m.at(1, 0) == 1);

    QuantizedRoi row;
    row.width = 6;
    row.height = 1;
    row.ng = 2;
    row.levels.assign(6, 1);
    row.masked_count = 6;
    CHECK(glrlm(row, 0).at(0, 5) == 1);
}

TEST_CASE("ngtdm: constant, isolated pixel, center-ring") {
    QuantizedRoi qc = quantize(GrayImage(4, 4, 1.0), RoiMask(4, 4, true), 4);
    TextureMatrix mc = ngtdm(qc, 1);
    for (int i = 0; i < mc.rows; ++i) CHECK(mc.at(i, 1) == 0);

    QuantizedRoi iso;
    iso.width = 3;
    iso.height = 3;
    iso.ng = 2;
    iso.levels.assign(9, 0);
    iso.levels[4] = 1;
    iso.masked_count = 1;
    TextureMatrix mi = ngtdm(iso, 1);
    CHECK(mi.sum() == 0);

    QuantizedRoi ring;
    ring.width = 3;
    ring.height = 3;
    ring.ng = 2;
    ring.levels.assign(9, 1);
    ring.levels[4] = 2;
    ring.masked_count = 9;
    TextureMatrix mr = ngtdm(ring, 1);
    CHECK(mr.at(1, 1) == doctest::Approx(1.0));  // s_2: |2 - mean(1)| = 1
    CHECK(mr.at(1, 0) == 1);
}

TEST_CASE("gldm: dependence counting") {
    QuantizedRoi qc = quantize(GrayImage(3, 3, 4.0), RoiMask(3, 3, true), 4);
    TextureMatrix m = gldm(qc, 1, 0);
    CHECK(m.at(0, 8) == 1);  // interior pixel depends on all 8 neighbors
    CHECK(m.sum() == 9);

    QuantizedRoi single;
    single.width = 1;
    single.height = 1;
    single.ng = 2;
    single.levels = {2};
    single.masked_count = 1;
    TextureMatrix s = gldm(single, 1, 0);
    CHECK(s.at(1, 0) == 1);
}

TEST_CASE("texture builders match brute-force oracles on random rois") {
    std::mt19937_64 rng(42);
    const int angles[] = {0, 45, 90, 135};
    for (int trial = 0; trial < 300; ++trial) {
        QuantizedRoi q = random_roi(rng);
        int delta = std::uniform_int_distribution<int>(1, 2)(rng);
        int alpha = std::uniform_int_distribution<int>(0, 1)(rng);
        int angle = angles[trial % 4];
        CHECK(same_matrix(glcm(q, delta, angle), ref::glcm_ref(q, delta, angle)));
        CHECK(same_matrix(glszm(q), ref::glszm_ref(q)));
        CHECK(same_matrix(glrlm(q, angle), ref::glrlm_ref(q, angle)));
        CHECK(same_matrix(gldm(q, delta, alpha), ref::gldm_ref(q, delta, alpha)));
        TextureMatrix a = ngtdm(q, delta), b = ref::ngtdm_ref(q, delta);
        REQUIRE(a.entries.size() == b.entries.size());
        for (size_t i = 0; i < a.entries.size(); ++i)
            CHECK(a.entries[i] == doctest::Approx(b.entries[i]).epsilon(1e-12));
    }
}

TEST_CASE("mass identities") {
    std::mt19937_64 rng(77);
    const int angles[] = {0, 45, 90, 135};
    for (int trial = 0; trial < 300; ++trial) {
        QuantizedRoi q = random_roi(rng);
        double n = static_cast<double>(q.masked_count);

        TextureMatrix z = glszm(q);
        double zmass = 0;
        for (int i = 0; i < z.rows; ++i)
            for (int s = 0; s < z.cols; ++s) zmass += (s + 1) * z.at(i, s);
        CHECK(zmass == n);

        for (int angle : angles) {
            TextureMatrix r = glrlm(q, angle);
            double rmass = 0;
            for (int i = 0; i < r.rows; ++i)
                for (int l = 0; l < r.cols; ++l) rmass += (l + 1) * r.at(i, l);
            CHECK(rmass == n);
        }

        CHECK(gldm(q, 1, 0).sum() == n);
    }
}

TEST_CASE("intensity shift leaves quantized-level features unchanged") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(0, 100);
    RadiomicsConfig cfg;
    cfg.ng = 8;
    for (int trial = 0; trial < 20; ++trial) {
        GrayImage img(8, 8);
        for (auto& v : img.pixels) v = dist(rng);
        GrayImage shifted = img;
        for (auto& v : shifted.pixels) v += 37.5;
        RoiMask mask(8, 8, true);
        FeatureVector a = extract_all(img, mask, cfg);
        FeatureVector b = extract_all(shifted, mask, cfg);
        for (const auto& [name, value] : a) {
            if (name.rfind("firstorder.", 0) == 0 &&
                name != "firstorder.Entropy" && name != "firstorder.Uniformity")
                continue;  // raw-intensity statistics legitimately shift
            CHECK(b.at(name) == doctest::Approx(value).epsilon(1e-12));
        }
    }
}

TEST_CASE("extract_all: determinism and schema stability") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> dist(0, 255);
    RadiomicsConfig cfg;
    GrayImage img(16, 16);
    for (auto& v : img.pixels) v = dist(rng);
    RoiMask mask(16, 16, true);

    FeatureVector a = extract_all(img, mask, cfg);
    FeatureVector b = extract_all(img, mask, cfg);
    CHECK(a == b);

    GrayImage img2(16, 16);
    for (auto& v : img2.pixels) v = dist(rng);
    FeatureVector c = extract_all(img2, mask, cfg);
    CHECK(a.size() == c.size());
    auto ia = a.begin();
    auto ic = c.begin();
    for (; ia != a.end(); ++ia, ++ic) CHECK(ia->first == ic->first);
}

TEST_CASE("extract_all: constant image degenerates") {
    RadiomicsConfig cfg;
    FeatureVector f = extract_all(GrayImage(8, 8, 42.0), RoiMask(8, 8, true), cfg);
    CHECK(f.at("glcm.Contrast") == 0);
    CHECK(f.at("glcm.Entropy") == 0);
    CHECK(f.at("ngtdm.Contrast") == 0);
    CHECK(f.at("glszm.ZoneEntropy") == 0);
    // run lengths and dependence counts still vary with position on a
    // constant image, so those entropies stay positive
    CHECK(f.at("glrlm.RunEntropy") > 0);
    CHECK(f.at("gldm.DependenceEntropy") > 0);
}
