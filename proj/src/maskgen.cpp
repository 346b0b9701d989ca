#include "xrad/maskgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace xrad {

GrayImage normalize_heatmap(const Heatmap& h) {
    if (h.width < 1 || h.height < 1) throw InputError("normalize_heatmap: empty heatmap");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : h.values) {
        if (!std::isfinite(v)) throw InputError("normalize_heatmap: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    GrayImage out(h.width, h.height);
    if (hi == lo) return out;  // constant map carries no signal
    const double scale = 255.0 / (hi - lo);
    for (size_t i = 0; i < h.values.size(); ++i) {
        double v = (h.values[i] - lo) * scale;
        out.pixels[i] = std::floor(v + 0.5);  // round half away from zero (v >= 0)
    }
    return out;
}

RoiMask threshold_binary(const GrayImage& img, double t) {
    if (!(t > 0.0 && t < 255.0)) throw ConfigError("threshold_binary: t must be in (0, 255)");
    RoiMask m(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) m.bits[i] = img.pixels[i] >= t ? 1 : 0;
    return m;
}

std::vector<RoiMask> connected_components(const RoiMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw ConfigError("connected_components: connectivity must be 4 or 8");
    const int w = mask.width, ht = mask.height;
    std::vector<RoiMask> out;
    std::vector<uint8_t> seen(mask.bits.size(), 0);

    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int ndirs = connectivity == 4 ? 4 : 8;

    // Row-major seed scan gives topmost-then-leftmost component ordering.
    for (int y = 0; y < ht; ++y) {
        for (int x = 0; x < w; ++x) {
            size_t idx = static_cast<size_t>(y) * w + x;
            if (!mask.bits[idx] || seen[idx]) continue;
            RoiMask region(w, ht);
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[idx] = 1;
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                region.set(cx, cy);
                for (int d = 0; d < ndirs; ++d) {
                    int nx = cx + dx8[d], ny = cy + dy8[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= ht) continue;
                    size_t nidx = static_cast<size_t>(ny) * w + nx;
                    if (mask.bits[nidx] && !seen[nidx]) {
                        seen[nidx] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            out.push_back(std::move(region));
        }
    }
    return out;
}

std::vector<BoundingBox> boxes_from_components(const std::vector<RoiMask>& regions) {
    std::vector<BoundingBox> out;
    out.reserve(regions.size());
    for (const RoiMask& r : regions) {
        int minx = r.width, miny = r.height, maxx = -1, maxy = -1;
        for (int y = 0; y < r.height; ++y)
            for (int x = 0; x < r.width; ++x)
                if (r.test(x, y)) {
                    minx = std::min(minx, x);
                    miny = std::min(miny, y);
                    maxx = std::max(maxx, x);
                    maxy = std::max(maxy, y);
                }
        if (maxx < 0) throw InputError("boxes_from_components: empty region");
        out.push_back({minx, miny, maxx - minx + 1, maxy - miny + 1});
    }
    return out;
}

std::vector<TaggedBox> generate_bboxes(const Heatmap& h, const std::vector<double>& thresholds,
                                       int connectivity, long long min_area) {
    if (thresholds.empty()) throw ConfigError("generate_bboxes: thresholds empty");
    GrayImage norm = normalize_heatmap(h);
    std::vector<TaggedBox> out;
    for (double t : thresholds) {
        RoiMask m = threshold_binary(norm, t);
        std::vector<RoiMask> comps = connected_components(m, connectivity);
        for (const RoiMask& c : comps) {
            if (static_cast<long long>(c.count()) < min_area) continue;
            BoundingBox b = boxes_from_components({c}).front();
            out.push_back({t, b});
        }
    }
    return out;
}

namespace {

// Piecewise-linear jet-style colormap over [0, 1].
void jet(double v, uint8_t& r, uint8_t& g, uint8_t& b) {
    v = std::clamp(v, 0.0, 1.0);
    auto ch = [](double x) {
        return static_cast<uint8_t>(std::clamp(x, 0.0, 1.0) * 255.0 + 0.5);
    };
    r = ch(1.5 - std::abs(4.0 * v - 3.0));
    g = ch(1.5 - std::abs(4.0 * v - 2.0));
    b = ch(1.5 - std::abs(4.0 * v - 1.0));
}

}  // namespace

RgbImage render_overlay(const GrayImage& img, const Heatmap& h,
                        const std::vector<BoundingBox>& boxes) {
    if (img.width != h.width || img.height != h.height)
        throw InputError("render_overlay: image/heatmap dimension mismatch");
    for (const BoundingBox& b : boxes) {
        if (b.w < 1 || b.h < 1 || b.x < 0 || b.y < 0 || b.x + b.w > img.width ||
            b.y + b.h > img.height)
            throw InputError("render_overlay: box outside image bounds");
    }
    GrayImage norm = normalize_heatmap(h);
    RgbImage out(img.width, img.height);
    const double alpha = 0.4;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double base = std::clamp(img.at(x, y), 0.0, 255.0);
            double nv = norm.at(x, y) / 255.0;
            uint8_t hr = 0, hg = 0, hb = 0;
            double a = 0.0;
            if (nv > 0.0) {
                jet(nv, hr, hg, hb);
                a = alpha;
            }
            size_t o = (static_cast<size_t>(y) * img.width + x) * 3;
            out.data[o + 0] = static_cast<uint8_t>((1.0 - a) * base + a * hr + 0.5);
            out.data[o + 1] = static_cast<uint8_t>((1.0 - a) * base + a * hg + 0.5);
            out.data[o + 2] = static_cast<uint8_t>((1.0 - a) * base + a * hb + 0.5);
        }
    }
    // 1-px green outlines
    for (const BoundingBox& b : boxes) {
        auto paint = [&](int px, int py) {
            size_t o = (static_cast<size_t>(py) * out.width + px) * 3;
            out.data[o + 0] = 0;
            out.data[o + 1] = 255;
            out.data[o + 2] = 0;
        };
        for (int x = b.x; x < b.x + b.w; ++x) {
            paint(x, b.y);
            paint(x, b.y + b.h - 1);
        }
        for (int y = b.y; y < b.y + b.h; ++y) {
            paint(b.x, y);
            paint(b.x + b.w - 1, y);
        }
    }
    return out;
}

}  // namespace xrad
