#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace xrad::ref {

TextureMatrix glcm_ref(const QuantizedRoi& q, int delta, int angle_deg) {
    Offset o = angle_offset(angle_deg);
    const int ng = q.ng;
    TextureMatrix m{MatrixKind::GLCM, ng, ng,
                    std::vector<double>(static_cast<size_t>(ng) * ng, 0.0)};
    // enumerate every ordered pixel pair and test the offset relation
    for (int y1 = 0; y1 < q.height; ++y1)
        for (int x1 = 0; x1 < q.width; ++x1)
            for (int y2 = 0; y2 < q.height; ++y2)
                for (int x2 = 0; x2 < q.width; ++x2) {
                    if (x2 - x1 != o.dx * delta || y2 - y1 != o.dy * delta) continue;
                    int a = q.at(x1, y1), b = q.at(x2, y2);
                    if (a == 0 || b == 0) continue;
                    m.at(a - 1, b - 1) += 1.0;
                    m.at(b - 1, a - 1) += 1.0;
                }
    return m;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

TextureMatrix glszm_ref(const QuantizedRoi& q) {
    const int n = q.width * q.height;
    UnionFind uf(n);
    for (int y = 0; y < q.height; ++y)
        for (int x = 0; x < q.width; ++x) {
            int lv = q.at(x, y);
            if (lv == 0) continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
                    if (q.at(nx, ny) == lv) uf.unite(y * q.width + x, ny * q.width + nx);
                }
        }
    std::map<int, long long> zone_size;
    for (int i = 0; i < n; ++i)
        if (q.levels[i] != 0) zone_size[uf.find(i)] += 1;
    long long max_size = 1;
    for (auto& [root, s] : zone_size) max_size = std::max(max_size, s);
    TextureMatrix m{MatrixKind::GLSZM, q.ng, static_cast<int>(max_size),
                    std::vector<double>(static_cast<size_t>(q.ng) * max_size, 0.0)};
    for (auto& [root, s] : zone_size)
        m.at(q.levels[root] - 1, static_cast<int>(s - 1)) += 1.0;
    return m;
}

TextureMatrix glrlm_ref(const QuantizedRoi& q, int angle_deg) {
    Offset o = angle_offset(angle_deg);
    std::vector<std::pair<int, long long>> runs;
    for (int y = 0; y < q.height; ++y)
        for (int x = 0; x < q.width; ++x) {
            int lv = q.at(x, y);
            if (lv == 0) continue;
            // run start: predecessor missing, unmasked, or different level
            int px = x - o.dx, py = y - o.dy;
            bool start = px < 0 || py < 0 || px >= q.width || py >= q.height ||
                         q.at(px, py) != lv;
            if (!start) continue;
            long long len = 0;
            int cx = x, cy = y;
            while (cx >= 0 && cy >= 0 && cx < q.width && cy < q.height && q.at(cx, cy) == lv) {
                ++len;
                cx += o.dx;
                cy += o.dy;
            }
            runs.emplace_back(lv, len);
        }
    long long max_len = 1;
    for (auto& [lv, r] : runs) max_len = std::max(max_len, r);
    TextureMatrix m{MatrixKind::GLRLM, q.ng, static_cast<int>(max_len),
                    std::vector<double>(static_cast<size_t>(q.ng) * max_len, 0.0)};
    for (auto& [lv, r] : runs) m.at(lv - 1, static_cast<int>(r - 1)) += 1.0;
    return m;
}

TextureMatrix ngtdm_ref(const QuantizedRoi& q, int delta) {
    TextureMatrix m{MatrixKind::NGTDM, q.ng, 2,
                    std::vector<double>(static_cast<size_t>(q.ng) * 2, 0.0)};
    for (int y = 0; y < q.height; ++y)
        for (int x = 0; x < q.width; ++x) {
            int lv = q.at(x, y);
            if (lv == 0) continue;
            std::vector<int> neigh;
            for (int ny = 0; ny < q.height; ++ny)
                for (int nx = 0; nx < q.width; ++nx) {
                    if (nx == x && ny == y) continue;
                    if (std::max(std::abs(nx - x), std::abs(ny - y)) > delta) continue;
                    if (q.at(nx, ny) != 0) neigh.push_back(q.at(nx, ny));
                }
            if (neigh.empty()) continue;
            double avg = std::accumulate(neigh.begin(), neigh.end(), 0.0) /
                         static_cast<double>(neigh.size());
            m.at(lv - 1, 0) += 1.0;
            m.at(lv - 1, 1) += std::abs(lv - avg);
        }
    return m;
}

TextureMatrix gldm_ref(const QuantizedRoi& q, int delta, int alpha) {
    const int win = 2 * delta + 1;
    const int cols = win * win;
    TextureMatrix m{MatrixKind::GLDM, q.ng, cols,
                    std::vector<double>(static_cast<size_t>(q.ng) * cols, 0.0)};
    for (int y = 0; y < q.height; ++y)
        for (int x = 0; x < q.width; ++x) {
            int lv = q.at(x, y);
            if (lv == 0) continue;
            int dep = 0;
            for (int ny = 0; ny < q.height; ++ny)
                for (int nx = 0; nx < q.width; ++nx) {
                    if (nx == x && ny == y) continue;
                    if (std::max(std::abs(nx - x), std::abs(ny - y)) > delta) continue;
                    int nl = q.at(nx, ny);
                    if (nl != 0 && std::abs(nl - lv) <= alpha) ++dep;
                }
            m.at(lv - 1, dep) += 1.0;
        }
    return m;
}

Tensor4 conv2d_ref(const Tensor4& x, const Tensor4& kernel, const std::vector<double>& bias) {
    const int cout = kernel.dims[0], cin = kernel.dims[1], k = kernel.dims[2];
    const int pad = (k - 1) / 2;
    Tensor4 out(x.dims[0], cout, x.dims[2], x.dims[3]);
    for (int b = 0; b < x.dims[0]; ++b)
        for (int co = 0; co < cout; ++co)
            for (int oy = 0; oy < x.dims[2]; ++oy)
                for (int ox = 0; ox < x.dims[3]; ++ox) {
                    double acc = bias[co];
                    for (int ci = 0; ci < cin; ++ci)
                        for (int ky = 0; ky < k; ++ky)
                            for (int kx = 0; kx < k; ++kx) {
                                int iy = oy + ky - pad, ix = ox + kx - pad;
                                if (iy < 0 || ix < 0 || iy >= x.dims[2] || ix >= x.dims[3])
                                    continue;
                                acc += x.at(b, ci, iy, ix) * kernel.at(co, ci, ky, kx);
                            }
                    out.at(b, co, oy, ox) = acc;
                }
    return out;
}

double roc_auc_pairwise(const std::vector<ScoredSample>& samples) {
    long long pairs = 0;
    double favorable = 0.0;
    for (const auto& p : samples) {
        if (!p.label) continue;
        for (const auto& n : samples) {
            if (n.label) continue;
            ++pairs;
            if (p.score > n.score)
                favorable += 1.0;
            else if (p.score == n.score)
                favorable += 0.5;
        }
    }
    if (pairs == 0) throw MetricError("roc_auc_pairwise: need both classes");
    return favorable / static_cast<double>(pairs);
}

double max_diameter_ref(const RoiMask& mask) {
    std::vector<std::pair<int, int>> px;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.test(x, y)) px.emplace_back(x, y);
    double best = 0.0;
    for (size_t i = 0; i < px.size(); ++i)
        for (size_t j = i + 1; j < px.size(); ++j) {
            double dx = px[i].first - px[j].first;
            double dy = px[i].second - px[j].second;
            best = std::max(best, dx * dx + dy * dy);
        }
    return std::sqrt(best);
}

}  // namespace xrad::ref
