#include "xrad/radiomics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xrad {

namespace {

constexpr double kPi = 3.14159265358979323846;

double log2_safe(double p) { return p > 0.0 ? std::log2(p) : 0.0; }

}  // namespace

double TextureMatrix::sum() const { return std::accumulate(entries.begin(), entries.end(), 0.0); }

void RadiomicsConfig::validate() const {
    if (ng < 2) throw ConfigError("RadiomicsConfig: ng must be >= 2");
    if (delta < 1) throw ConfigError("RadiomicsConfig: delta must be >= 1");
    if (alpha < 0) throw ConfigError("RadiomicsConfig: alpha must be >= 0");
    if (angles_deg.empty()) throw ConfigError("RadiomicsConfig: angles empty");
    for (int a : angles_deg) angle_offset(a);
}

Offset angle_offset(int angle_deg) {
    switch (((angle_deg % 360) + 360) % 360) {
        case 0: return {1, 0};
        case 45: return {1, -1};
        case 90: return {0, -1};
        case 135: return {-1, -1};
        case 180: return {-1, 0};
        case 225: return {-1, 1};
        case 270: return {0, 1};
        case 315: return {1, 1};
        default: throw ConfigError("angle must be a multiple of 45 degrees");
    }
}

QuantizedRoi quantize(const GrayImage& img, const RoiMask& mask, int ng) {
    if (img.width != mask.width || img.height != mask.height)
        throw InputError("quantize: image/mask dimension mismatch");
    if (ng < 2) throw ConfigError("quantize: ng must be >= 2");
    QuantizedRoi q;
    q.width = img.width;
    q.height = img.height;
    q.ng = ng;
    q.levels.assign(img.size(), 0);

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (size_t i = 0; i < img.size(); ++i) {
        if (!mask.bits[i]) continue;
        double v = img.pixels[i];
        if (first) {
            lo = hi = v;
            first = false;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        ++q.masked_count;
    }
    if (q.masked_count == 0) throw InputError("quantize: empty mask");
    q.src_min = lo;
    q.src_max = hi;

    const double range = hi - lo;
    for (size_t i = 0; i < img.size(); ++i) {
        if (!mask.bits[i]) continue;
        int level = 1;
        if (range > 0.0)
            level = std::min(static_cast<int>(std::floor(ng * (img.pixels[i] - lo) / range)) + 1,
                             ng);
        q.levels[i] = level;
    }
    return q;
}

FeatureVector first_order(const GrayImage& img, const RoiMask& mask, int ng) {
    if (img.width != mask.width || img.height != mask.height)
        throw InputError("first_order: image/mask dimension mismatch");
    std::vector<double> vals;
    vals.reserve(img.size());
    for (size_t i = 0; i < img.size(); ++i)
        if (mask.bits[i]) vals.push_back(img.pixels[i]);
    if (vals.empty()) throw InputError("first_order: empty mask");

    const double n = static_cast<double>(vals.size());
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : vals) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    double median = (sorted.size() % 2 == 1)
                        ? sorted[sorted.size() / 2]
                        : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);

    // Entropy and uniformity on the quantized histogram
    QuantizedRoi q = quantize(img, mask, ng);
    std::vector<double> hist(static_cast<size_t>(ng), 0.0);
    for (int lv : q.levels)
        if (lv > 0) hist[lv - 1] += 1.0;
    double entropy = 0.0, uniformity = 0.0;
    for (double c : hist) {
        double p = c / n;
        entropy -= p * log2_safe(p);
        uniformity += p * p;
    }

    FeatureVector f;
    f["firstorder.Mean"] = mean;
    f["firstorder.Median"] = median;
    f["firstorder.Maximum"] = sorted.back();
    f["firstorder.Minimum"] = sorted.front();
    f["firstorder.Variance"] = m2;
    f["firstorder.Skewness"] = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    f["firstorder.Kurtosis"] = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    f["firstorder.Entropy"] = entropy;
    f["firstorder.Uniformity"] = uniformity;
    return f;
}

FeatureVector shape_2d(const RoiMask& mask) {
    std::vector<std::pair<int, int>> px;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.test(x, y)) px.emplace_back(x, y);
    if (px.empty()) throw InputError("shape_2d: empty mask");

    auto outside = [&](int x, int y) {
        return x < 0 || y < 0 || x >= mask.width || y >= mask.height || !mask.test(x, y);
    };

    long long perimeter = 0;
    std::vector<std::pair<int, int>> boundary;
    for (auto [x, y] : px) {
        int exposed = outside(x + 1, y) + outside(x - 1, y) + outside(x, y + 1) +
                      outside(x, y - 1);
        perimeter += exposed;
        if (exposed > 0) boundary.emplace_back(x, y);
    }

    // Pairwise maximum is attained between boundary pixels.
    double max_d2 = 0.0;
#ifdef _OPENMP
#pragma omp parallel for reduction(max : max_d2) schedule(dynamic, 64)
#endif
    for (long long i = 0; i < static_cast<long long>(boundary.size()); ++i) {
        for (size_t j = i + 1; j < boundary.size(); ++j) {
            double dx = boundary[i].first - boundary[j].first;
            double dy = boundary[i].second - boundary[j].second;
            max_d2 = std::max(max_d2, dx * dx + dy * dy);
        }
    }

    const double area = static_cast<double>(px.size());
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : px) {
        mx += x;
        my += y;
    }
    mx /= area;
    my /= area;
    double cxx = 0.0, cyy = 0.0, cxy = 0.0;
    for (auto [x, y] : px) {
        cxx += (x - mx) * (x - mx);
        cyy += (y - my) * (y - my);
        cxy += (x - mx) * (y - my);
    }
    cxx /= area;
    cyy /= area;
    cxy /= area;
    double tr = cxx + cyy;
    double det = cxx * cyy - cxy * cxy;
    double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
    double l1 = tr / 2.0 + disc;  // major
    double l2 = std::max(tr / 2.0 - disc, 0.0);

    FeatureVector f;
    f["shape.PixelArea"] = area;
    f["shape.Perimeter"] = static_cast<double>(perimeter);
    f["shape.MaximumDiameter"] = std::sqrt(max_d2);
    f["shape.Compactness"] = 4.0 * kPi * area / (static_cast<double>(perimeter) * perimeter);
    f["shape.Elongation"] = l1 > 0.0 ? std::sqrt(l2 / l1) : 1.0;
    return f;
}

TextureMatrix glcm(const QuantizedRoi& q, int delta, int angle_deg) {
    if (delta < 1) throw ConfigError("glcm: delta must be >= 1");
    Offset o = angle_offset(angle_deg);
    const int dx = o.dx * delta, dy = o.dy * delta;
    const int ng = q.ng;
    TextureMatrix m{MatrixKind::GLCM, ng, ng,
                    std::vector<double>(static_cast<size_t>(ng) * ng, 0.0)};

#ifdef _OPENMP
#pragma omp parallel
    {
        std::vector<double> local(m.entries.size(), 0.0);
#pragma omp for nowait
        for (int y = 0; y < q.height; ++y) {
            for (int x = 0; x < q.width; ++x) {
                int a = q.at(x, y);
                if (a == 0) continue;
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
                int b = q.at(nx, ny);
                if (b == 0) continue;
                local[static_cast<size_t>(a - 1) * ng + (b - 1)] += 1.0;
                local[static_cast<size_t>(b - 1) * ng + (a - 1)] += 1.0;  // symmetrize
            }
        }
#pragma omp critical
        for (size_t i = 0; i < local.size(); ++i) m.entries[i] += local[i];
    }
#else
    for (int y = 0; y < q.height; ++y) {
        for (int x = 0; x < q.width; ++x) {
            int a = q.at(x, y);
            if (a == 0) continue;
            int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
            int b = q.at(nx, ny);
            if (b == 0) continue;
            m.at(a - 1, b - 1) += 1.0;
            m.at(b - 1, a - 1) += 1.0;
        }
    }
#endif
    return m;
}

TextureMatrix glszm(const QuantizedRoi& q) {
    // zone extraction: 8-connected flood fill per level
    std::vector<std::pair<int, long long>> zones;  // (level, size)
    std::vector<uint8_t> seen(q.levels.size(), 0);
    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int y = 0; y < q.height; ++y) {
        for (int x = 0; x < q.width; ++x) {
            size_t idx = static_cast<size_t>(y) * q.width + x;
            int lv = q.levels[idx];
            if (lv == 0 || seen[idx]) continue;
            long long size = 0;
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[idx] = 1;
            while (!queue.empty()) {
                auto [cx, cy] = queue.front();
                queue.pop_front();
                ++size;
                for (int d = 0; d < 8; ++d) {
                    int nx = cx + dx8[d], ny = cy + dy8[d];
                    if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
                    size_t nidx = static_cast<size_t>(ny) * q.width + nx;
                    if (q.levels[nidx] == lv && !seen[nidx]) {
                        seen[nidx] = 1;
                        queue.emplace_back(nx, ny);
                    }
                }
            }
            zones.emplace_back(lv, size);
        }
    }
    long long max_size = 1;
    for (auto& [lv, s] : zones) max_size = std::max(max_size, s);
    TextureMatrix m{MatrixKind::GLSZM, q.ng, static_cast<int>(max_size),
                    std::vector<double>(static_cast<size_t>(q.ng) * max_size, 0.0)};
    for (auto& [lv, s] : zones) m.at(lv - 1, static_cast<int>(s - 1)) += 1.0;
    return m;
}

TextureMatrix glrlm(const QuantizedRoi& q, int angle_deg) {
    Offset o = angle_offset(angle_deg);
    const int dx = o.dx, dy = o.dy;
    std::vector<std::pair<int, long long>> runs;  // (level, length)

    // A line start is any pixel with no predecessor inside the grid.
    for (int y = 0; y < q.height; ++y) {
        for (int x = 0; x < q.width; ++x) {
            int px = x - dx, py = y - dy;
            if (px >= 0 && py >= 0 && px < q.width && py < q.height) continue;
            int cur = 0;
            long long len = 0;
            for (int cx = x, cy = y; cx >= 0 && cy >= 0 && cx < q.width && cy < q.height;
                 cx += dx, cy += dy) {
                int lv = q.at(cx, cy);
                if (lv == cur && lv != 0) {
                    ++len;
                } else {
                    if (cur != 0) runs.emplace_back(cur, len);
                    cur = lv;
                    len = lv != 0 ? 1 : 0;
                }
            }
            if (cur != 0) runs.emplace_back(cur, len);
        }
    }
    long long max_len = 1;
    for (auto& [lv, r] : runs) max_len = std::max(max_len, r);
    TextureMatrix m{MatrixKind::GLRLM, q.ng, static_cast<int>(max_len),
                    std::vector<double>(static_cast<size_t>(q.ng) * max_len, 0.0)};
    for (auto& [lv, r] : runs) m.at(lv - 1, static_cast<int>(r - 1)) += 1.0;
    return m;
}

TextureMatrix ngtdm(const QuantizedRoi& q, int delta) {
    if (delta < 1) throw ConfigError("ngtdm: delta must be >= 1");
    TextureMatrix m{MatrixKind::NGTDM, q.ng, 2,
                    std::vector<double>(static_cast<size_t>(q.ng) * 2, 0.0)};
    // s_i sums are non-integer; reduce per-row partials in row order so the
    // result is bit-identical regardless of thread count.
    std::vector<std::vector<double>> row_partials(
        static_cast<size_t>(q.height), std::vector<double>(m.entries.size(), 0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int y = 0; y < q.height; ++y) {
        std::vector<double>& local = row_partials[y];
        for (int x = 0; x < q.width; ++x) {
            int lv = q.at(x, y);
            if (lv == 0) continue;
            double sum = 0.0;
            long long cnt = 0;
            for (int ny = y - delta; ny <= y + delta; ++ny) {
                for (int nx = x - delta; nx <= x + delta; ++nx) {
                    if (nx == x && ny == y) continue;
                    if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
                    int nl = q.at(nx, ny);
                    if (nl == 0) continue;
                    sum += nl;
                    ++cnt;
                }
            }
            if (cnt == 0) continue;
            local[static_cast<size_t>(lv - 1) * 2 + 0] += 1.0;
            local[static_cast<size_t>(lv - 1) * 2 + 1] += std::abs(lv - sum / cnt);
        }
    }
    for (const auto& local : row_partials)
        for (size_t i = 0; i < m.entries.size(); ++i) m.entries[i] += local[i];
    return m;
}

TextureMatrix gldm(const QuantizedRoi& q, int delta, int alpha) {
    if (delta < 1) throw ConfigError("gldm: delta must be >= 1");
    if (alpha < 0) throw ConfigError("gldm: alpha must be >= 0");
    const int win = 2 * delta + 1;
    const int max_dep = win * win - 1;
    TextureMatrix m{MatrixKind::GLDM, q.ng, max_dep + 1,
                    std::vector<double>(static_cast<size_t>(q.ng) * (max_dep + 1), 0.0)};
#ifdef _OPENMP
#pragma omp parallel
    {
        std::vector<double> local(m.entries.size(), 0.0);
#pragma omp for nowait
        for (int y = 0; y < q.height; ++y) {
            for (int x = 0; x < q.width; ++x) {
                int lv = q.at(x, y);
                if (lv == 0) continue;
                int dep = 0;
                for (int ny = y - delta; ny <= y + delta; ++ny) {
                    for (int nx = x - delta; nx <= x + delta; ++nx) {
                        if (nx == x && ny == y) continue;
                        if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
                        int nl = q.at(nx, ny);
                        if (nl != 0 && std::abs(lv - nl) <= alpha) ++dep;
                    }
                }
                local[static_cast<size_t>(lv - 1) * (max_dep + 1) + dep] += 1.0;
            }
        }
#pragma omp critical
        for (size_t i = 0; i < local.size(); ++i) m.entries[i] += local[i];
    }
#else
    for (int y = 0; y < q.height; ++y) {
        for (int x = 0; x < q.width; ++x) {
            int lv = q.at(x, y);
            if (lv == 0) continue;
            int dep = 0;
            for (int ny = y - delta; ny <= y + delta; ++ny) {
                for (int nx = x - delta; nx <= x + delta; ++nx) {
                    if (nx == x && ny == y) continue;
                    if (nx < 0 || ny < 0 || nx >= q.width || ny >= q.height) continue;
                    int nl = q.at(nx, ny);
                    if (nl != 0 && std::abs(lv - nl) <= alpha) ++dep;
                }
            }
            m.at(lv - 1, dep) += 1.0;
        }
    }
#endif
    return m;
}

FeatureVector glcm_features(const TextureMatrix& m) {
    if (m.kind != MatrixKind::GLCM) throw InputError("glcm_features: wrong matrix kind");
    double total = m.sum();
    if (total <= 0.0) throw InputError("glcm_features: all-zero matrix");

    double contrast = 0.0, energy = 0.0, homogeneity = 0.0, entropy = 0.0;
    double mu = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            double p = m.at(i, j) / total;
            if (p == 0.0) continue;
            double di = i - j;
            contrast += di * di * p;
            energy += p * p;
            homogeneity += p / (1.0 + std::abs(di));
            entropy -= p * std::log2(p);
            mu += (i + 1) * p;  // symmetric matrix: row and column means equal
        }
    double var = 0.0;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            double p = m.at(i, j) / total;
            var += (i + 1 - mu) * (i + 1 - mu) * p;
        }
    double correlation = 1.0;  // degenerate single-level matrix is perfectly correlated
    if (var > 0.0) {
        double cov = 0.0;
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j)
                cov += (i + 1 - mu) * (j + 1 - mu) * (m.at(i, j) / total);
        correlation = cov / var;
    }

    FeatureVector f;
    f["glcm.Contrast"] = contrast;
    f["glcm.Correlation"] = correlation;
    f["glcm.Energy"] = energy;
    f["glcm.Entropy"] = entropy;
    f["glcm.Homogeneity"] = homogeneity;
    return f;
}

FeatureVector glszm_features(const TextureMatrix& m, size_t masked_count) {
    if (m.kind != MatrixKind::GLSZM) throw InputError("glszm_features: wrong matrix kind");
    double nz = m.sum();
    if (nz <= 0.0) throw InputError("glszm_features: all-zero matrix");
    double sae = 0.0, lae = 0.0, entropy = 0.0, glnu = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        double row = 0.0;
        for (int s = 0; s < m.cols; ++s) {
            double c = m.at(i, s);
            if (c == 0.0) continue;
            double p = c / nz;
            double sz = s + 1;
            sae += p / (sz * sz);
            lae += p * sz * sz;
            entropy -= p * std::log2(p);
            row += c;
        }
        glnu += row * row;
    }
    FeatureVector f;
    f["glszm.SmallAreaEmphasis"] = sae;
    f["glszm.LargeAreaEmphasis"] = lae;
    f["glszm.GrayLevelNonUniformity"] = glnu / nz;
    f["glszm.ZonePercentage"] = nz / static_cast<double>(masked_count);
    f["glszm.ZoneEntropy"] = entropy;
    return f;
}

FeatureVector glrlm_features(const TextureMatrix& m, size_t masked_count) {
    if (m.kind != MatrixKind::GLRLM) throw InputError("glrlm_features: wrong matrix kind");
    double nr = m.sum();
    if (nr <= 0.0) throw InputError("glrlm_features: all-zero matrix");
    double sre = 0.0, lre = 0.0, entropy = 0.0, glnu = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        double row = 0.0;
        for (int r = 0; r < m.cols; ++r) {
            double c = m.at(i, r);
            if (c == 0.0) continue;
            double p = c / nr;
            double len = r + 1;
            sre += p / (len * len);
            lre += p * len * len;
            entropy -= p * std::log2(p);
            row += c;
        }
        glnu += row * row;
    }
    FeatureVector f;
    f["glrlm.ShortRunEmphasis"] = sre;
    f["glrlm.LongRunEmphasis"] = lre;
    f["glrlm.GrayLevelNonUniformity"] = glnu / nr;
    f["glrlm.RunPercentage"] = nr / static_cast<double>(masked_count);
    f["glrlm.RunEntropy"] = entropy;
    return f;
}

FeatureVector ngtdm_features(const TextureMatrix& m) {
    if (m.kind != MatrixKind::NGTDM) throw InputError("ngtdm_features: wrong matrix kind");
    double n_total = 0.0;
    for (int i = 0; i < m.rows; ++i) n_total += m.at(i, 0);
    if (n_total <= 0.0) throw InputError("ngtdm_features: no valid neighborhoods");

    double sum_ps = 0.0;
    int ngp = 0;
    for (int i = 0; i < m.rows; ++i) {
        double p = m.at(i, 0) / n_total;
        if (p > 0.0) ++ngp;
        sum_ps += p * m.at(i, 1);
    }
    double coarseness = sum_ps > 0.0 ? 1.0 / sum_ps : 0.0;

    double contrast = 0.0;
    if (ngp > 1) {
        double pair_term = 0.0;
        for (int i = 0; i < m.rows; ++i) {
            double pi = m.at(i, 0) / n_total;
            if (pi == 0.0) continue;
            for (int j = 0; j < m.rows; ++j) {
                double pj = m.at(j, 0) / n_total;
                if (pj == 0.0) continue;
                pair_term += pi * pj * (i - j) * (i - j);
            }
        }
        double s_total = 0.0;
        for (int i = 0; i < m.rows; ++i) s_total += m.at(i, 1);
        contrast = pair_term / (static_cast<double>(ngp) * (ngp - 1)) * (s_total / n_total);
    }

    double busy_den = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        double pi = m.at(i, 0) / n_total;
        if (pi == 0.0) continue;
        for (int j = 0; j < m.rows; ++j) {
            double pj = m.at(j, 0) / n_total;
            if (pj == 0.0) continue;
            busy_den += std::abs((i + 1) * pi - (j + 1) * pj);
        }
    }
    double busyness = busy_den > 0.0 ? sum_ps / busy_den : 0.0;

    FeatureVector f;
    f["ngtdm.Coarseness"] = coarseness;
    f["ngtdm.Contrast"] = contrast;
    f["ngtdm.Busyness"] = busyness;
    return f;
}

FeatureVector gldm_features(const TextureMatrix& m) {
    if (m.kind != MatrixKind::GLDM) throw InputError("gldm_features: wrong matrix kind");
    double nz = m.sum();
    if (nz <= 0.0) throw InputError("gldm_features: all-zero matrix");
    double sde = 0.0, lde = 0.0, entropy = 0.0, glnu = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        double row = 0.0;
        for (int d = 0; d < m.cols; ++d) {
            double c = m.at(i, d);
            if (c == 0.0) continue;
            double p = c / nz;
            double dep = d + 1;  // dependence size counting the center pixel
            sde += p / (dep * dep);
            lde += p * dep * dep;
            entropy -= p * std::log2(p);
            row += c;
        }
        glnu += row * row;
    }
    FeatureVector f;
    f["gldm.SmallDependenceEmphasis"] = sde;
    f["gldm.LargeDependenceEmphasis"] = lde;
    f["gldm.GrayLevelNonUniformity"] = glnu / nz;
    f["gldm.DependenceEntropy"] = entropy;
    return f;
}

namespace {

void merge(FeatureVector& dst, const FeatureVector& src, const std::string& suffix = "") {
    for (const auto& [name, value] : src) dst[name + suffix] = value;
}

/// Mean of per-angle feature vectors; all vectors share the same key set.
FeatureVector mean_features(const std::vector<FeatureVector>& per_angle) {
    FeatureVector out = per_angle.front();
    for (size_t i = 1; i < per_angle.size(); ++i)
        for (auto& [name, value] : out) value += per_angle[i].at(name);
    for (auto& [name, value] : out) value /= static_cast<double>(per_angle.size());
    return out;
}

}  // namespace

FeatureVector extract_all(const GrayImage& img, const RoiMask& mask, const RadiomicsConfig& cfg) {
    cfg.validate();
    FeatureVector out;
    merge(out, first_order(img, mask, cfg.ng));
    merge(out, shape_2d(mask));

    QuantizedRoi q = quantize(img, mask, cfg.ng);

    std::vector<FeatureVector> glcm_per, glrlm_per;
    for (int angle : cfg.angles_deg) {
        TextureMatrix cm = glcm(q, cfg.delta, angle);
        // an all-isolated-pixel mask has no pairs at this angle; emit zeros
        if (cm.sum() > 0.0)
            glcm_per.push_back(glcm_features(cm));
        else
            glcm_per.push_back({{"glcm.Contrast", 0.0},
                                {"glcm.Correlation", 0.0},
                                {"glcm.Energy", 0.0},
                                {"glcm.Entropy", 0.0},
                                {"glcm.Homogeneity", 0.0}});
        glrlm_per.push_back(glrlm_features(glrlm(q, angle), q.masked_count));
    }
    if (cfg.aggregation == AngleAggregation::MeanOverAngles) {
        merge(out, mean_features(glcm_per));
        merge(out, mean_features(glrlm_per));
    } else {
        for (size_t i = 0; i < cfg.angles_deg.size(); ++i) {
            std::string suffix = ".ang" + std::to_string(cfg.angles_deg[i]);
            merge(out, glcm_per[i], suffix);
            merge(out, glrlm_per[i], suffix);
        }
    }

    merge(out, glszm_features(glszm(q), q.masked_count));
    TextureMatrix nm = ngtdm(q, cfg.delta);
    double n_total = 0.0;
    for (int i = 0; i < nm.rows; ++i) n_total += nm.at(i, 0);
    if (n_total > 0.0) {
        merge(out, ngtdm_features(nm));
    } else {
        merge(out, {{"ngtdm.Coarseness", 0.0}, {"ngtdm.Contrast", 0.0}, {"ngtdm.Busyness", 0.0}});
    }
    merge(out, gldm_features(gldm(q, cfg.delta, cfg.alpha)));
    return out;
}

}  // namespace xrad
