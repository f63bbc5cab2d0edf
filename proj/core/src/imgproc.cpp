#include "fpcore/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fp {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Circle offsets in scan order, plus per-dy column extent for reuse.
std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    return offs;
}

}  // namespace

RealMap convolve2d(const RealMap& map, const Kernel& kernel, Border border) {
    if (kernel.width > map.width || kernel.height > map.height)
        throw DimensionMismatch("convolve2d: kernel exceeds map");
    const int ax = kernel.anchor_x(), ay = kernel.anchor_y();
    RealMap out(map.width, map.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kernel.height; ++ky) {
                int sy = y + ky - ay;
                if (border == Border::Clamp) {
                    sy = clampi(sy, 0, map.height - 1);
                } else if (sy < 0 || sy >= map.height) {
                    continue;
                }
                const double* row = &map.data[static_cast<std::size_t>(sy) * map.width];
                const double* krow = &kernel.weights[static_cast<std::size_t>(ky) * kernel.width];
                for (int kx = 0; kx < kernel.width; ++kx) {
                    int sx = x + kx - ax;
                    if (border == Border::Clamp) {
                        sx = clampi(sx, 0, map.width - 1);
                    } else if (sx < 0 || sx >= map.width) {
                        continue;
                    }
                    acc += row[sx] * krow[kx];
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<double> gaussian_kernel1d(double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameter("gaussian sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        w[i + radius] = v;
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

namespace {

RealMap blur_pass_rows(const RealMap& map, const std::vector<double>& w, Border border) {
    const int radius = static_cast<int>(w.size() / 2);
    RealMap out(map.width, map.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < map.height; ++y) {
        const double* row = &map.data[static_cast<std::size_t>(y) * map.width];
        for (int x = 0; x < map.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int sx = x + i;
                if (border == Border::Clamp) {
                    sx = clampi(sx, 0, map.width - 1);
                } else if (sx < 0 || sx >= map.width) {
                    continue;
                }
                acc += row[sx] * w[i + radius];
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

RealMap blur_pass_cols(const RealMap& map, const std::vector<double>& w, Border border) {
    const int radius = static_cast<int>(w.size() / 2);
    RealMap out(map.width, map.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                int sy = y + i;
                if (border == Border::Clamp) {
                    sy = clampi(sy, 0, map.height - 1);
                } else if (sy < 0 || sy >= map.height) {
                    continue;
                }
                acc += map.at(x, sy) * w[i + radius];
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

}  // namespace

RealMap gaussian_blur(const RealMap& map, double sigma, Border border) {
    const std::vector<double> w = gaussian_kernel1d(sigma);
    return blur_pass_cols(blur_pass_rows(map, w, border), w, border);
}

GrayImage rank_filter(const GrayImage& image, int radius, Rank rank) {
    if (radius < 1) throw InvalidParameter("rank_filter radius must be >= 1");
    const auto offs = disk_offsets(radius);
    GrayImage out(image.width, image.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < image.height; ++y) {
        int hist[256];
        for (int x = 0; x < image.width; ++x) {
            std::fill(hist, hist + 256, 0);
            int n = 0;
            for (auto [dx, dy] : offs) {
                const int sx = x + dx, sy = y + dy;
                if (!image.in_bounds(sx, sy)) continue;
                ++hist[image.at(sx, sy)];
                ++n;
            }
            int target;
            switch (rank) {
                case Rank::Min: target = 0; break;
                case Rank::Max: target = n - 1; break;
                default: target = n / 2; break;
            }
            int seen = 0;
            std::uint8_t value = 0;
            for (int v = 0; v < 256; ++v) {
                seen += hist[v];
                if (seen > target) {
                    value = static_cast<std::uint8_t>(v);
                    break;
                }
            }
            out.at(x, y) = value;
        }
    }
    return out;
}

BinaryMask morphology(const BinaryMask& mask, MorphOp op, int radius, MorphBorder border) {
    if (radius < 1) throw InvalidParameter("morphology radius must be >= 1");
    const auto offs = disk_offsets(radius);
    BinaryMask out(mask.width, mask.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool value = (op == MorphOp::Erode);
            for (auto [dx, dy] : offs) {
                const int sx = x + dx, sy = y + dy;
                if (!mask.in_bounds(sx, sy)) {
                    if (op == MorphOp::Erode && border == MorphBorder::ZeroPad) {
                        value = false;
                        break;
                    }
                    continue;
                }
                const bool v = mask.get(sx, sy);
                if (op == MorphOp::Dilate && v) {
                    value = true;
                    break;
                }
                if (op == MorphOp::Erode && !v) {
                    value = false;
                    break;
                }
            }
            out.set(x, y, value);
        }
    }
    return out;
}

ComponentLabels label_components(const BinaryMask& mask) {
    // Two-pass union-find over 8-connected foreground.
    const int w = mask.width, h = mask.height;
    ComponentLabels result;
    result.labels.assign(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> parent(1, 0);

    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[b] = a;
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            int neigh[4];
            int nn = 0;
            if (x > 0 && mask.get(x - 1, y)) neigh[nn++] = result.labels[idx - 1];
            if (y > 0) {
                const std::size_t up = idx - w;
                if (x > 0 && mask.get(x - 1, y - 1)) neigh[nn++] = result.labels[up - 1];
                if (mask.get(x, y - 1)) neigh[nn++] = result.labels[up];
                if (x + 1 < w && mask.get(x + 1, y - 1)) neigh[nn++] = result.labels[up + 1];
            }
            if (nn == 0) {
                const int fresh = static_cast<int>(parent.size());
                parent.push_back(fresh);
                result.labels[idx] = fresh;
            } else {
                int m = neigh[0];
                for (int i = 1; i < nn; ++i) m = std::min(m, neigh[i]);
                result.labels[idx] = m;
                for (int i = 0; i < nn; ++i) unite(m, neigh[i]);
            }
        }
    }

    // Compact labels into scan-order ids.
    std::vector<int> remap(parent.size(), 0);
    int next = 0;
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        if (result.labels[i] == 0) continue;
        const int root = find(result.labels[i]);
        if (remap[root] == 0) remap[root] = ++next;
        result.labels[i] = remap[root];
    }
    result.areas.assign(static_cast<std::size_t>(next), 0);
    for (int lab : result.labels)
        if (lab > 0) ++result.areas[static_cast<std::size_t>(lab) - 1];
    return result;
}

BinaryMask filter_min_area(const BinaryMask& mask, std::size_t min_area) {
    const ComponentLabels cl = label_components(mask);
    BinaryMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < cl.labels.size(); ++i) {
        const int lab = cl.labels[i];
        out.data[i] = (lab > 0 && cl.areas[static_cast<std::size_t>(lab) - 1] >= min_area) ? 255 : 0;
    }
    return out;
}

BinaryMask keep_largest(const BinaryMask& mask, int n) {
    if (n < 0) throw InvalidParameter("keep_largest n must be >= 0");
    const ComponentLabels cl = label_components(mask);
    std::vector<int> order(cl.areas.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return cl.areas[a] > cl.areas[b];  // stable: area ties keep scan order
    });
    std::vector<char> keep(cl.areas.size(), 0);
    for (int i = 0; i < n && i < static_cast<int>(order.size()); ++i) keep[order[i]] = 1;
    BinaryMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < cl.labels.size(); ++i) {
        const int lab = cl.labels[i];
        out.data[i] = (lab > 0 && keep[static_cast<std::size_t>(lab) - 1]) ? 255 : 0;
    }
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    // A hole is a 4-connected false region with no border contact.
    const int w = mask.width, h = mask.height;
    std::vector<char> outside(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;
    auto push = [&](int x, int y) {
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        if (!mask.data[idx] && !outside[idx]) {
            outside[idx] = 1;
            stack.push_back(static_cast<int>(idx));
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w, y = idx / w;
        if (x > 0) push(x - 1, y);
        if (x + 1 < w) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y + 1 < h) push(x, y + 1);
    }
    BinaryMask out(w, h);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (mask.data[i] || !outside[i]) ? 255 : 0;
    return out;
}

namespace {

inline long long cross(long long ox, long long oy, long long ax, long long ay, long long bx,
                       long long by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Andrew monotone chain over integer points; returns CCW hull without
// collinear interior points.
std::vector<std::pair<int, int>> hull_polygon(std::vector<std::pair<int, int>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<std::pair<int, int>> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2].first, hull[k - 2].second, hull[k - 1].first,
                               hull[k - 1].second, pts[i].first, pts[i].second) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2].first, hull[k - 2].second, hull[k - 1].first,
                                   hull[k - 1].second, pts[i].first, pts[i].second) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

BinaryMask convex_hull(const BinaryMask& mask) {
    std::vector<std::pair<int, int>> pts;
    int min_x = mask.width, max_x = -1, min_y = mask.height, max_y = -1;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.get(x, y)) {
                pts.emplace_back(x, y);
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    BinaryMask out(mask.width, mask.height);
    if (pts.empty()) return out;
    const auto poly = hull_polygon(std::move(pts));
    const std::size_t m = poly.size();
    if (m == 1) {
        out.set(poly[0].first, poly[0].second, true);
        return out;
    }
    if (m == 2) {
        // Degenerate hull: rasterize the segment by exact collinearity.
        const auto [x0, y0] = poly[0];
        const auto [x1, y1] = poly[1];
        for (int y = min_y; y <= max_y; ++y)
            for (int x = min_x; x <= max_x; ++x)
                if (cross(x0, y0, x1, y1, x, y) == 0) out.set(x, y, true);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (int y = min_y; y <= max_y; ++y) {
        for (int x = min_x; x <= max_x; ++x) {
            bool inside = true;
            for (std::size_t i = 0; i < m; ++i) {
                const auto [ax, ay] = poly[i];
                const auto [bx, by] = poly[(i + 1) % m];
                if (cross(ax, ay, bx, by, x, y) < 0) {
                    inside = false;
                    break;
                }
            }
            if (inside) out.set(x, y, true);
        }
    }
    return out;
}

RealMap rescale_linear(const RealMap& map, double out_lo, double out_hi) {
    const auto [mn_it, mx_it] = std::minmax_element(map.data.begin(), map.data.end());
    const double mn = *mn_it, mx = *mx_it;
    RealMap out(map.width, map.height);
    if (mx == mn) {
        std::fill(out.data.begin(), out.data.end(), out_lo);
        return out;
    }
    const double scale = (out_hi - out_lo) / (mx - mn);
    for (std::size_t i = 0; i < map.data.size(); ++i)
        out.data[i] = out_lo + (map.data[i] - mn) * scale;
    return out;
}

}  // namespace fp
