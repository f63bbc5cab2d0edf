#include "fpcore/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fpcore/errors.hpp"

namespace fp {

namespace {

// Gaussian smoothing of a histogram, bins outside [0,255] treated as zero.
std::vector<double> smooth_histogram(const std::vector<double>& hist, double sigma) {
    const auto taps = gaussian_kernel1d(sigma);
    const int reach = static_cast<int>(taps.size()) / 2;
    const int n = static_cast<int>(hist.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int t = -reach; t <= reach; ++t) {
            const int j = i + t;
            if (j < 0 || j >= n) continue;
            acc += taps[t + reach] * hist[j];
        }
        out[i] = acc;
    }
    return out;
}

// Local maxima of the smoothed histogram; a plateau counts once, at its left
// edge. Returns indices sorted by descending value, ties toward lower bins.
std::vector<int> histogram_modes(const std::vector<double>& h) {
    const int n = static_cast<int>(h.size());
    std::vector<int> modes;
    for (int i = 0; i < n; ++i) {
        const double left = (i > 0) ? h[i - 1] : 0.0;
        const double right = (i + 1 < n) ? h[i + 1] : 0.0;
        if (h[i] > 0.0 && h[i] > left && h[i] >= right) modes.push_back(i);
    }
    std::sort(modes.begin(), modes.end(), [&](int a, int b) {
        if (h[a] != h[b]) return h[a] > h[b];
        return a < b;
    });
    return modes;
}

struct LineFit {
    bool ok = false;
    double slope = 0.0;
    double intercept = 0.0;
};

// Least-squares line through (pos, peak_pos) points, gated on how many
// columns participate and how tight the fit is.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys, int total_cols,
                 double min_cols_frac, double max_resid) {
    LineFit fit;
    const std::size_t n = xs.size();
    if (n < 2 || static_cast<double>(n) < min_cols_frac * total_cols) return fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss += r * r;
    }
    if (std::sqrt(ss / n) > max_resid) return fit;
    fit.ok = true;
    return fit;
}

// One orientation's worth of border detection: how deep the blank margin
// reaches from each end, plus straight-line fits against the oblique
// response in the outer thirds.
struct EdgeScan {
    int blank_near = 0;  // rows with variation < tau, counted from index 0
    int blank_far = 0;   // same, counted from the last row
    BorderLine near;     // fitted line close to row 0
    BorderLine far;      // fitted line close to the last row
};

EdgeScan scan_edges(const GrayImage& img, const PipelineParams& p) {
    EdgeScan result;
    const int w = img.width;
    const int h = img.height;

    // Variation scan: lines are dropped from each end until one shows real
    // content (max-min span at or above the threshold).
    auto row_span = [&](int y) {
        std::uint8_t lo = 255, hi = 0;
        for (int x = 0; x < w; ++x) {
            lo = std::min(lo, img.at(x, y));
            hi = std::max(hi, img.at(x, y));
        }
        return static_cast<double>(hi - lo);
    };
    while (result.blank_near < h && row_span(result.blank_near) < p.tau_variation)
        ++result.blank_near;
    while (result.blank_far < h - result.blank_near &&
           row_span(h - 1 - result.blank_far) < p.tau_variation)
        ++result.blank_far;

    const int third = h / 3;
    if (third < 1) return result;

    const Kernel k = make_oblique_kernel(w);
    const RealMap resp = convolve2d(to_real(img), k, Border::Clamp);
    const double norm = 2.0 * k.width;

    auto fit_side = [&](int y0, int y1) {
        std::vector<double> xs, ys;
        for (int x = 0; x < w; ++x) {
            double best = 0.0;
            int best_y = y0;
            for (int y = y0; y < y1; ++y) {
                const double v = std::abs(resp.at(x, y)) / norm;
                if (v > best) {
                    best = v;
                    best_y = y;
                }
            }
            if (best >= p.tau_line) {
                xs.push_back(x);
                ys.push_back(best_y);
            }
        }
        return fit_line(xs, ys, w, p.line_min_cols, p.line_max_resid);
    };

    if (const LineFit f = fit_side(0, third); f.ok)
        result.near = BorderLine{true, f.slope, f.intercept};
    if (const LineFit f = fit_side(h - third, h); f.ok)
        result.far = BorderLine{true, f.slope, f.intercept};
    return result;
}

GrayImage transpose(const GrayImage& img) {
    GrayImage out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(y, x) = img.at(x, y);
    return out;
}

}  // namespace

EqualizeResult equalize(const GrayImage& image, const PipelineParams& params) {
    const auto [lo_it, hi_it] = std::minmax_element(image.data.begin(), image.data.end());
    const int in_lo = *lo_it;
    const int in_hi = *hi_it;
    if (in_lo == in_hi) return EqualizeResult{image, 128};

    // Stretch to the full range so the histogram analysis sees a fixed scale.
    const double stretch = 255.0 / (in_hi - in_lo);
    std::vector<std::uint8_t> stretched(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i)
        stretched[i] =
            static_cast<std::uint8_t>(std::lround((image.data[i] - in_lo) * stretch));

    std::vector<double> hist(256, 0.0);
    for (const std::uint8_t v : stretched) hist[v] += 1.0;
    const std::vector<double> smoothed = smooth_histogram(hist, params.hist_sigma);
    const std::vector<int> modes = histogram_modes(smoothed);

    int t = 0;
    if (modes.size() >= 2) {
        int m1 = modes[0], m2 = modes[1];
        if (m1 > m2) std::swap(m1, m2);
        // Deepest valley between the modes; a flat valley picks its middle.
        double best = smoothed[m1];
        int lo = m1, hi = m1;
        for (int i = m1 + 1; i < m2; ++i) {
            if (smoothed[i] < best) {
                best = smoothed[i];
                lo = hi = i;
            } else if (smoothed[i] == best) {
                hi = i;
            }
        }
        t = (lo + hi) / 2;
    } else {
        // Effectively unimodal: fall back to the median intensity.
        std::vector<std::uint8_t> sorted(stretched);
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        t = sorted[sorted.size() / 2];
    }

    const double clip_lo = params.clip_lo;
    const double clip_hi = params.clip_hi;
    GrayImage out(image.width, image.height);
    for (std::size_t i = 0; i < stretched.size(); ++i) {
        const double v = stretched[i];
        double mapped;
        if (v <= clip_lo) {
            mapped = 0.0;
        } else if (v >= clip_hi) {
            mapped = 255.0;
        } else if (v <= t) {
            mapped = 128.0 * (v - clip_lo) / (t - clip_lo);
        } else {
            mapped = 128.0 + 127.0 * (v - t) / (clip_hi - t);
        }
        out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(mapped), 0L, 255L));
    }

    return EqualizeResult{std::move(out), t};
}

Kernel make_oblique_kernel(int image_width) {
    if (image_width < 1) throw InvalidParameter("make_oblique_kernel: width must be positive");
    int kw = (image_width + 3) / 4 + 1;
    if (kw % 2 == 0) ++kw;
    Kernel k(kw, 5);
    static constexpr double kColumn[5] = {1.0, 1.0, 0.0, -1.0, -1.0};
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < kw; ++x) k.at(x, y) = kColumn[y];
    return k;
}

BorderResult remove_border(const GrayImage& image, const PipelineParams& params) {
    BorderResult result{BinaryMask(image.width, image.height), {}, {}, {}, {}};
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) result.mask.set(x, y, true);

    const EdgeScan rows = scan_edges(image, params);
    result.top = rows.near;
    result.bottom = rows.far;
    const EdgeScan cols = scan_edges(transpose(image), params);
    result.left = cols.near;
    result.right = cols.far;

    // Mask a few extra pixels past the fitted center so the dark band itself
    // is fully covered.
    const int margin = 4;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            bool keep = true;
            if (y < rows.blank_near || y > image.height - 1 - rows.blank_far) keep = false;
            if (x < cols.blank_near || x > image.width - 1 - cols.blank_far) keep = false;
            if (result.top.applied && y <= result.top.slope * x + result.top.intercept + margin)
                keep = false;
            if (result.bottom.applied &&
                y >= result.bottom.slope * x + result.bottom.intercept - margin)
                keep = false;
            if (result.left.applied && x <= result.left.slope * y + result.left.intercept + margin)
                keep = false;
            if (result.right.applied &&
                x >= result.right.slope * y + result.right.intercept - margin)
                keep = false;
            if (!keep) result.mask.set(x, y, false);
        }
    }
    return result;
}

BinaryMask segment(const GrayImage& equalized, const BinaryMask& border_mask,
                   const PipelineParams& params) {
    require_same_size(equalized.width, equalized.height, border_mask.width, border_mask.height,
                      "segment");

    // Darkness route: smooth heavily, spread ink with a min filter, then
    // exaggerate the contrast between inked and blank areas.
    GrayImage g = rank_filter(equalized, params.seg_median_radius, Rank::Median);
    RealMap r = gaussian_blur(to_real(g), params.seg_blur_sigma);
    g = rank_filter(to_gray(r), params.seg_min_radius, Rank::Min);
    RealMap dark = to_real(g);
    const auto [dlo, dhi] = std::minmax_element(dark.data.begin(), dark.data.end());
    if (*dlo != *dhi) {
        dark = rescale_linear(dark, 0.0, 1.0);
        for (double& v : dark.data) v *= v;
        dark = rescale_linear(dark, 0.0, 255.0);
    }
    BinaryMask m0(equalized.width, equalized.height);
    for (int y = 0; y < m0.height; ++y)
        for (int x = 0; x < m0.width; ++x)
            m0.set(x, y, dark.at(x, y) < params.tau_segment && border_mask.get(x, y));

    auto cleanup = [&](const BinaryMask& m) {
        BinaryMask out = morphology(m, MorphOp::Dilate, params.seg_dilate1);
        out = morphology(out, MorphOp::Erode, params.seg_erode);
        out = keep_largest(out, params.seg_keep);
        out = fill_holes(out);
        return morphology(out, MorphOp::Dilate, params.seg_dilate2);
    };
    const BinaryMask m1 = cleanup(m0);

    // Edge route: ridge texture produces dense edges even where ink is light.
    const RealMap pre = gaussian_blur(to_real(equalized), params.edge_pre_sigma);
    RealMap mag(pre.width, pre.height);
    double max_mag = 0.0;
    for (int y = 0; y < pre.height; ++y) {
        for (int x = 0; x < pre.width; ++x) {
            auto px = [&](int xx, int yy) {
                return pre.at(std::clamp(xx, 0, pre.width - 1), std::clamp(yy, 0, pre.height - 1));
            };
            const double gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            mag.at(x, y) = std::hypot(gx, gy);
            max_mag = std::max(max_mag, mag.at(x, y));
        }
    }
    BinaryMask edges(pre.width, pre.height);
    if (max_mag > 0.0) {
        const double high = params.edge_high * max_mag;
        const double low = params.edge_low * max_mag;
        std::vector<std::pair<int, int>> stack;
        for (int y = 0; y < pre.height; ++y) {
            for (int x = 0; x < pre.width; ++x) {
                if (mag.at(x, y) >= high && !edges.get(x, y)) {
                    edges.set(x, y, true);
                    stack.emplace_back(x, y);
                    while (!stack.empty()) {
                        const auto [cx, cy] = stack.back();
                        stack.pop_back();
                        for (int dy = -1; dy <= 1; ++dy) {
                            for (int dx = -1; dx <= 1; ++dx) {
                                const int nx = cx + dx, ny = cy + dy;
                                if (!edges.in_bounds(nx, ny) || edges.get(nx, ny)) continue;
                                if (mag.at(nx, ny) < low) continue;
                                edges.set(nx, ny, true);
                                stack.emplace_back(nx, ny);
                            }
                        }
                    }
                }
            }
        }
    }

    // Keep only edge components sitting in regions of high edge density;
    // isolated specks and straight leftovers score low.
    RealMap density(pre.width, pre.height);
    for (int y = 0; y < pre.height; ++y)
        for (int x = 0; x < pre.width; ++x) density.at(x, y) = edges.get(x, y) ? 1.0 : 0.0;
    density = gaussian_blur(density, params.edge_density_sigma);
    double dmax = 0.0;
    for (const double v : density.data) dmax = std::max(dmax, v);
    BinaryMask kept(pre.width, pre.height);
    if (dmax > 0.0) {
        const ComponentLabels labels = label_components(edges);
        std::vector<double> sums(labels.areas.size() + 1, 0.0);
        for (int y = 0; y < pre.height; ++y)
            for (int x = 0; x < pre.width; ++x) {
                const int id = labels.labels[static_cast<std::size_t>(y) * pre.width + x];
                if (id > 0) sums[id] += density.at(x, y) / dmax;
            }
        for (int y = 0; y < pre.height; ++y)
            for (int x = 0; x < pre.width; ++x) {
                const int id = labels.labels[static_cast<std::size_t>(y) * pre.width + x];
                if (id > 0 && sums[id] / labels.areas[id - 1] > params.tau_edge &&
                    border_mask.get(x, y))
                    kept.set(x, y, true);
            }
    }
    const BinaryMask m2 = cleanup(kept);

    BinaryMask joined = mask_or(m1, m2);
    if (joined.empty()) throw EmptyForeground("segment: no foreground found");
    BinaryMask hull = convex_hull(joined);
    return mask_and(hull, border_mask);
}

GrayImage amplify_ridges(const GrayImage& equalized, const BinaryMask& mask,
                         const PipelineParams& params) {
    require_same_size(equalized.width, equalized.height, mask.width, mask.height,
                      "amplify_ridges");
    GrayImage for_max(equalized.width, equalized.height);
    GrayImage for_min(equalized.width, equalized.height);
    for (int y = 0; y < equalized.height; ++y) {
        for (int x = 0; x < equalized.width; ++x) {
            const bool in = mask.get(x, y);
            for_max.at(x, y) = in ? equalized.at(x, y) : 0;
            for_min.at(x, y) = in ? equalized.at(x, y) : 255;
        }
    }
    const GrayImage local_max = rank_filter(for_max, params.amp_radius, Rank::Max);
    const GrayImage local_min = rank_filter(for_min, params.amp_radius, Rank::Min);

    // The local extrema are pushed toward their own half of the range before
    // interpolating, which is what actually deepens the valleys and
    // brightens the ridge tops.
    auto remap = [](double v, double lo, double hi) {
        return std::clamp(255.0 * (v - lo) / (hi - lo), 0.0, 255.0);
    };
    GrayImage out(equalized.width, equalized.height);
    for (int y = 0; y < equalized.height; ++y) {
        for (int x = 0; x < equalized.width; ++x) {
            if (!mask.get(x, y)) {
                out.at(x, y) = 255;
                continue;
            }
            const double vmax = local_max.at(x, y);
            const double vmin = local_min.at(x, y);
            // If the remapped extremes cross (possible when the whole
            // neighborhood sits inside one half of the range), the local span
            // carries no usable contrast; treating it as flat keeps the output
            // monotone in the input everywhere.
            const double max2 = std::max(remap(vmax, params.tmax1, params.tmax2),
                                         remap(vmin, params.tmin1, params.tmin2));
            const double min2 = remap(vmin, params.tmin1, params.tmin2);
            double v;
            if (vmax == vmin) {
                v = min2;  // flat neighborhood: no contrast to stretch
            } else {
                v = min2 + (max2 - min2) * (equalized.at(x, y) - vmin) / (vmax - vmin);
            }
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

}  // namespace fp
