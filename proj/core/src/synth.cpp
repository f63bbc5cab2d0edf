#include "fpcore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fpcore/errors.hpp"
#include "fpcore/imgproc.hpp"

namespace fp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Bilinear sample with edge replication; keeps ridge energy up to the border.
double sample_clamped(const RealMap& m, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(m.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(m.height - 1));
    const int x0 = std::min(static_cast<int>(x), m.width - 1);
    const int y0 = std::min(static_cast<int>(y), m.height - 1);
    const int x1 = std::min(x0 + 1, m.width - 1);
    const int y1 = std::min(y0 + 1, m.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = m.at(x0, y0) * (1.0 - fx) + m.at(x1, y0) * fx;
    const double bot = m.at(x0, y1) * (1.0 - fx) + m.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

}  // namespace

OrientationField synth_field(int width, int height, const std::vector<Singularity>& singularities,
                             double base_angle) {
    for (std::size_t i = 0; i < singularities.size(); ++i)
        for (std::size_t j = i + 1; j < singularities.size(); ++j)
            if (singularities[i].x == singularities[j].x &&
                singularities[i].y == singularities[j].y)
                throw InvalidParameter("synth_field: coincident singularities");

    OrientationField field(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double doubled = 2.0 * base_angle;
            bool on_core = false;
            for (const auto& s : singularities) {
                if (x == std::lround(s.x) && y == std::lround(s.y)) {
                    on_core = true;
                    break;
                }
                const double a = std::atan2(y - s.y, x - s.x);
                doubled += (s.type == Singularity::Type::Loop) ? a : -a;
            }
            if (on_core) {
                field.at(x, y) = cplx(0.0, 0.0);
            } else {
                field.at(x, y) = halve_value(cplx(std::cos(doubled), std::sin(doubled)));
            }
        }
    }
    return field;
}

GrayImage render_ridges(const OrientationField& field, double period, std::uint32_t seed,
                        int iterations) {
    if (period < 4.0) throw InvalidParameter("render_ridges: period must be >= 4 px");
    if (iterations < 1) throw InvalidParameter("render_ridges: iterations must be >= 1");
    const int w = field.width;
    const int h = field.height;

    RealMap buf(w, h);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) buf.at(x, y) = uni(rng);

    // Tap weights reused at every pixel: a smoothing profile along the ridge
    // direction and a cosine-modulated profile across it. The along profile
    // is wider than the across one so the ridge flow coheres with the target
    // orientation over more than one period; the across profile is made
    // zero-mean so repeated filtering does not accumulate a DC term.
    const double sigma_along = 1.25 * period;
    const double sigma_across = period / 2.0;
    const int reach_along = std::max(1, static_cast<int>(std::ceil(2.0 * sigma_along)));
    const int reach_across = std::max(1, static_cast<int>(std::ceil(2.0 * sigma_across)));
    std::vector<double> w_along(2 * reach_along + 1);
    std::vector<double> w_across(2 * reach_across + 1);
    double along_sum = 0.0;
    double across_sum = 0.0;
    for (int t = -reach_along; t <= reach_along; ++t) {
        const double g = std::exp(-0.5 * (t * t) / (sigma_along * sigma_along));
        w_along[t + reach_along] = g;
        along_sum += g;
    }
    for (int t = -reach_across; t <= reach_across; ++t) {
        const double g = std::exp(-0.5 * (t * t) / (sigma_across * sigma_across));
        w_across[t + reach_across] = g * std::cos(2.0 * kPi * t / period);
        across_sum += w_across[t + reach_across];
    }
    for (double& v : w_along) v /= along_sum;
    const double across_mean = across_sum / static_cast<double>(w_across.size());
    for (double& v : w_across) v -= across_mean;

    RealMap next(w, h);
    for (int it = 0; it < iterations; ++it) {
        // Pass 1: smooth along the local orientation.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double phi = phase_of(field.at(x, y));
                const double dx = std::cos(phi);
                const double dy = std::sin(phi);
                double acc = 0.0;
                for (int t = -reach_along; t <= reach_along; ++t)
                    acc += w_along[t + reach_along] * sample_clamped(buf, x + t * dx, y + t * dy);
                next.at(x, y) = acc;
            }
        }
        std::swap(buf, next);
        // Pass 2: band-pass across the orientation.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double phi = phase_of(field.at(x, y));
                const double dx = -std::sin(phi);
                const double dy = std::cos(phi);
                double acc = 0.0;
                for (int t = -reach_across; t <= reach_across; ++t)
                    acc += w_across[t + reach_across] * sample_clamped(buf, x + t * dx, y + t * dy);
                next.at(x, y) = acc;
            }
        }
        std::swap(buf, next);
        // Keep amplitudes bounded between iterations.
        double peak = 0.0;
        for (const double v : buf.data) peak = std::max(peak, std::abs(v));
        if (peak > 0.0)
            for (double& v : buf.data) v /= peak;
    }

    return to_gray(rescale_linear(buf, 0.0, 255.0));
}

OrientationField corrupt_region(const OrientationField& field, double cx, double cy, double radius,
                                std::uint32_t seed) {
    if (radius < 0.0) throw InvalidParameter("corrupt_region: radius must be >= 0");
    OrientationField out = field;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, kPi);
    // Strict interior, so a radius-0 disk holds no pixels at all.
    const double r2 = radius * radius;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy >= r2) continue;
            const double mag = std::abs(out.at(x, y));
            const double phi = uni(rng);
            out.at(x, y) = canonical_value(cplx(mag * std::cos(phi), mag * std::sin(phi)));
        }
    }
    return out;
}

ErrorStats angular_error(const OrientationField& a, const OrientationField& b,
                         const BinaryMask& mask) {
    require_same_size(a.width, a.height, b.width, b.height, "angular_error");
    require_same_size(a.width, a.height, mask.width, mask.height, "angular_error");
    ErrorStats stats;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            if (!mask.get(x, y)) continue;
            if (std::abs(a.at(x, y)) == 0.0 || std::abs(b.at(x, y)) == 0.0) continue;
            double d = std::abs(phase_of(a.at(x, y)) - phase_of(b.at(x, y)));
            d = std::min(d, kPi - d);
            const double deg = d * 180.0 / kPi;
            sum += deg;
            sumsq += deg * deg;
            stats.max_deg = std::max(stats.max_deg, deg);
            ++stats.pixels;
        }
    }
    if (stats.pixels == 0) throw EmptyMask("angular_error: no usable pixels under mask");
    stats.mean_deg = sum / static_cast<double>(stats.pixels);
    stats.rmse_deg = std::sqrt(sumsq / static_cast<double>(stats.pixels));
    return stats;
}

}  // namespace fp
