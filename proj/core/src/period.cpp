#include "fpcore/period.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpcore/errors.hpp"

namespace fp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sample_intensity(const GrayImage& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto px = [&](int xx, int yy) -> double {
        if (!img.in_bounds(xx, yy)) return 0.0;
        return img.at(xx, yy);
    };
    const double top = px(x0, y0) * (1.0 - fx) + px(x0 + 1, y0) * fx;
    const double bot = px(x0, y0 + 1) * (1.0 - fx) + px(x0 + 1, y0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

// Dominant frequency of a profile: 3-tap moving average with clamped ends,
// mean removal, then the first strict local maximum of the spectrum at an
// integer frequency >= 1. Quantization noise puts shallow bumps on the
// leakage tail well below the true peak, so a candidate must also reach half
// the spectrum maximum; this keeps the first-peak-not-harmonic behavior
// without letting noise win. Falls back to the global peak; a zero spectrum
// means the segment carries no signal at all.
int dominant_frequency(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<double> smooth(n);
    for (int i = 0; i < n; ++i) {
        const int a = std::max(i - 1, 0);
        const int b = std::min(i + 1, n - 1);
        smooth[i] = (values[a] + values[i] + values[b]) / 3.0;
    }
    const double mean = std::accumulate(smooth.begin(), smooth.end(), 0.0) / n;
    for (double& v : smooth) v -= mean;

    const int fmax = n / 2;
    std::vector<double> spec(fmax + 1, 0.0);
    for (int f = 1; f <= fmax; ++f) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
            const double ang = 2.0 * kPi * f * i / n;
            re += smooth[i] * std::cos(ang);
            im -= smooth[i] * std::sin(ang);
        }
        spec[f] = std::hypot(re, im);
    }

    double peak = 0.0;
    for (int f = 1; f <= fmax; ++f) peak = std::max(peak, spec[f]);
    if (peak <= 0.0) return 0;
    const double floor = 0.5 * peak;
    for (int f = 1; f <= fmax; ++f) {
        const double left = spec[f - 1];
        const double right = (f + 1 <= fmax) ? spec[f + 1] : 0.0;
        if (spec[f] >= floor && spec[f] > left && spec[f] >= right) return f;
    }
    int best = 1;
    for (int f = 2; f <= fmax; ++f)
        if (spec[f] > spec[best]) best = f;
    return best;
}

}  // namespace

Profile sample_profile(const OrientationField& field, const GrayImage& image, double cx, double cy,
                       double length, int n_samples) {
    require_same_size(field.width, field.height, image.width, image.height, "sample_profile");
    if (n_samples < 2) throw InvalidParameter("sample_profile: need at least 2 samples");
    if (length <= 0.0) throw InvalidParameter("sample_profile: length must be positive");

    const cplx center = sample_field(field, cx, cy);
    const double phi = phase_of(center);
    // Walk perpendicular to the ridge flow so the profile crosses ridges.
    const double dx = -std::sin(phi);
    const double dy = std::cos(phi);

    Profile prof;
    prof.intensity.resize(n_samples);
    prof.orientation.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = (static_cast<double>(i) / (n_samples - 1) - 0.5) * length;
        const double sx = cx + t * dx;
        const double sy = cy + t * dy;
        if (sx < 0.0 || sy < 0.0 || sx > image.width - 1 || sy > image.height - 1)
            throw OutOfBounds("sample_profile: segment leaves the raster");
        prof.intensity[i] = sample_intensity(image, sx, sy);
        prof.orientation[i] = sample_field(field, sx, sy);
    }
    return prof;
}

PeriodEstimate estimate_period(const OrientationField& field, const GrayImage& image,
                               const PipelineParams& params) {
    require_same_size(field.width, field.height, image.width, image.height, "estimate_period");
    PeriodEstimate est;
    const double step = params.grid_step;
    double freq_sum = 0.0;

    for (double cy = step / 2.0; cy < image.height; cy += step) {
        for (double cx = step / 2.0; cx < image.width; cx += step) {
            SegmentEstimate seg;
            seg.x = cx;
            seg.y = cy;
            Profile prof;
            try {
                prof = sample_profile(field, image, cx, cy, params.segment_length,
                                      params.n_samples);
            } catch (const OutOfBounds&) {
                est.segments.push_back(seg);
                continue;
            }
            double min_mag = 1e300;
            for (const cplx& o : prof.orientation) min_mag = std::min(min_mag, std::abs(o));
            if (min_mag <= params.t_reliable) {
                est.segments.push_back(seg);
                continue;
            }
            const int f = dominant_frequency(prof.intensity);
            if (f >= 1) {
                seg.frequency = f;
                seg.reliable = true;
                freq_sum += f;
                ++est.reliable_count;
            }
            est.segments.push_back(seg);
        }
    }

    if (est.reliable_count == 0)
        throw NoReliableSegments("estimate_period: no segment produced a usable frequency");
    est.frequency = freq_sum / est.reliable_count;
    est.period_px = params.segment_length / est.frequency;
    return est;
}

}  // namespace fp
