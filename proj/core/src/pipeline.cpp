#include "fpcore/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "fpcore/errors.hpp"
#include "fpcore/orientation.hpp"

namespace fp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

PipelineResult run_pipeline(const GrayImage& image, const PipelineParams& params) {
    params.validate();
    PipelineResult result;
    const auto t_total = Clock::now();

    auto t = Clock::now();
    result.equalized = equalize(image, params);
    result.border = remove_border(result.equalized.image, params);
    result.foreground = segment(result.equalized.image, result.border.mask, params);
    result.amplified = amplify_ridges(result.equalized.image, result.foreground, params);
    result.timings.preprocess_ms = ms_since(t);

    t = Clock::now();
    const FilterBank bank = build_filter_bank(params.filter_size, params.sigma1, params.alpha1,
                                              params.sigma2, params.alpha2, params.n_angles);
    result.orientation = estimate_orientation(
        result.amplified, bank, params.field_smooth_factor * params.filter_size,
        params.response_blur_factor * params.filter_size, params.strict_single_angle != 0);
    result.timings.orientation_ms = ms_since(t);

    t = Clock::now();
    result.period = estimate_period(result.orientation, result.amplified, params);
    result.timings.period_ms = ms_since(t);

    t = Clock::now();
    result.refined = refine(result.amplified, result.orientation, result.foreground,
                            result.period.period_px, params);
    result.timings.refine_ms = ms_since(t);

    result.timings.total_ms = ms_since(t_total);
    return result;
}

OverlayImage render_overlay(const GrayImage& image, const OrientationField& field, int stride) {
    require_same_size(image.width, image.height, field.width, field.height, "render_overlay");
    if (stride < 4) throw InvalidParameter("render_overlay: stride must be >= 4");

    OverlayImage overlay;
    overlay.gray = image;
    overlay.alpha = GrayImage(image.width, image.height, 255);

    const int cells_x = image.width / stride;
    const int cells_y = image.height / stride;
    const double half_len = 0.5 * 0.8 * stride;
    for (int cy = 0; cy < cells_y; ++cy) {
        for (int cx = 0; cx < cells_x; ++cx) {
            const double px = cx * stride + stride / 2.0;
            const double py = cy * stride + stride / 2.0;
            const cplx v = sample_field(field, px, py);
            const double mag = std::abs(v);
            if (mag == 0.0) continue;
            const double opacity = std::min(1.0, mag);
            const double phase = std::arg(v);
            const double dx = std::cos(phase);
            const double dy = std::sin(phase);
            std::set<std::pair<int, int>> touched;
            for (double s = -half_len; s <= half_len; s += 0.25) {
                const long ix = std::lround(px + s * dx);
                const long iy = std::lround(py + s * dy);
                if (ix < 0 || iy < 0 || ix >= image.width || iy >= image.height) continue;
                touched.emplace(static_cast<int>(ix), static_cast<int>(iy));
            }
            for (const auto& [ix, iy] : touched) {
                const double base = overlay.gray.at(ix, iy);
                const double blended = (1.0 - opacity) * base;  // ink is black
                overlay.gray.at(ix, iy) = static_cast<std::uint8_t>(std::lround(blended));
            }
        }
    }
    return overlay;
}

std::string report_text(const std::string& input_path, const PipelineResult& result,
                        const ErrorStats* stats) {
    std::ostringstream out;
    out << "input = " << input_path << "\n";
    out << "width = " << result.amplified.width << "\n";
    out << "height = " << result.amplified.height << "\n";
    out << "equalize_threshold = " << result.equalized.threshold << "\n";
    out << "foreground_pixels = " << result.foreground.count() << "\n";
    out << "period_px = " << result.period.period_px << "\n";
    out << "ridge_frequency = " << result.period.frequency << "\n";
    out << "reliable_segments = " << result.period.reliable_count << "\n";
    out << "iterations = " << result.refined.trace.iterations << "\n";
    out << "iteration_cap_hit = " << (result.refined.trace.iteration_cap_hit ? 1 : 0) << "\n";
    out << "time_preprocess_ms = " << result.timings.preprocess_ms << "\n";
    out << "time_orientation_ms = " << result.timings.orientation_ms << "\n";
    out << "time_period_ms = " << result.timings.period_ms << "\n";
    out << "time_refine_ms = " << result.timings.refine_ms << "\n";
    out << "time_total_ms = " << result.timings.total_ms << "\n";
    if (stats != nullptr) {
        out << "mean_deg = " << stats->mean_deg << "\n";
        out << "rmse_deg = " << stats->rmse_deg << "\n";
        out << "max_deg = " << stats->max_deg << "\n";
        out << "pixel_count = " << stats->pixels << "\n";
    }
    return out.str();
}

}  // namespace fp
