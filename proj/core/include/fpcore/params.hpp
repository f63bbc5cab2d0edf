#pragma once

#include <string>

#include "fpcore/errors.hpp"

namespace fp {

// Every tunable of the pipeline, serializable as "key = value" text. Angles
// and taus are unitless; sigmas, radii and lengths are in pixels.
struct PipelineParams {
    // orientation estimation
    int filter_size = 15;   // odd kernel size of the derivative bank
    int n_angles = 36;      // rotations over [0, pi)
    double sigma1 = 1.0;    // derivative-axis taper scale
    double alpha1 = 2.0;    // derivative-axis taper exponent
    double sigma2 = 0.85;   // cross-axis taper scale
    double alpha2 = 2.0;    // cross-axis taper exponent
    double response_blur_factor = 1.0 / 3.0;  // response blur sigma = factor * size
    double field_smooth_factor = 1.0 / 3.0;   // field smoothing sigma = factor * size
    int strict_single_angle = 0;  // average raw phases instead of doubled ones

    // equalization
    int clip_lo = 10;         // greys at or below collapse to 0
    int clip_hi = 245;        // greys at or above collapse to 255
    double hist_sigma = 4.0;  // histogram smoothing, in bins

    // border removal
    double tau_variation = 50.0;  // min per-line max-min variation
    double tau_line = 40.0;       // min normalized oblique response per column
    double line_min_cols = 0.6;   // fraction of columns that must respond
    double line_max_resid = 3.0;  // max RMS residual of the fitted line, px

    // segmentation
    int seg_median_radius = 3;
    double seg_blur_sigma = 2.0;
    int seg_min_radius = 3;
    double tau_segment = 100.0;  // foreground threshold on the filtered image
    int seg_dilate1 = 3;
    int seg_erode = 5;
    int seg_dilate2 = 5;
    int seg_keep = 2;  // components kept by the largest-component filter
    double edge_pre_sigma = 2.0;
    double edge_high = 0.2;   // strong-edge fraction of the gradient peak
    double edge_low = 0.08;   // weak-edge fraction of the gradient peak
    double edge_density_sigma = 8.0;
    double tau_edge = 0.15;  // min mean edge density per kept component

    // ridge amplification
    int amp_radius = 4;
    int tmin1 = 0;  // local-minimum remap: [tmin1, tmin2] -> [0, 255]
    int tmin2 = 128;
    int tmax1 = 128;  // local-maximum remap: [tmax1, tmax2] -> [0, 255]
    int tmax2 = 255;

    // spatial period
    int segment_length = 48;  // probe segment length, px
    int grid_step = 16;       // probe grid spacing, px
    int n_samples = 31;       // samples per probe segment
    double t_reliable = 0.25;  // min field magnitude along a reliable segment

    // refinement
    double strength = 0.5;     // default operator strength s
    double rho_smooth = 1.0;   // smoother circle radius, in periods
    double rho_drift = 1.0;    // drifter circle radius, in periods
    double rho_adjust = 0.7;   // adjuster circle radius, in periods
    double tau_delta = 0.3;    // delta exclusion threshold
    double tau_unstable = 0.5;  // field disagreement threshold
    double tau_singular = 0.1;  // singularity response threshold
    double tau_converge = 0.1;  // per-iteration change threshold
    double epsilon_weight = 1e-6;  // degenerate weight-sum cutoff
    int n_circle = 0;  // sample count per circle; 0 = max(8, round(2*pi*R))
    int m1_erode = 4;
    double s1_sigma = 4.0;
    int m2_dilate = 4;
    double i3_sigma = 2.0;
    int m0_erode = 4;
    int m4_dilate = 4;
    double min_component_factor = 1.0;  // min blob area = factor * period^2
    int iter_erode = 2;   // per-iteration mask erosion radius
    int iter_dilate = 1;  // per-iteration mask dilation radius; < iter_erode
    double w_sigma = 2.0;  // blending weight blur
    int iteration_cap = 100;
    int a2_scalar_strength = 0;  // fine-field adjuster uses scalar s, not the strength map

    // rendering and outputs
    int render_iterations = 6;
    int overlay_stride = 8;

    // Throws InvalidParameter naming the first violated constraint.
    void validate() const;
};

// key = value text, one pair per line, '#' starts a comment. Unknown keys and
// malformed values raise InvalidParameter. Loading validates the result.
PipelineParams load_params(const std::string& path);
void save_params(const PipelineParams& params, const std::string& path);
std::string params_to_string(const PipelineParams& params);

// Applies one "key=value" or "key" "value" pair, e.g. from a CLI override.
void set_param(PipelineParams& params, const std::string& key, const std::string& value);

}  // namespace fp
