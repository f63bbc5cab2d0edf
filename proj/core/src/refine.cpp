#include "fpcore/refine.hpp"

#include <algorithm>
#include <cmath>

#include "fpcore/errors.hpp"
#include "fpcore/imgproc.hpp"

namespace fp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Field samples around one centre plus the two projection families derived
// from them. A zero-magnitude sample leaves every weight family undefined
// (its projection divides by |F|), so the whole gather is flagged degenerate.
// Weight magnitudes are normalized by the L1 mass of the signed projections,
// which keeps every weight in [-1, 1] and makes a locally parallel field
// cancel to an exact zero in the drifters instead of amplifying noise.
// The signed sums are kept alongside the L1 masses: when one cancels, the
// projections carry no net orientation signal (the symmetric-cancellation
// case of a parallel field) and that family counts as degenerate.
struct CircleGather {
    std::vector<cplx> samples;
    std::vector<double> radial;   // cos against the circle direction
    std::vector<double> tangent;  // sin against the circle direction
    double radial_abs = 0.0;      // L1 mass of the radial projections
    double tangent_abs = 0.0;     // L1 mass of the tangential projections
    double radial_sum = 0.0;      // signed sum, cancellation detector
    double tangent_sum = 0.0;     // signed sum, cancellation detector
    double radial_sq = 0.0;       // L2 mass, normalizer of the squared weights
    bool zero_sample = false;
};

// A projection family is unusable when it has no mass at all or when its
// signed mass cancels out.
inline bool no_signal(double abs_sum, double signed_sum, double eps) {
    return abs_sum < eps || std::abs(signed_sum) < eps;
}

CircleGather gather_circle(const OrientationField& field, double x, double y,
                           const CirclePattern& pattern) {
    const int n = pattern.count();
    CircleGather g;
    g.samples.resize(n);
    g.radial.assign(n, 0.0);
    g.tangent.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const cplx s = sample_field(field, x + pattern.xs[k], y + pattern.ys[k]);
        g.samples[k] = s;
        const double ms = std::abs(s);
        if (ms == 0.0) {
            g.zero_sample = true;
            continue;
        }
        const cplx q = s * std::conj(pattern.dirs[k]) / (ms * std::abs(pattern.dirs[k]));
        g.radial[k] = q.real();
        g.tangent[k] = q.imag();
        g.radial_abs += std::abs(q.real());
        g.tangent_abs += std::abs(q.imag());
        g.radial_sum += q.real();
        g.tangent_sum += q.imag();
        g.radial_sq += q.real() * q.real();
    }
    return g;
}

std::vector<double> self_numerators(const CircleGather& g, cplx anchor, double& abs_sum,
                                    double& signed_sum) {
    const double ma = std::abs(anchor);
    std::vector<double> nums(g.samples.size(), 0.0);
    abs_sum = 0.0;
    signed_sum = 0.0;
    for (std::size_t k = 0; k < g.samples.size(); ++k) {
        const double ms = std::abs(g.samples[k]);
        if (ms == 0.0) continue;
        nums[k] = (g.samples[k] * std::conj(anchor)).real() / (ms * ma);
        abs_sum += std::abs(nums[k]);
        signed_sum += nums[k];
    }
    return nums;
}

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Shared tail of the adjuster and smoother: blend the squared centre value
// with the squared circle aggregate, take the phase of the square root, and
// keep the larger of the two magnitudes.
cplx combine(cplx centre, cplx aggregate, double strength) {
    const cplx combined_sq = (1.0 - strength) * centre * centre + strength * aggregate * aggregate;
    if (std::abs(combined_sq) == 0.0) return centre;
    const cplx root = std::sqrt(combined_sq);
    const cplx unit = root / std::abs(root);
    return canonical_value(unit * std::max(std::abs(centre), std::abs(aggregate)));
}

// The squared weights of the circle aggregates are renormalized to unit sum,
// so the aggregate is a convex combination of sign-aligned samples and its
// magnitude stays comparable to the field's. (Squaring the already
// L1-normalized weights instead would shrink the aggregate by the pattern
// size and reduce both operators to the identity.)
cplx adjust_from(const CircleGather& g, cplx centre, double strength, double eps) {
    if (g.zero_sample || no_signal(g.radial_abs, g.radial_sum, eps)) return centre;
    cplx aggregate(0.0, 0.0);
    for (std::size_t k = 0; k < g.samples.size(); ++k) {
        const double w2 = g.radial[k] * g.radial[k] / g.radial_sq;
        aggregate += sgn(g.radial[k]) * w2 * g.samples[k];
    }
    return combine(centre, aggregate, strength);
}

cplx smooth_from(const CircleGather& g, cplx centre, double strength, double eps) {
    if (g.zero_sample || no_signal(g.radial_abs, g.radial_sum, eps)) return centre;
    if (std::abs(centre) == 0.0) return centre;
    double self_abs = 0.0;
    double self_sum = 0.0;
    const std::vector<double> self = self_numerators(g, centre, self_abs, self_sum);
    if (no_signal(self_abs, self_sum, eps)) return centre;
    cplx aggregate(0.0, 0.0);
    for (std::size_t k = 0; k < g.samples.size(); ++k) {
        const double w2 = g.radial[k] * g.radial[k] / g.radial_sq;
        aggregate += sgn(self[k]) * w2 * g.samples[k];
    }
    return combine(centre, aggregate, strength);
}

}  // namespace

CirclePattern circle_pattern(double radius, int count) {
    if (radius < 1.0) throw InvalidParameter("circle_pattern: radius must be >= 1");
    if (count == 0) count = std::max(8L, std::lround(2.0 * kPi * radius));
    if (count < 2) throw InvalidParameter("circle_pattern: need at least 2 points");
    CirclePattern p;
    p.radius = radius;
    p.xs.resize(count);
    p.ys.resize(count);
    p.dirs.resize(count);
    for (int k = 0; k < count; ++k) {
        const double a = 2.0 * kPi * k / count;
        p.xs[k] = radius * std::cos(a);
        p.ys[k] = radius * std::sin(a);
        p.dirs[k] = cplx(p.xs[k], p.ys[k]);
    }
    return p;
}

std::vector<double> radial_weights(const OrientationField& field, double x, double y,
                                   const CirclePattern& pattern, double eps) {
    const CircleGather g = gather_circle(field, x, y, pattern);
    if (g.zero_sample || no_signal(g.radial_abs, g.radial_sum, eps)) throw DegenerateWeights();
    std::vector<double> w(g.radial.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = g.radial[k] / g.radial_abs;
    return w;
}

std::vector<double> tangential_weights(const OrientationField& field, double x, double y,
                                       const CirclePattern& pattern, double eps) {
    const CircleGather g = gather_circle(field, x, y, pattern);
    if (g.zero_sample || no_signal(g.tangent_abs, g.tangent_sum, eps)) throw DegenerateWeights();
    std::vector<double> w(g.tangent.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = g.tangent[k] / g.tangent_abs;
    return w;
}

std::vector<double> self_weights(const OrientationField& field, double x, double y,
                                 const CirclePattern& pattern, double eps) {
    const cplx anchor = sample_field(field, x, y);
    if (std::abs(anchor) == 0.0) throw ZeroAnchor();
    const CircleGather g = gather_circle(field, x, y, pattern);
    if (g.zero_sample) throw DegenerateWeights();
    double abs_sum = 0.0;
    double signed_sum = 0.0;
    const std::vector<double> nums = self_numerators(g, anchor, abs_sum, signed_sum);
    if (no_signal(abs_sum, signed_sum, eps)) throw DegenerateWeights();
    std::vector<double> w(nums.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = nums[k] / abs_sum;
    return w;
}

cplx adjust_at(const OrientationField& field, int x, int y, const CirclePattern& pattern,
               double strength, double eps) {
    return adjust_from(gather_circle(field, x, y, pattern), field.at(x, y), strength, eps);
}

cplx smooth_at(const OrientationField& field, int x, int y, const CirclePattern& pattern,
               double strength, double eps) {
    return smooth_from(gather_circle(field, x, y, pattern), field.at(x, y), strength, eps);
}

cplx drift_at(const OrientationField& field, int x, int y, const CirclePattern& pattern,
              DriftMode mode, double eps) {
    const CircleGather g = gather_circle(field, x, y, pattern);
    const double mass = (mode == DriftMode::Tangent) ? g.radial_abs : g.tangent_abs;
    const double net = (mode == DriftMode::Tangent) ? g.radial_sum : g.tangent_sum;
    if (g.zero_sample || no_signal(mass, net, eps)) return cplx(0.0, 0.0);
    const std::vector<double>& nums = (mode == DriftMode::Tangent) ? g.radial : g.tangent;
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < g.samples.size(); ++k) acc += (nums[k] / mass) * g.samples[k];
    return acc;
}

namespace {

template <typename PerPixel>
OrientationField map_field(const OrientationField& field, PerPixel&& fn) {
    OrientationField out(field.width, field.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) out.at(x, y) = fn(x, y);
    return out;
}

}  // namespace

OrientationField adjuster(const OrientationField& field, const CirclePattern& pattern,
                          double strength, double eps) {
    return map_field(field, [&](int x, int y) {
        return adjust_from(gather_circle(field, x, y, pattern), field.at(x, y), strength, eps);
    });
}

OrientationField adjuster(const OrientationField& field, const CirclePattern& pattern,
                          const StrengthMap& strength, double eps) {
    require_same_size(field.width, field.height, strength.width, strength.height, "adjuster");
    return map_field(field, [&](int x, int y) {
        return adjust_from(gather_circle(field, x, y, pattern), field.at(x, y),
                           strength.at(x, y), eps);
    });
}

OrientationField smoother(const OrientationField& field, const CirclePattern& pattern,
                          double strength, double eps) {
    return map_field(field, [&](int x, int y) {
        return smooth_from(gather_circle(field, x, y, pattern), field.at(x, y), strength, eps);
    });
}

OrientationField drifter(const OrientationField& field, const CirclePattern& pattern,
                         DriftMode mode, double eps) {
    return map_field(field, [&](int x, int y) { return drift_at(field, x, y, pattern, mode, eps); });
}

RealMap loop_delta_response(const OrientationField& field, const CirclePattern& pattern,
                            double eps) {
    RealMap out(field.width, field.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            // The conjugate field's samples are the conjugates of the same
            // samples, so one gather serves both drift pairs.
            const CircleGather g = gather_circle(field, x, y, pattern);
            CircleGather gc;
            const int n = pattern.count();
            gc.samples.resize(n);
            gc.radial.assign(n, 0.0);
            gc.tangent.assign(n, 0.0);
            gc.zero_sample = g.zero_sample;
            for (int k = 0; k < n; ++k) {
                const cplx s = canonical_value(std::conj(g.samples[k]));
                gc.samples[k] = s;
                const double ms = std::abs(s);
                if (ms == 0.0) continue;
                const cplx q = s * std::conj(pattern.dirs[k]) / (ms * std::abs(pattern.dirs[k]));
                gc.radial[k] = q.real();
                gc.tangent[k] = q.imag();
                gc.radial_abs += std::abs(q.real());
                gc.tangent_abs += std::abs(q.imag());
                gc.radial_sum += q.real();
                gc.tangent_sum += q.imag();
            }
            auto drift_mag = [&](const CircleGather& gg, bool tangent_mode) {
                const double mass = tangent_mode ? gg.radial_abs : gg.tangent_abs;
                const double net = tangent_mode ? gg.radial_sum : gg.tangent_sum;
                if (gg.zero_sample || no_signal(mass, net, eps)) return 0.0;
                const std::vector<double>& nums = tangent_mode ? gg.radial : gg.tangent;
                cplx acc(0.0, 0.0);
                for (int k = 0; k < n; ++k) acc += (nums[k] / mass) * gg.samples[k];
                return std::abs(acc);
            };
            out.at(x, y) = (drift_mag(g, true) + drift_mag(g, false) - drift_mag(gc, true) -
                            drift_mag(gc, false)) /
                           2.0;
        }
    }
    return out;
}

namespace {

int odd_radius(double v) {
    int r = std::max(3L, std::lround(v));
    if (r % 2 == 0) ++r;
    return r;
}

OrientationField estimate_at_radius(const GrayImage& image, int size,
                                    const PipelineParams& params) {
    const FilterBank bank = build_filter_bank(size, params.sigma1, params.alpha1, params.sigma2,
                                              params.alpha2, params.n_angles);
    return estimate_orientation(image, bank, params.field_smooth_factor * size,
                                params.response_blur_factor * size,
                                params.strict_single_angle != 0);
}

BinaryMask threshold_mask(const RealMap& map, double tau, bool absolute) {
    BinaryMask out(map.width, map.height);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const double v = absolute ? std::abs(map.at(x, y)) : map.at(x, y);
            out.set(x, y, v > tau);
        }
    return out;
}

// Smoother restricted to a region: pixels outside copy through untouched.
// Exactness relies on the iterative loop only reading smoothed values where
// the blend weight or the change mask can be nonzero.
OrientationField smoother_within(const OrientationField& field, const CirclePattern& pattern,
                                 double strength, double eps, const BinaryMask& region) {
    OrientationField out = field;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            if (!region.get(x, y)) continue;
            out.at(x, y) =
                smooth_from(gather_circle(field, x, y, pattern), field.at(x, y), strength, eps);
        }
    return out;
}

}  // namespace

RefineTrace build_refinement_masks(const GrayImage& image, const OrientationField& field,
                                   const BinaryMask& foreground, double period_px,
                                   const PipelineParams& params) {
    require_same_size(image.width, image.height, field.width, field.height,
                      "build_refinement_masks");
    require_same_size(image.width, image.height, foreground.width, foreground.height,
                      "build_refinement_masks");
    if (!(period_px > 0.0))
        throw InvalidParameter("build_refinement_masks: period must be positive");
    if (foreground.empty()) throw EmptyForeground("refinement needs a foreground");

    std::size_t fg = 0, dead = 0;
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            if (!foreground.get(x, y)) continue;
            ++fg;
            if (std::abs(field.at(x, y)) == 0.0) ++dead;
        }
    if (static_cast<double>(dead) > 0.99 * static_cast<double>(fg))
        throw DegenerateField("input field is zero on almost all foreground");

    RefineTrace trace;
    trace.radius_coarse = odd_radius(1.5 * period_px);
    trace.radius_fine = odd_radius(0.5 * period_px);

    const double eps = params.epsilon_weight;
    const CirclePattern pat_smooth =
        circle_pattern(std::max(1.0, params.rho_smooth * period_px), params.n_circle);
    const CirclePattern pat_drift =
        circle_pattern(std::max(1.0, params.rho_drift * period_px), params.n_circle);
    const CirclePattern pat_adjust =
        circle_pattern(std::max(1.0, params.rho_adjust * period_px), params.n_circle);

    trace.field_coarse = estimate_at_radius(image, trace.radius_coarse, params);
    const OrientationField smoothed =
        smoother(trace.field_coarse, pat_smooth, params.strength, eps);

    // Delta-free mask: spots where the conjugate drifts overpower the direct
    // ones mark deltas and go false.
    const RealMap delta_resp = loop_delta_response(smoothed, pat_drift, eps);
    BinaryMask m1 = mask_and(threshold_mask(delta_resp, -params.tau_delta, false), foreground);
    m1 = morphology(m1, MorphOp::Erode, params.m1_erode);
    trace.mask_delta_free = m1;
    // The blurred mask gates the relaxation parameter rather than replacing
    // it: blending strength must stay strictly below 1, or a pixel whose
    // circle aggregate cancels to rounding noise (any locally parallel
    // neighborhood) would have its phase replaced by that noise.
    trace.adjust_strength = gaussian_blur(mask_to_real(m1), params.s1_sigma, Border::Zero);
    for (double& v : trace.adjust_strength.data) v *= params.strength;

    trace.field_fine = estimate_at_radius(image, trace.radius_fine, params);
    trace.field_adjusted = adjuster(smoothed, pat_adjust, trace.adjust_strength, eps);
    const OrientationField fine_adjusted =
        (params.a2_scalar_strength != 0)
            ? adjuster(trace.field_fine, pat_adjust, params.strength, eps)
            : adjuster(trace.field_fine, pat_adjust, trace.adjust_strength, eps);

    // Unstable mask: where the wide and narrow estimates disagree after
    // adjustment, the field is radius-sensitive and needs smoothing.
    const OrientationField coarse_n = normalize_field(trace.field_adjusted);
    const OrientationField fine_n = normalize_field(fine_adjusted);
    RealMap disagreement(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            disagreement.at(x, y) = doubled_distance(coarse_n.at(x, y), fine_n.at(x, y));
    const std::size_t min_area = static_cast<std::size_t>(
        std::max(1.0, params.min_component_factor * period_px * period_px));
    BinaryMask m2 = mask_and(threshold_mask(disagreement, params.tau_unstable, false), foreground);
    m2 = filter_min_area(m2, min_area);
    m2 = morphology(m2, MorphOp::Dilate, params.m2_dilate);
    trace.mask_unstable = m2;

    // Singular mask: blurred loop/delta response of the adjusted field,
    // thresholded in absolute value inside the eroded foreground.
    trace.singular_response = gaussian_blur(
        loop_delta_response(trace.field_adjusted, pat_drift, eps), params.i3_sigma);
    const BinaryMask fg_eroded = morphology(foreground, MorphOp::Erode, params.m0_erode);
    BinaryMask m3 =
        mask_and(threshold_mask(trace.singular_response, params.tau_singular, true), fg_eroded);
    m3 = filter_min_area(m3, min_area);
    trace.mask_singular = m3;

    BinaryMask m4 = mask_and(m2, mask_not(m3));
    trace.mask_smooth_seed = morphology(m4, MorphOp::Dilate, params.m4_dilate);
    return trace;
}

SmoothResult iterative_smoothing(const OrientationField& seed, const BinaryMask& seed_mask,
                                 const BinaryMask& foreground, const CirclePattern& pattern,
                                 const PipelineParams& params) {
    require_same_size(seed.width, seed.height, seed_mask.width, seed_mask.height,
                      "iterative_smoothing");
    require_same_size(seed.width, seed.height, foreground.width, foreground.height,
                      "iterative_smoothing");
    if (params.iter_erode <= params.iter_dilate)
        throw InvalidParameter("iterative_smoothing: erosion must exceed dilation");

    const double eps = params.epsilon_weight;
    const int pad = params.iter_dilate + static_cast<int>(std::ceil(3.0 * params.w_sigma));

    SmoothResult result;
    result.field = seed;
    BinaryMask mask = seed_mask;
    for (;;) {
        ++result.iterations;

        // Values of the smoothed field are only consumed inside the dilated
        // mask plus the blur support, so evaluation is confined there.
        const BinaryMask region = morphology(mask, MorphOp::Dilate, pad);
        const OrientationField smoothed =
            smoother_within(result.field, pattern, params.strength, eps, region);

        // Keep the still-changing pixels of the eroded mask; zero-padded
        // erosion guarantees a strict shrink of any nonempty mask.
        const BinaryMask eroded =
            morphology(mask, MorphOp::Erode, params.iter_erode, MorphBorder::ZeroPad);
        BinaryMask next(mask.width, mask.height);
        for (int y = 0; y < mask.height; ++y)
            for (int x = 0; x < mask.width; ++x)
                next.set(x, y, eroded.get(x, y) && foreground.get(x, y) &&
                                   doubled_distance(smoothed.at(x, y), result.field.at(x, y)) >
                                       params.tau_converge);
        next = morphology(next, MorphOp::Dilate, params.iter_dilate);

        const RealMap weight = gaussian_blur(mask_to_real(next), params.w_sigma, Border::Zero);
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                const double w = weight.at(x, y);
                if (w == 0.0) continue;  // untouched pixels stay bit-identical
                result.field.at(x, y) =
                    halve_value((1.0 - w) * double_value(result.field.at(x, y)) +
                                w * double_value(smoothed.at(x, y)));
            }
        }
        mask = next;

        if (mask.empty()) break;
        if (result.iterations >= params.iteration_cap) {
            result.iteration_cap_hit = true;
            break;
        }
    }
    return result;
}

RefineResult refine(const GrayImage& image, const OrientationField& field,
                    const BinaryMask& foreground, double period_px,
                    const PipelineParams& params) {
    RefineResult result;
    result.trace = build_refinement_masks(image, field, foreground, period_px, params);
    const CirclePattern pattern =
        circle_pattern(std::max(1.0, params.rho_smooth * period_px), params.n_circle);
    SmoothResult sm = iterative_smoothing(result.trace.field_adjusted,
                                          result.trace.mask_smooth_seed, foreground, pattern,
                                          params);
    result.trace.iterations = sm.iterations;
    result.trace.iteration_cap_hit = sm.iteration_cap_hit;
    result.field = std::move(sm.field);
    return result;
}

RefineResult refine(const GrayImage& image, const BinaryMask& foreground, double period_px,
                    const PipelineParams& params) {
    return refine(image, estimate_at_radius(image, params.filter_size, params), foreground,
                  period_px, params);
}

}  // namespace fp
