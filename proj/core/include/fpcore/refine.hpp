#pragma once

#include <vector>

#include "fpcore/orientation.hpp"
#include "fpcore/params.hpp"
#include "fpcore/raster.hpp"

namespace fp {

// Sampling circle around the origin: count equally spaced points of the
// given radius, plus their complex representatives (x + iy).
struct CirclePattern {
    double radius = 0.0;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<cplx> dirs;

    int count() const { return static_cast<int>(dirs.size()); }
};

// count == 0 picks the default max(8, round(2*pi*radius)); an explicit count
// needs at least 2 points. Radius must be >= 1.
CirclePattern circle_pattern(double radius, int count = 0);

// Normalized circle weights at position (x, y). Each sample's numerator is
// the cosine (radial), sine (tangential) or self-alignment (self) of its
// orientation against the reference direction; weights are the signed
// numerators divided by the sum of their absolute values, so each weight
// lies in [-1, 1] and their magnitudes sum to 1. A zero-magnitude sample
// anywhere on the circle leaves the projections undefined and throws
// DegenerateWeights; so does an absolute-value sum below eps, or a signed
// sum whose magnitude falls below eps — the symmetric-cancellation case of
// a locally parallel field, where the family carries no orientation signal.
// self_weights additionally throws ZeroAnchor when the centre value has
// magnitude 0.
std::vector<double> radial_weights(const OrientationField& field, double x, double y,
                                   const CirclePattern& pattern, double eps = 1e-6);
std::vector<double> tangential_weights(const OrientationField& field, double x, double y,
                                       const CirclePattern& pattern, double eps = 1e-6);
std::vector<double> self_weights(const OrientationField& field, double x, double y,
                                 const CirclePattern& pattern, double eps = 1e-6);

enum class DriftMode { Tangent, Normal };

// Single-pixel operator evaluations. Degenerate weights make the adjuster
// and smoother return the input pixel, and the drifter return 0; no errors
// surface from these.
cplx adjust_at(const OrientationField& field, int x, int y, const CirclePattern& pattern,
               double strength, double eps = 1e-6);
cplx smooth_at(const OrientationField& field, int x, int y, const CirclePattern& pattern,
               double strength, double eps = 1e-6);
cplx drift_at(const OrientationField& field, int x, int y, const CirclePattern& pattern,
              DriftMode mode, double eps = 1e-6);

// Pulls every pixel toward the radially sign-aligned circle average; blending
// happens on squared values, and the output keeps at least the input
// magnitude. strength is either one scalar in (0, 1) or a per-pixel map
// with values in [0, 1].
OrientationField adjuster(const OrientationField& field, const CirclePattern& pattern,
                          double strength, double eps = 1e-6);
OrientationField adjuster(const OrientationField& field, const CirclePattern& pattern,
                          const StrengthMap& strength, double eps = 1e-6);

// Same combination rule with the circle samples sign-aligned to the centre
// value instead; the workhorse of iterative smoothing.
OrientationField smoother(const OrientationField& field, const CirclePattern& pattern,
                          double strength, double eps = 1e-6);

// Raw weighted circle sums (no sign alignment, no renormalization); the
// result is a plain complex raster whose magnitude peaks on loop cores.
OrientationField drifter(const OrientationField& field, const CirclePattern& pattern,
                         DriftMode mode, double eps = 1e-6);

// Drift magnitude of the field minus drift magnitude of its conjugate,
// halved: positive on loops, negative on deltas, near zero elsewhere.
RealMap loop_delta_response(const OrientationField& field, const CirclePattern& pattern,
                            double eps = 1e-6);

// Angular distance of two orientation values, measured between their doubled
// representatives and halved back; immune to the 0/pi wrap.
inline double doubled_distance(cplx a, cplx b) {
    return std::abs(double_value(a) - double_value(b)) / 2.0;
}

// Every intermediate the refinement produces, for inspection and tests.
struct RefineTrace {
    int radius_coarse = 0;  // derivative-bank size of the wide estimate
    int radius_fine = 0;    // derivative-bank size of the narrow estimate
    OrientationField field_coarse;
    OrientationField field_fine;
    OrientationField field_adjusted;  // adjusted smoothed coarse field; smoothing seed
    StrengthMap adjust_strength;      // blurred delta-free mask scaled by the relaxation
    RealMap singular_response;        // blurred loop/delta response of field_adjusted
    BinaryMask mask_delta_free;
    BinaryMask mask_unstable;
    BinaryMask mask_singular;
    BinaryMask mask_smooth_seed;
    int iterations = 0;
    bool iteration_cap_hit = false;
};

// Runs the mask construction stage: re-estimates the field at radii derived
// from the ridge period, applies smoother/adjuster/drifter responses, and
// derives the delta-free, unstable, singular and smoothing-seed masks.
// `field` is the first-stage estimate and is only validated here: if its
// magnitude is zero on more than 99% of the foreground, DegenerateField.
// Throws EmptyForeground on an empty foreground mask.
RefineTrace build_refinement_masks(const GrayImage& image, const OrientationField& field,
                                   const BinaryMask& foreground, double period_px,
                                   const PipelineParams& params);

struct SmoothResult {
    OrientationField field;
    int iterations = 0;
    bool iteration_cap_hit = false;
};

// Repeated guarded smoothing: each pass smooths, keeps only still-changing
// pixels of the eroded mask (within the foreground), dilates by less than
// the erosion, and blends with a blurred weight map. The mask strictly
// shrinks, so the loop always terminates; the cap flag reports a stop forced
// by params.iteration_cap. Runs at least one pass; an empty seed mask leaves
// the field bit-identical.
SmoothResult iterative_smoothing(const OrientationField& seed, const BinaryMask& seed_mask,
                                 const BinaryMask& foreground, const CirclePattern& pattern,
                                 const PipelineParams& params);

struct RefineResult {
    OrientationField field;
    RefineTrace trace;
};

// Full refinement: mask construction followed by iterative smoothing seeded
// with the smoothing-seed mask. The first overload estimates the first-stage
// field itself; the second accepts it precomputed.
RefineResult refine(const GrayImage& image, const BinaryMask& foreground, double period_px,
                    const PipelineParams& params);
RefineResult refine(const GrayImage& image, const OrientationField& field,
                    const BinaryMask& foreground, double period_px, const PipelineParams& params);

}  // namespace fp
