#pragma once

#include <string>

#include "fpcore/params.hpp"
#include "fpcore/period.hpp"
#include "fpcore/preprocess.hpp"
#include "fpcore/refine.hpp"
#include "fpcore/synth.hpp"

namespace fp {

// Wall-clock stage durations in milliseconds; all non-negative.
struct StageTimings {
    double preprocess_ms = 0.0;
    double orientation_ms = 0.0;
    double period_ms = 0.0;
    double refine_ms = 0.0;
    double total_ms = 0.0;
};

// Every intermediate artifact of the two-stage pipeline, in production order.
struct PipelineResult {
    EqualizeResult equalized;
    BorderResult border;
    BinaryMask foreground;
    GrayImage amplified;
    OrientationField orientation;  // first-stage estimate on the amplified image
    PeriodEstimate period;
    RefineResult refined;
    StageTimings timings;
};

// equalize -> remove_border -> segment -> amplify_ridges, then orientation
// estimation, ridge-period estimation and refinement on the amplified image.
// Propagates EmptyForeground and NoReliableSegments from the stages.
PipelineResult run_pipeline(const GrayImage& image, const PipelineParams& params);

// Composited overlay: the input image with one field-direction segment drawn
// per stride x stride cell, plus a constant fully-opaque alpha plane for the
// gray+alpha container.
struct OverlayImage {
    GrayImage gray;
    GrayImage alpha;
};

// Draws a segment of length stride*0.8 at the centre of each stride-grid
// cell; the segment's angle is the sampled field phase and its ink opacity
// is the sampled magnitude clamped to [0, 1]. Cells with zero magnitude
// leave their pixels bit-identical to the input. Stride must be >= 4.
OverlayImage render_overlay(const GrayImage& image, const OrientationField& field, int stride);

// key = value report; stats are appended when a ground-truth comparison was
// requested.
std::string report_text(const std::string& input_path, const PipelineResult& result,
                        const ErrorStats* stats = nullptr);

}  // namespace fp
