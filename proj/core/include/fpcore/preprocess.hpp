#pragma once

#include "fpcore/imgproc.hpp"
#include "fpcore/params.hpp"
#include "fpcore/raster.hpp"

namespace fp {

struct EqualizeResult {
    GrayImage image;
    // Split point between the two dominant intensity populations, expressed
    // in the stretched full-range domain; the piecewise map sends it to 128.
    int threshold = 128;
};

// Bimodal contrast normalization: stretches to full range, finds the valley
// between the two dominant histogram modes, and maps the halves to [0,128]
// and [128,255] with the tails clipped.
EqualizeResult equalize(const GrayImage& image, const PipelineParams& params);

// Tall differencing kernel used to locate near-horizontal card edges; width
// scales with the image and is rounded up to odd.
Kernel make_oblique_kernel(int image_width);

struct BorderLine {
    bool applied = false;
    double slope = 0.0;      // rows per column (columns per row for side lines)
    double intercept = 0.0;  // row at column 0 (column at row 0 for side lines)
};

struct BorderResult {
    BinaryMask mask;  // true inside the usable area
    BorderLine top, bottom, left, right;
};

// Detects straight scanner-bed or card edges near each side and masks the
// pixels beyond them. Sides whose outer lines show no variation are left
// open; candidate lines are kept only when enough columns participate and
// the fit is tight, so ridge texture never gets cut.
BorderResult remove_border(const GrayImage& image, const PipelineParams& params);

// Foreground segmentation combining a darkness map with an edge-density map,
// cleaned up morphologically and closed with a convex hull.
// Throws EmptyForeground when nothing survives.
BinaryMask segment(const GrayImage& equalized, const BinaryMask& border_mask,
                   const PipelineParams& params);

// Local min/max contrast amplification restricted to the foreground;
// background pixels come out white.
GrayImage amplify_ridges(const GrayImage& equalized, const BinaryMask& mask,
                         const PipelineParams& params);

}  // namespace fp
