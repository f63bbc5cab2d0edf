#pragma once

#include <vector>

#include "fpcore/raster.hpp"

namespace fp {

enum class Border {
    Clamp,  // out-of-range coordinates are clamped to the nearest edge pixel
    Zero,   // out-of-range reads contribute zero
};

enum class Rank { Min, Median, Max };

enum class MorphOp { Dilate, Erode };

// Neighborhood handling for binary morphology. Clip ignores off-raster cells
// in both the dilation OR and the erosion AND, which keeps the
// erode(M) == !dilate(!M) duality exact. ZeroPad makes erosion treat
// off-raster cells as false, so any nonempty mask strictly shrinks; dilation
// is identical under both conventions.
enum class MorphBorder { Clip, ZeroPad };

// Correlation-style 2-D convolution anchored at the kernel centre.
// Throws DimensionMismatch if the kernel is larger than the map.
RealMap convolve2d(const RealMap& map, const Kernel& kernel, Border border = Border::Clamp);

// Separable Gaussian blur, kernel truncated at radius ceil(3*sigma) and
// normalized to unit sum per axis.
RealMap gaussian_blur(const RealMap& map, double sigma, Border border = Border::Clamp);

// The 1-D weights gaussian_blur uses, exposed for tabulation elsewhere.
std::vector<double> gaussian_kernel1d(double sigma);

// Order statistic over the circular neighborhood dx*dx + dy*dy <= radius^2,
// clipped to the raster. With n pixels gathered, Min selects the smallest,
// Max the largest and Median the element at index n/2 of the sorted values.
GrayImage rank_filter(const GrayImage& image, int radius, Rank rank);

BinaryMask morphology(const BinaryMask& mask, MorphOp op, int radius,
                      MorphBorder border = MorphBorder::Clip);

// Connected-component labelling. Foreground uses 8-connectivity. Labels are
// assigned in raster-scan order starting at 1; label 0 is background.
struct ComponentLabels {
    std::vector<int> labels;          // row-major, same layout as the mask
    std::vector<std::size_t> areas;   // areas[k] = pixel count of label k+1
};
ComponentLabels label_components(const BinaryMask& mask);

// Drops foreground components with fewer than min_area pixels.
BinaryMask filter_min_area(const BinaryMask& mask, std::size_t min_area);

// Keeps the n largest foreground components; ties resolved toward the
// component first encountered in raster-scan order.
BinaryMask keep_largest(const BinaryMask& mask, int n);

// Fills background regions (4-connected) that do not touch the raster border.
BinaryMask fill_holes(const BinaryMask& mask);

// Rasterization of the planar convex hull of all true pixel centres; a pixel
// is set when its centre lies inside or on the hull polygon.
BinaryMask convex_hull(const BinaryMask& mask);

// Affine map sending the current min to out_lo and max to out_hi. A constant
// map collapses to out_lo everywhere.
RealMap rescale_linear(const RealMap& map, double out_lo, double out_hi);

inline BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a.width, a.height, b.width, b.height, "mask_and");
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        out.data[i] = (a.data[i] && b.data[i]) ? 255 : 0;
    return out;
}

inline BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    require_same_size(a.width, a.height, b.width, b.height, "mask_or");
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        out.data[i] = (a.data[i] || b.data[i]) ? 255 : 0;
    return out;
}

inline BinaryMask mask_not(const BinaryMask& a) {
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] ? 0 : 255;
    return out;
}

}  // namespace fp
