#pragma once

#include <vector>

#include "fpcore/orientation.hpp"
#include "fpcore/params.hpp"

namespace fp {

// Intensity and orientation values sampled along a straight segment.
struct Profile {
    std::vector<double> intensity;
    std::vector<cplx> orientation;
};

// Samples n points along a segment of the given length centered at (cx, cy),
// oriented orthogonally to the field's phase there. Throws OutOfBounds when
// any sample point leaves the raster.
Profile sample_profile(const OrientationField& field, const GrayImage& image, double cx, double cy,
                       double length, int n_samples);

struct SegmentEstimate {
    double x = 0.0;
    double y = 0.0;
    int frequency = 0;  // ridge count along the segment; 0 when discarded
    bool reliable = false;
};

struct PeriodEstimate {
    double frequency = 0.0;  // mean ridge count over reliable segments
    double period_px = 0.0;  // segment_length / frequency
    int reliable_count = 0;
    std::vector<SegmentEstimate> segments;
};

// Grid of profile segments over the image; each reliable segment contributes
// the dominant frequency of its smoothed, mean-free intensity profile.
// Throws NoReliableSegments when nothing qualifies.
PeriodEstimate estimate_period(const OrientationField& field, const GrayImage& image,
                               const PipelineParams& params);

}  // namespace fp
