#pragma once

#include <cstdint>
#include <vector>

#include "fpcore/orientation.hpp"

namespace fp {

// Singular point of a synthetic orientation field. Loops add a half turn of
// orientation around the point, deltas remove one.
struct Singularity {
    enum class Type { Loop, Delta };
    Type type = Type::Loop;
    double x = 0.0;
    double y = 0.0;
};

// Closed-form field: the doubled phase at z is 2*base_angle plus the sum of
// arg(z - loop) minus the sum of arg(z - delta). Magnitude is 1 except at the
// pixel containing each singularity, which is zero.
OrientationField synth_field(int width, int height, const std::vector<Singularity>& singularities,
                             double base_angle = 0.0);

// Ridge pattern matching the field: seeded noise repeatedly filtered with an
// oriented band-pass tuned to the local orientation and the given period.
// Deterministic for a given seed.
GrayImage render_ridges(const OrientationField& field, double period, std::uint32_t seed,
                        int iterations = 6);

// Replaces phases inside the disk with uniform random draws from [0, pi),
// keeping magnitudes. Deterministic for a given seed.
OrientationField corrupt_region(const OrientationField& field, double cx, double cy, double radius,
                                std::uint32_t seed);

struct ErrorStats {
    double mean_deg = 0.0;
    double rmse_deg = 0.0;
    double max_deg = 0.0;
    std::size_t pixels = 0;
};

// Angular distance statistics over mask-true pixels where both fields have
// nonzero magnitude; per-pixel error is min(|d|, pi - |d|) in degrees.
// Throws EmptyMask when no pixel qualifies.
ErrorStats angular_error(const OrientationField& a, const OrientationField& b,
                         const BinaryMask& mask);

}  // namespace fp
