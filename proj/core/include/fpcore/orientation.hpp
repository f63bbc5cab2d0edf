#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fpcore/raster.hpp"

namespace fp {

using cplx = std::complex<double>;

// Ridge orientations live on the half-turn circle: a pixel holds a complex
// number whose phase in [0, pi) is the orientation (measured from the +x axis
// toward +y, y pointing down the raster) and whose magnitude is the
// reliability of that orientation. The canonical representative has im > 0,
// or im == 0 with re >= 0.
struct OrientationField {
    int width = 0;
    int height = 0;
    std::vector<cplx> data;

    OrientationField() = default;
    OrientationField(int w, int h) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw InvalidParameter("OrientationField dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h, cplx(0.0, 0.0));
    }

    cplx& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    cplx at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return data.size(); }
};

// Flips z to the canonical half-turn representative.
inline cplx canonical_value(cplx z) {
    if (z.imag() < 0.0 || (z.imag() == 0.0 && z.real() < 0.0)) return -z;
    return z;
}

// Angle doubling z -> z^2/|z|: phases add onto the full circle, magnitude is
// preserved. Zero stays zero.
inline cplx double_value(cplx z) {
    const double m = std::abs(z);
    if (m == 0.0) return cplx(0.0, 0.0);
    return z * z / m;
}

// Inverse of double_value up to the half-turn identification: principal
// square root rescaled to keep the magnitude, then canonicalized.
inline cplx halve_value(cplx z) {
    const double m = std::abs(z);
    if (m == 0.0) return cplx(0.0, 0.0);
    const cplx r = std::sqrt(z);
    return canonical_value(r * std::sqrt(m));
}

inline double phase_of(cplx z) {
    const cplx c = canonical_value(z);
    double a = std::arg(c);
    if (a < 0.0) a += 3.141592653589793238462643383279502884;  // im == -0.0 guard
    return a;
}

OrientationField double_field(const OrientationField& field);
OrientationField halve_field(const OrientationField& field);

// Gaussian smoothing of the doubled components; wrap-safe across the 0/pi
// boundary.
OrientationField smooth_field(const OrientationField& field, double sigma);

// Scales magnitudes so the maximum becomes 1; an all-zero field is returned
// unchanged.
OrientationField normalize_field(const OrientationField& field);

// Bilinear interpolation at a real position, performed on the doubled values
// so antipodal phases cannot cancel. Positions outside the raster contribute
// zero magnitude.
cplx sample_field(const OrientationField& field, double x, double y);

// Oriented derivative kernels: a tabulated base kernel and its rotations over
// n_angles equally spaced grid angles in [0, pi). kernels[k] responds most
// strongly to intensity changes along grid angle k*pi/n_angles; phases[k] is
// the ridge orientation assigned to that response.
struct FilterBank {
    int size = 0;  // kernels are size x size
    std::vector<Kernel> kernels;
    std::vector<double> phases;
};

// Builds the derivative filter bank. size is forced up to the next odd value;
// the base kernel is d(s)*exp(-|d(s)/sigma1|^(2*alpha1))*exp(-|d(t)/sigma2|^(2*alpha2))
// tabulated around the central cell, rotations are bilinear resamplings of
// that table (zero outside it). Every kernel sums to zero.
FilterBank build_filter_bank(int size, double sigma1, double alpha1, double sigma2, double alpha2,
                             int n_angles);

// Response-weighted orientation estimate. Each kernel's absolute response is
// blurred with response_sigma (default size/3 when <= 0) to form a weight
// map; weights average the per-kernel orientations on the doubled circle.
// strict_single_angle instead averages the single-angle representatives
// directly, for comparison; it is wrap-sensitive and off by default.
OrientationField estimate_orientation_raw(const GrayImage& image, const FilterBank& bank,
                                          double response_sigma = -1.0,
                                          bool strict_single_angle = false);

// estimate_orientation_raw followed by doubled-space smoothing with
// smooth_sigma and magnitude normalization.
OrientationField estimate_orientation(const GrayImage& image, const FilterBank& bank,
                                      double smooth_sigma, double response_sigma = -1.0,
                                      bool strict_single_angle = false);

// Per-pixel conjugation (phase t -> pi - t), canonicalized.
OrientationField conjugate_field(const OrientationField& field);

}  // namespace fp
