#include "fpcore/orientation.hpp"

#include <algorithm>

#include "fpcore/imgproc.hpp"

namespace fp {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

OrientationField double_field(const OrientationField& field) {
    OrientationField out(field.width, field.height);
    for (std::size_t i = 0; i < field.data.size(); ++i) out.data[i] = double_value(field.data[i]);
    return out;
}

OrientationField halve_field(const OrientationField& field) {
    OrientationField out(field.width, field.height);
    for (std::size_t i = 0; i < field.data.size(); ++i) out.data[i] = halve_value(field.data[i]);
    return out;
}

OrientationField smooth_field(const OrientationField& field, double sigma) {
    RealMap re(field.width, field.height), im(field.width, field.height);
    for (std::size_t i = 0; i < field.data.size(); ++i) {
        const cplx d = double_value(field.data[i]);
        re.data[i] = d.real();
        im.data[i] = d.imag();
    }
    re = gaussian_blur(re, sigma);
    im = gaussian_blur(im, sigma);
    OrientationField out(field.width, field.height);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = halve_value(cplx(re.data[i], im.data[i]));
    return out;
}

OrientationField normalize_field(const OrientationField& field) {
    double peak = 0.0;
    for (const cplx& z : field.data) peak = std::max(peak, std::abs(z));
    OrientationField out = field;
    if (peak == 0.0) return out;
    for (cplx& z : out.data) z /= peak;
    return out;
}

cplx sample_field(const OrientationField& field, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0, fy = y - y0;
    cplx acc(0.0, 0.0);
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
            if (w == 0.0) continue;
            const int sx = x0 + dx, sy = y0 + dy;
            if (!field.in_bounds(sx, sy)) continue;
            acc += w * double_value(field.at(sx, sy));
        }
    }
    return halve_value(acc);
}

FilterBank build_filter_bank(int size, double sigma1, double alpha1, double sigma2, double alpha2,
                             int n_angles) {
    if (size < 3) throw InvalidParameter("filter bank size must be >= 3");
    if (n_angles < 1) throw InvalidParameter("filter bank needs at least one angle");
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !(alpha1 > 0.0) || !(alpha2 > 0.0))
        throw InvalidParameter("filter bank shape parameters must be positive");
    if (size % 2 == 0) ++size;
    const int c = (size - 1) / 2;

    FilterBank bank;
    bank.size = size;
    bank.kernels.reserve(static_cast<std::size_t>(n_angles));
    bank.phases.reserve(static_cast<std::size_t>(n_angles));

    // Base table: derivative factor along rows, even taper along columns.
    Kernel base(size, size);
    for (int i = 0; i < size; ++i) {
        const double ds = i - c;
        const double row = ds * std::exp(-std::pow(std::abs(ds / sigma1), 2.0 * alpha1));
        for (int j = 0; j < size; ++j) {
            const double dt = j - c;
            base.at(j, i) = row * std::exp(-std::pow(std::abs(dt / sigma2), 2.0 * alpha2));
        }
    }

    auto base_lookup = [&](double s, double t) -> double {
        // Bilinear read of the table at centred coordinates, zero outside.
        const double gs = s + c, gt = t + c;
        const int i0 = static_cast<int>(std::floor(gs));
        const int j0 = static_cast<int>(std::floor(gt));
        const double fs = gs - i0, ft = gt - j0;
        double acc = 0.0;
        for (int di = 0; di <= 1; ++di) {
            const int i = i0 + di;
            if (i < 0 || i >= size) continue;
            for (int dj = 0; dj <= 1; ++dj) {
                const int j = j0 + dj;
                if (j < 0 || j >= size) continue;
                acc += (di ? fs : 1.0 - fs) * (dj ? ft : 1.0 - ft) * base.at(j, i);
            }
        }
        return acc;
    };

    for (int k = 0; k < n_angles; ++k) {
        const double theta = kPi * k / n_angles;
        Kernel kern(size, size);
        if (k == 0) {
            kern = base;
        } else {
            const double ct = std::cos(theta), st = std::sin(theta);
            for (int i = 0; i < size; ++i) {
                const double di = i - c;  // row offset
                for (int j = 0; j < size; ++j) {
                    const double dj = j - c;  // column offset
                    kern.at(j, i) = base_lookup(di * ct + dj * st, -di * st + dj * ct);
                }
            }
        }
        // The derivative factor cancels only to rounding error (and the
        // rotated resamplings only to interpolation error); remove the
        // residual mean so a flat image yields a genuinely zero response.
        double sum = 0.0;
        for (const double v : kern.weights) sum += v;
        const double shift = sum / static_cast<double>(kern.weights.size());
        for (double& v : kern.weights) v -= shift;
        bank.kernels.push_back(std::move(kern));
        // The k-th kernel differentiates along (drow, dcol) = (cos, sin)(theta);
        // ridges run orthogonal to that, at pi - theta in (x, y) phase terms.
        double phi = kPi - theta;
        if (phi >= kPi) phi -= kPi;
        bank.phases.push_back(phi);
    }
    return bank;
}

OrientationField estimate_orientation_raw(const GrayImage& image, const FilterBank& bank,
                                          double response_sigma, bool strict_single_angle) {
    if (bank.kernels.empty()) throw InvalidParameter("empty filter bank");
    if (response_sigma <= 0.0) response_sigma = bank.size / 3.0;
    const RealMap img = to_real(image);
    const int w = image.width, h = image.height;

    std::vector<cplx> num(static_cast<std::size_t>(w) * h, cplx(0.0, 0.0));
    std::vector<double> den(static_cast<std::size_t>(w) * h, 0.0);

    for (std::size_t k = 0; k < bank.kernels.size(); ++k) {
        RealMap resp = convolve2d(img, bank.kernels[k], Border::Clamp);
        for (double& v : resp.data) v = std::abs(v);
        const RealMap weight = gaussian_blur(resp, response_sigma);
        const double phi = bank.phases[k];
        const cplx dir = strict_single_angle ? cplx(std::cos(phi), std::sin(phi))
                                             : cplx(std::cos(2.0 * phi), std::sin(2.0 * phi));
        for (std::size_t i = 0; i < num.size(); ++i) {
            num[i] += weight.data[i] * dir;
            den[i] += weight.data[i];
        }
    }

    // Accumulated weight this small can only be rounding noise left over from
    // the zero-sum kernels (structured content produces weights orders of
    // magnitude above 1); treat it as "no response": magnitude 0, phase 0.
    constexpr double kResponseFloor = 1e-6;

    OrientationField out(w, h);
    for (std::size_t i = 0; i < num.size(); ++i) {
        if (den[i] <= kResponseFloor) continue;
        const cplx mean = num[i] / den[i];
        out.data[i] = strict_single_angle ? canonical_value(mean) : halve_value(mean);
    }
    return out;
}

OrientationField estimate_orientation(const GrayImage& image, const FilterBank& bank,
                                      double smooth_sigma, double response_sigma,
                                      bool strict_single_angle) {
    if (!(smooth_sigma > 0.0)) throw InvalidParameter("smooth_sigma must be positive");
    OrientationField field =
        estimate_orientation_raw(image, bank, response_sigma, strict_single_angle);
    field = smooth_field(field, smooth_sigma);
    return normalize_field(field);
}

OrientationField conjugate_field(const OrientationField& field) {
    OrientationField out(field.width, field.height);
    for (std::size_t i = 0; i < field.data.size(); ++i)
        out.data[i] = canonical_value(std::conj(field.data[i]));
    return out;
}

}  // namespace fp
