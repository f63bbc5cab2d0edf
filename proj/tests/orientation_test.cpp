#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fpcore/errors.hpp"
#include "fpcore/imgproc.hpp"
#include "fpcore/orientation.hpp"
#include "support/oracles.hpp"

namespace {

constexpr double kPi = oracle::kPi;
constexpr double kDeg = kPi / 180.0;

bool is_canonical(fp::cplx z) {
    return z.imag() > 0.0 || (z.imag() == 0.0 && z.real() >= 0.0) || std::abs(z) == 0.0;
}

double mean_angular_error_deg(const fp::OrientationField& field, double phase,
                              double central_frac) {
    const int mx = static_cast<int>(field.width * (1.0 - central_frac) / 2.0);
    const int my = static_cast<int>(field.height * (1.0 - central_frac) / 2.0);
    double sum = 0.0;
    std::size_t n = 0;
    const fp::cplx ref(std::cos(phase), std::sin(phase));
    for (int y = my; y < field.height - my; ++y)
        for (int x = mx; x < field.width - mx; ++x) {
            sum += oracle::angular_diff(field.at(x, y), ref);
            ++n;
        }
    REQUIRE(n > 0);
    return sum / n / kDeg;
}

}  // namespace

TEST_SUITE("orientation") {

TEST_CASE("filter bank: reference parameters give 36 kernels of size 15") {
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    CHECK(bank.size == 15);
    CHECK(bank.kernels.size() == 36);
    CHECK(bank.phases.size() == 36);
    for (const fp::Kernel& k : bank.kernels) {
        CHECK(k.width == 15);
        CHECK(k.height == 15);
    }
    for (const double phi : bank.phases) {
        CHECK(phi >= 0.0);
        CHECK(phi < kPi);
    }
}

TEST_CASE("filter bank: every kernel sums to zero") {
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    for (const fp::Kernel& k : bank.kernels) {
        double sum = 0.0;
        for (const double w : k.weights) sum += w;
        CHECK(std::abs(sum) < 1e-9);
    }
}

TEST_CASE("filter bank: quarter-turn kernel is the transpose of the base kernel") {
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    const fp::Kernel& base = bank.kernels[0];
    const fp::Kernel& quarter = bank.kernels[18];  // 18 * pi/36 = pi/2
    for (int y = 0; y < 15; ++y)
        for (int x = 0; x < 15; ++x)
            CHECK(std::abs(quarter.at(x, y) - base.at(y, x)) < 1e-6);
}

TEST_CASE("filter bank: parameter validation and even-size round-up") {
    CHECK_THROWS_AS((void)fp::build_filter_bank(15, 0.0, 2.0, 0.85, 2.0, 8), fp::InvalidParameter);
    CHECK_THROWS_AS((void)fp::build_filter_bank(15, 1.0, 2.0, -1.0, 2.0, 8), fp::InvalidParameter);
    const fp::FilterBank bank = fp::build_filter_bank(14, 1.0, 2.0, 0.85, 2.0, 8);
    CHECK(bank.size == 15);
}

TEST_CASE("doubled algebra: phase 0 is a fixed point, 170 degrees round-trips") {
    const fp::cplx zero_phase(0.7, 0.0);
    const fp::cplx doubled0 = fp::double_value(zero_phase);
    CHECK(fp::phase_of(doubled0) == 0.0);
    CHECK(std::abs(doubled0) == doctest::Approx(0.7).epsilon(1e-12));
    const fp::cplx halved0 = fp::halve_value(fp::cplx(0.7, 0.0));
    CHECK(fp::phase_of(halved0) == 0.0);
    CHECK(std::abs(halved0) == doctest::Approx(0.7).epsilon(1e-12));

    const double phi = 170.0 * kDeg;
    const fp::cplx v = 0.5 * fp::cplx(std::cos(phi), std::sin(phi));
    const fp::cplx doubled = fp::double_value(v);
    CHECK(std::abs(doubled) == doctest::Approx(0.5).epsilon(1e-12));
    double arg = std::arg(doubled);
    if (arg < 0.0) arg += 2.0 * kPi;
    CHECK(arg == doctest::Approx(340.0 * kDeg).epsilon(1e-9));
    const fp::cplx back = fp::halve_value(doubled);
    CHECK(fp::phase_of(back) == doctest::Approx(170.0 * kDeg).epsilon(1e-9));
    CHECK(std::abs(back) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("doubled algebra: halve(double(z)) is the identity on canonical values") {
    auto rng = oracle::rng(7);
    const fp::OrientationField f = oracle::random_field(16, 16, rng, 0.0, 2.0);
    const fp::OrientationField round = fp::halve_field(fp::double_field(f));
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        CHECK(std::abs(round.data[i].real() - f.data[i].real()) < 1e-12);
        CHECK(std::abs(round.data[i].imag() - f.data[i].imag()) < 1e-12);
    }
}

TEST_CASE("smooth_field: uniform field is unchanged") {
    const fp::OrientationField f = oracle::uniform_field(20, 14, 0.9, 0.8);
    const fp::OrientationField out = fp::smooth_field(f, 2.0);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        CHECK(std::abs(out.data[i] - f.data[i]) < 1e-9);
}

TEST_CASE("smooth_field: wrap-correct averaging of 1 and 179 degree phases") {
    fp::OrientationField f(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            const double phi = ((x + y) % 2 == 0) ? 1.0 * kDeg : 179.0 * kDeg;
            f.at(x, y) = fp::cplx(std::cos(phi), std::sin(phi));
        }
    const fp::OrientationField out = fp::smooth_field(f, 2.0);
    for (int y = 4; y < 12; ++y)
        for (int x = 4; x < 12; ++x) {
            const double phi = fp::phase_of(out.at(x, y)) / kDeg;
            const double to_boundary = std::min(phi, 180.0 - phi);
            CHECK(to_boundary < 10.0);    // stays near the 0/180 boundary
            CHECK(std::abs(phi - 90.0) > 45.0);  // far from the naive average
        }
}

TEST_CASE("smooth_field: matches the direct doubled-space convolution oracle") {
    auto rng = oracle::rng(13);
    const fp::OrientationField f = oracle::random_field(24, 24, rng);
    const double sigma = 1.5;
    const fp::OrientationField got = fp::smooth_field(f, sigma);

    // Independent tabulation: full 2-D Gaussian on the doubled components.
    const int reach = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * reach + 1);
    double sum = 0.0;
    for (int t = -reach; t <= reach; ++t) {
        taps[t + reach] = std::exp(-0.5 * t * t / (sigma * sigma));
        sum += taps[t + reach];
    }
    for (double& v : taps) v /= sum;
    fp::Kernel k2(2 * reach + 1, 2 * reach + 1);
    for (int y = 0; y <= 2 * reach; ++y)
        for (int x = 0; x <= 2 * reach; ++x) k2.at(x, y) = taps[x] * taps[y];

    fp::RealMap re(24, 24), im(24, 24);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        const fp::cplx d = oracle::double_angle(f.data[i]);
        re.data[i] = d.real();
        im.data[i] = d.imag();
    }
    const fp::RealMap bre = oracle::convolve(re, k2, fp::Border::Clamp);
    const fp::RealMap bim = oracle::convolve(im, k2, fp::Border::Clamp);

    // Separable-with-clamp equals the full 2-D pass away from the borders.
    for (int y = reach; y < 24 - reach; ++y)
        for (int x = reach; x < 24 - reach; ++x) {
            const fp::cplx want = oracle::halve_angle(fp::cplx(bre.at(x, y), bim.at(x, y)));
            CHECK(std::abs(got.at(x, y) - want) < 1e-9);
        }
}

TEST_CASE("smooth_field: non-positive sigma is rejected") {
    const fp::OrientationField f = oracle::uniform_field(8, 8, 0.3);
    CHECK_THROWS_AS((void)fp::smooth_field(f, 0.0), fp::InvalidParameter);
}

TEST_CASE("normalize_field: zero field unchanged, magnitudes scaled to peak 1") {
    fp::OrientationField zero(6, 6);
    const fp::OrientationField still = fp::normalize_field(zero);
    for (const fp::cplx& z : still.data) CHECK(std::abs(z) == 0.0);

    fp::OrientationField f(4, 4);
    const double phi = 1.1;
    for (fp::cplx& z : f.data) z = 2.0 * fp::cplx(std::cos(phi), std::sin(phi));
    f.at(2, 2) = 4.0 * fp::cplx(std::cos(phi), std::sin(phi));
    const fp::OrientationField out = fp::normalize_field(f);
    CHECK(std::abs(out.at(2, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(out.at(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));

    auto rng = oracle::rng(17);
    const fp::OrientationField r = fp::normalize_field(oracle::random_field(12, 12, rng));
    double peak = 0.0;
    for (const fp::cplx& z : r.data) peak = std::max(peak, std::abs(z));
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample_field: integer positions, outside reads, and oracle equality") {
    auto rng = oracle::rng(19);
    const fp::OrientationField f = oracle::random_field(10, 10, rng);
    CHECK(std::abs(fp::sample_field(f, 3.0, 4.0) - f.at(3, 4)) < 1e-12);
    CHECK(std::abs(fp::sample_field(f, -5.0, 4.0)) == 0.0);
    CHECK(std::abs(fp::sample_field(f, 3.0, 100.0)) == 0.0);

    std::uniform_real_distribution<double> pos(-2.0, 11.0);
    for (int i = 0; i < 200; ++i) {
        const double x = pos(rng), y = pos(rng);
        CHECK(std::abs(fp::sample_field(f, x, y) - oracle::sample_field(f, x, y)) < 1e-12);
    }
}

TEST_CASE("sample_field: interpolation happens in doubled space") {
    fp::OrientationField f(4, 1);
    const double a = 1.0 * kDeg, b = 179.0 * kDeg;
    f.at(0, 0) = fp::cplx(std::cos(a), std::sin(a));
    f.at(1, 0) = fp::cplx(std::cos(b), std::sin(b));
    const double phi = fp::phase_of(fp::sample_field(f, 0.5, 0.0)) / kDeg;
    CHECK(std::min(phi, 180.0 - phi) < 5.0);
}

TEST_CASE("estimate_orientation: constant image yields zero magnitude everywhere") {
    fp::GrayImage img(32, 32);
    std::fill(img.data.begin(), img.data.end(), std::uint8_t{140});
    const fp::FilterBank bank = fp::build_filter_bank(9, 1.0, 2.0, 0.85, 2.0, 8);
    const fp::OrientationField out = fp::estimate_orientation(img, bank, 3.0);
    for (const fp::cplx& z : out.data) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("estimate_orientation: 30-degree sinusoid recovered within 2 degrees") {
    const fp::GrayImage img = oracle::sinusoid(128, 128, 30.0 * kDeg, 8.0);
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    const fp::OrientationField out = fp::estimate_orientation(img, bank, 5.0);
    CHECK(mean_angular_error_deg(out, 30.0 * kDeg, 0.8) < 2.0);
}

TEST_CASE("estimate_orientation: vertical ridges estimated at a quarter turn") {
    const fp::GrayImage img = oracle::sinusoid(128, 128, 90.0 * kDeg, 8.0);
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    const fp::OrientationField out = fp::estimate_orientation(img, bank, 5.0);
    CHECK(mean_angular_error_deg(out, 90.0 * kDeg, 0.8) < 2.0);
}

TEST_CASE("estimate_orientation: intensity inversion flips nothing") {
    const fp::GrayImage img = oracle::sinusoid(96, 96, 55.0 * kDeg, 8.0);
    fp::GrayImage inv(96, 96);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        inv.data[i] = static_cast<std::uint8_t>(255 - img.data[i]);
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    const fp::OrientationField a = fp::estimate_orientation(img, bank, 5.0);
    const fp::OrientationField b = fp::estimate_orientation(inv, bank, 5.0);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        CHECK(std::abs(std::abs(a.data[i]) - std::abs(b.data[i])) < 1e-6);
        if (std::abs(a.data[i]) > 0.05) CHECK(oracle::angular_diff(a.data[i], b.data[i]) < 1e-6);
    }
}

TEST_CASE("estimate_orientation: a 10-degree pattern rotation shifts the estimate by 10") {
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    const fp::OrientationField a =
        fp::estimate_orientation(oracle::sinusoid(128, 128, 30.0 * kDeg, 8.0), bank, 5.0);
    const fp::OrientationField b =
        fp::estimate_orientation(oracle::sinusoid(128, 128, 40.0 * kDeg, 8.0), bank, 5.0);
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 24; y < 104; ++y)
        for (int x = 24; x < 104; ++x) {
            sum += oracle::angular_diff(a.at(x, y), b.at(x, y));
            ++n;
        }
    CHECK(std::abs(sum / n / kDeg - 10.0) < 2.0);
}

TEST_CASE("estimate_orientation_raw: equals the response-weighted accumulation oracle") {
    const fp::GrayImage img = [] {
        auto rng = oracle::rng(23);
        std::uniform_int_distribution<int> uni(0, 255);
        fp::GrayImage out(40, 40);
        for (auto& v : out.data) v = static_cast<std::uint8_t>(uni(rng));
        return out;
    }();
    const fp::FilterBank bank = fp::build_filter_bank(9, 1.0, 2.0, 0.85, 2.0, 8);
    const double response_sigma = 3.0;
    const fp::OrientationField raw = fp::estimate_orientation_raw(img, bank, response_sigma);

    // Oracle: blurred absolute responses weight the doubled phase directions.
    const fp::RealMap real_img = fp::to_real(img);
    const int n = 2 * static_cast<int>(std::ceil(3.0 * response_sigma)) + 1;
    std::vector<double> taps(n);
    double tap_sum = 0.0;
    for (int t = 0; t < n; ++t) {
        const double d = t - (n - 1) / 2;
        taps[t] = std::exp(-0.5 * d * d / (response_sigma * response_sigma));
        tap_sum += taps[t];
    }
    for (double& v : taps) v /= tap_sum;
    fp::Kernel blur2(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) blur2.at(x, y) = taps[x] * taps[y];

    std::vector<fp::RealMap> weights;
    for (const fp::Kernel& k : bank.kernels) {
        fp::RealMap resp = oracle::convolve(real_img, k, fp::Border::Clamp);
        for (double& v : resp.data) v = std::abs(v);
        weights.push_back(oracle::convolve(resp, blur2, fp::Border::Clamp));
    }

    const int margin = (n - 1) / 2;  // the clamp-border band of the blur
    for (int y = margin; y < 40 - margin; ++y)
        for (int x = margin; x < 40 - margin; ++x) {
            fp::cplx num(0.0, 0.0);
            double den = 0.0;
            for (std::size_t k = 0; k < bank.kernels.size(); ++k) {
                const double w = weights[k].at(x, y);
                const double phi = bank.phases[k];
                num += w * fp::cplx(std::cos(2.0 * phi), std::sin(2.0 * phi));
                den += w;
            }
            REQUIRE(den > 0.0);
            const fp::cplx want = num / den;
            CHECK(std::abs(fp::double_value(raw.at(x, y)) - want) < 1e-9);
        }
}

TEST_CASE("canonical storage holds after every public operation") {
    const fp::GrayImage img = oracle::sinusoid(64, 64, 72.0 * kDeg, 8.0);
    const fp::FilterBank bank = fp::build_filter_bank(9, 1.0, 2.0, 0.85, 2.0, 12);
    const fp::OrientationField est = fp::estimate_orientation(img, bank, 3.0);
    for (const fp::cplx& z : est.data) CHECK(is_canonical(z));

    auto rng = oracle::rng(29);
    const fp::OrientationField f = oracle::random_field(16, 16, rng);
    for (const fp::cplx& z : fp::smooth_field(f, 1.0).data) CHECK(is_canonical(z));
    for (const fp::cplx& z : fp::halve_field(fp::double_field(f)).data) CHECK(is_canonical(z));
    for (const fp::cplx& z : fp::normalize_field(f).data) CHECK(is_canonical(z));
    for (const fp::cplx& z : fp::conjugate_field(f).data) CHECK(is_canonical(z));
}

TEST_CASE("conjugate_field: reflects phases and is an involution") {
    auto rng = oracle::rng(31);
    const fp::OrientationField f = oracle::random_field(12, 12, rng);
    const fp::OrientationField c = fp::conjugate_field(f);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        const double want = std::fmod(kPi - fp::phase_of(f.data[i]), kPi);
        CHECK(std::abs(fp::phase_of(c.data[i]) - want) < 1e-9);
    }
    const fp::OrientationField back = fp::conjugate_field(c);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        CHECK(std::abs(back.data[i] - f.data[i]) < 1e-12);
}

}  // TEST_SUITE("orientation")
