#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpcore/errors.hpp"
#include "fpcore/imgproc.hpp"
#include "fpcore/orf_io.hpp"
#include "fpcore/params.hpp"
#include "fpcore/pipeline.hpp"
#include "fpcore/synth.hpp"
#include "support/fs_helpers.hpp"
#include "support/oracles.hpp"

namespace {

namespace fs = std::filesystem;

using testfs::TempDir;
using testfs::slurp;
using testfs::spit;

// Independent little-endian assembler for the expected serialized layout.
void push_u32le(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void push_f32le(std::string& out, float f) { push_u32le(out, std::bit_cast<std::uint32_t>(f)); }

std::string expected_field_bytes(const fp::OrientationField& field) {
    std::string out = "ORF1";
    push_u32le(out, static_cast<std::uint32_t>(field.width));
    push_u32le(out, static_cast<std::uint32_t>(field.height));
    for (const fp::cplx& z : field.data) {
        push_f32le(out, static_cast<float>(z.real()));
        push_f32le(out, static_cast<float>(z.imag()));
    }
    return out;
}

fp::GrayImage constant_image(int w, int h, std::uint8_t v) {
    fp::GrayImage img(w, h);
    for (auto& p : img.data) p = v;
    return img;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("field_io: serialized bytes match the documented layout") {
    TempDir dir;

    fp::OrientationField small(2, 1);
    small.at(0, 0) = fp::cplx(1.0, 0.5);
    small.at(1, 0) = fp::cplx(-0.25, 3.0);
    const std::string path = dir.file("small.orf");
    fp::write_field(small, path);

    const std::string bytes = slurp(path);
    CHECK(bytes == expected_field_bytes(small));
    CHECK(bytes.size() == 12 + 2 * 8);

    // Single pixel: 4-byte magic, two 4-byte dimensions, one (re, im) pair.
    fp::OrientationField one(1, 1);
    one.at(0, 0) = fp::cplx(1.0, 0.0);
    const std::string one_path = dir.file("one.orf");
    fp::write_field(one, one_path);
    CHECK(fs::file_size(one_path) == 20);

    // The write is atomic: no temp file remains next to the result.
    CHECK_FALSE(fs::exists(path + ".tmp"));
}

TEST_CASE("field_io: random 64x64 round trip is bit-identical") {
    TempDir dir;
    std::mt19937 rng(991);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);

    fp::OrientationField field(64, 64);
    for (auto& z : field.data) {
        // Quantize through the storage precision so equality can be exact.
        const float re = static_cast<float>(dist(rng));
        const float im = static_cast<float>(dist(rng));
        z = fp::cplx(re, im);
    }

    const std::string path = dir.file("round.orf");
    fp::write_field(field, path);
    const fp::OrientationField back = fp::read_field(path);

    REQUIRE(back.width == 64);
    REQUIRE(back.height == 64);
    for (std::size_t i = 0; i < field.data.size(); ++i) {
        CHECK(back.data[i].real() == field.data[i].real());
        CHECK(back.data[i].imag() == field.data[i].imag());
    }

    // Byte-compare oracle: re-serializing the read field reproduces the file.
    const std::string again = dir.file("round2.orf");
    fp::write_field(back, again);
    CHECK(slurp(again) == slurp(path));
}

TEST_CASE("field_io: malformed files are rejected with specific errors") {
    TempDir dir;

    fp::OrientationField field(3, 2);
    for (auto& z : field.data) z = fp::cplx(0.5, 0.25);
    const std::string good_path = dir.file("good.orf");
    fp::write_field(field, good_path);
    const std::string good = slurp(good_path);

    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)fp::read_field(dir.file("absent.orf")), fp::IoError);
    }
    SUBCASE("wrong magic") {
        std::string bad = good;
        bad[3] = '2';
        const std::string p = dir.file("magic.orf");
        spit(p, bad);
        CHECK_THROWS_AS((void)fp::read_field(p), fp::BadMagic);
    }
    SUBCASE("truncated header") {
        const std::string p = dir.file("hdr.orf");
        spit(p, good.substr(0, 10));
        CHECK_THROWS_AS((void)fp::read_field(p), fp::TruncatedFile);
    }
    SUBCASE("truncated payload") {
        const std::string p = dir.file("payload.orf");
        spit(p, good.substr(0, good.size() - 3));
        CHECK_THROWS_AS((void)fp::read_field(p), fp::TruncatedFile);
    }
    SUBCASE("zero dimension") {
        std::string bad = "ORF1";
        push_u32le(bad, 0);
        push_u32le(bad, 5);
        const std::string p = dir.file("zero.orf");
        spit(p, bad);
        CHECK_THROWS_AS((void)fp::read_field(p), fp::DimensionOverflow);
    }
    SUBCASE("absurd dimensions") {
        std::string bad = "ORF1";
        push_u32le(bad, 200000);
        push_u32le(bad, 200000);
        const std::string p = dir.file("huge.orf");
        spit(p, bad);
        CHECK_THROWS_AS((void)fp::read_field(p), fp::DimensionOverflow);
    }
}

TEST_CASE("render_overlay: zero-magnitude cells leave the image untouched") {
    std::mt19937 rng(7);
    fp::GrayImage img(40, 40);
    for (auto& p : img.data) p = static_cast<std::uint8_t>(rng() % 256);

    const fp::OrientationField zero(40, 40);  // all values default to 0
    const fp::OverlayImage overlay = fp::render_overlay(img, zero, 8);

    CHECK(overlay.gray.data == img.data);
    REQUIRE(overlay.alpha.width == 40);
    REQUIRE(overlay.alpha.height == 40);
    for (const auto a : overlay.alpha.data) CHECK(a == 255);
}

TEST_CASE("render_overlay: horizontal unit field paints one segment per cell") {
    const int w = 50, h = 42, stride = 8;
    const fp::GrayImage img = constant_image(w, h, 128);
    const fp::OrientationField field = oracle::uniform_field(w, h, 0.0);

    const fp::OverlayImage overlay = fp::render_overlay(img, field, stride);

    const int cells_x = w / stride;  // 6
    const int cells_y = h / stride;  // 5

    // Changed pixels sit only on the horizontal centre row of each cell, and
    // full magnitude means fully opaque ink.
    int runs = 0;
    int changed = 0;
    for (int y = 0; y < h; ++y) {
        bool prev = false;
        for (int x = 0; x < w; ++x) {
            const bool hit = overlay.gray.at(x, y) != 128;
            if (hit) {
                ++changed;
                CHECK(y % stride == stride / 2);
                CHECK(overlay.gray.at(x, y) == 0);
                if (!prev) ++runs;
            }
            prev = hit;
        }
    }
    CHECK(runs == cells_x * cells_y);
    // Sixteen percent of the stride is left blank on either side of each
    // segment, so neighbouring segments never merge: length 0.8*stride spans
    // seven pixels after rounding.
    CHECK(changed == cells_x * cells_y * 7);

    // Half magnitude blends half the ink: 128 -> 64 under black ink.
    fp::OrientationField faint = field;
    for (auto& z : faint.data) z *= 0.5;
    const fp::OverlayImage soft = fp::render_overlay(img, faint, stride);
    int soft_changed = 0;
    for (const auto p : soft.gray.data)
        if (p != 128) {
            ++soft_changed;
            CHECK(p == 64);
        }
    CHECK(soft_changed == changed);
}

TEST_CASE("render_overlay: validation") {
    const fp::GrayImage img = constant_image(16, 16, 200);
    const fp::OrientationField field = oracle::uniform_field(16, 16, 0.3);
    CHECK_THROWS_AS((void)fp::render_overlay(img, field, 3), fp::InvalidParameter);
    CHECK_NOTHROW((void)fp::render_overlay(img, field, 4));

    const fp::OrientationField small = oracle::uniform_field(8, 16, 0.3);
    CHECK_THROWS_AS((void)fp::render_overlay(img, small, 8), fp::DimensionMismatch);
}

TEST_CASE("params: text serialization round-trips exactly") {
    TempDir dir;

    const fp::PipelineParams defaults{};
    CHECK_NOTHROW(defaults.validate());
    const std::string text = fp::params_to_string(defaults);

    const std::string path = dir.file("defaults.cfg");
    fp::save_params(defaults, path);
    CHECK(slurp(path) == text);

    const fp::PipelineParams loaded = fp::load_params(path);
    CHECK(fp::params_to_string(loaded) == text);

    // Modified values survive the round trip, including ones that need full
    // double precision.
    fp::PipelineParams tweaked{};
    fp::set_param(tweaked, "filter_size", "17");
    fp::set_param(tweaked, "strength", "0.75");
    fp::set_param(tweaked, "epsilon_weight", "1e-09");
    fp::set_param(tweaked, "rho_adjust", "0.6789012345678901");
    const std::string tweaked_path = dir.file("tweaked.cfg");
    fp::save_params(tweaked, tweaked_path);
    const fp::PipelineParams back = fp::load_params(tweaked_path);
    CHECK(back.filter_size == 17);
    CHECK(back.strength == 0.75);
    CHECK(back.epsilon_weight == 1e-09);
    CHECK(back.rho_adjust == tweaked.rho_adjust);
    CHECK(fp::params_to_string(back) == fp::params_to_string(tweaked));
}

TEST_CASE("params: unknown keys and malformed values are rejected") {
    fp::PipelineParams p{};
    CHECK_THROWS_AS(fp::set_param(p, "no_such_knob", "1"), fp::InvalidParameter);
    CHECK_THROWS_AS(fp::set_param(p, "filter_size", "abc"), fp::InvalidParameter);
    CHECK_THROWS_AS(fp::set_param(p, "filter_size", "7.5"), fp::InvalidParameter);
    CHECK_THROWS_AS(fp::set_param(p, "strength", "0.5x"), fp::InvalidParameter);
    CHECK_THROWS_AS(fp::set_param(p, "strength", ""), fp::InvalidParameter);
}

TEST_CASE("params: config files parse comments and reject bad lines") {
    TempDir dir;

    SUBCASE("comments and blank lines are ignored") {
        const std::string p = dir.file("ok.cfg");
        spit(p,
             "# orientation sensor setup\n"
             "\n"
             "filter_size = 17   # odd\n"
             "  strength=0.25\n");
        const fp::PipelineParams loaded = fp::load_params(p);
        CHECK(loaded.filter_size == 17);
        CHECK(loaded.strength == 0.25);
        CHECK(loaded.n_angles == fp::PipelineParams{}.n_angles);
    }
    SUBCASE("missing separator") {
        const std::string p = dir.file("nosep.cfg");
        spit(p, "filter_size 17\n");
        CHECK_THROWS_AS((void)fp::load_params(p), fp::InvalidParameter);
    }
    SUBCASE("empty value") {
        const std::string p = dir.file("empty.cfg");
        spit(p, "filter_size =\n");
        CHECK_THROWS_AS((void)fp::load_params(p), fp::InvalidParameter);
    }
    SUBCASE("unknown key") {
        const std::string p = dir.file("unknown.cfg");
        spit(p, "filtre_size = 17\n");
        CHECK_THROWS_AS((void)fp::load_params(p), fp::InvalidParameter);
    }
    SUBCASE("loading validates the assembled set") {
        const std::string p = dir.file("invalid.cfg");
        spit(p, "iter_erode = 1\niter_dilate = 1\n");
        CHECK_THROWS_AS((void)fp::load_params(p), fp::InvalidParameter);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)fp::load_params(dir.file("absent.cfg")), fp::IoError);
    }
}

TEST_CASE("params: validation names the first violated constraint") {
    auto message_for = [](fp::PipelineParams p) {
        try {
            p.validate();
        } catch (const fp::InvalidParameter& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    fp::PipelineParams even{};
    even.filter_size = 4;
    CHECK(message_for(even).find("filter_size") != std::string::npos);

    fp::PipelineParams dead{};
    dead.strength = 0.0;
    CHECK(message_for(dead).find("strength") != std::string::npos);

    fp::PipelineParams wide{};
    wide.tau_delta = 1.5;
    CHECK(message_for(wide).find("tau_delta") != std::string::npos);
}

TEST_CASE("run_pipeline: blank page propagates the segmentation failure") {
    const fp::GrayImage white = constant_image(96, 96, 255);
    CHECK_THROWS_AS((void)fp::run_pipeline(white, fp::PipelineParams{}), fp::EmptyForeground);
}

TEST_CASE("run_pipeline: synthetic impression end to end, deterministic") {
    // Full-frame ridge wave: the bimodal equalizer expects the two dominant
    // intensity populations to be ridge ink and valley paper, which holds
    // when the texture fills the frame.
    const double theta = 0.6;
    const fp::GrayImage canvas = oracle::sinusoid(192, 192, theta, 8.0);
    const fp::PipelineParams params{};

    const fp::PipelineResult result = fp::run_pipeline(canvas, params);

    // Every artifact arrives at image size.
    CHECK(result.amplified.width == 192);
    CHECK(result.orientation.width == 192);
    CHECK(result.refined.field.height == 192);
    CHECK(result.foreground.width == 192);

    // The ridge texture dominates the foreground and carries the expected
    // spacing.
    CHECK(result.foreground.count() >= static_cast<std::size_t>(0.7 * 192 * 192));
    CHECK(result.period.period_px > 7.0);
    CHECK(result.period.period_px < 9.0);
    CHECK(result.period.reliable_count >= 1);

    // The refined field recovers the generating direction over the frame
    // interior (a central 56x56 window).
    double err_sum = 0.0;
    int err_n = 0;
    for (int y = 68; y < 124; ++y)
        for (int x = 68; x < 124; ++x) {
            if (!result.foreground.get(x, y)) continue;
            const fp::cplx z = result.refined.field.at(x, y);
            if (std::abs(z) == 0.0) continue;
            double d = std::abs(std::arg(z) - theta);
            d = std::min(d, oracle::kPi - d);
            err_sum += d;
            ++err_n;
        }
    REQUIRE(err_n > 2000);
    CHECK(err_sum / err_n * 180.0 / oracle::kPi < 3.0);

    // Stage timings partition the wall clock.
    CHECK(result.timings.preprocess_ms >= 0.0);
    CHECK(result.timings.orientation_ms >= 0.0);
    CHECK(result.timings.period_ms >= 0.0);
    CHECK(result.timings.refine_ms >= 0.0);
    const double parts = result.timings.preprocess_ms + result.timings.orientation_ms +
                         result.timings.period_ms + result.timings.refine_ms;
    CHECK(result.timings.total_ms >= 0.99 * parts);

    // Determinism: a second run is bit-identical in every raster artifact.
    const fp::PipelineResult rerun = fp::run_pipeline(canvas, params);
    CHECK(rerun.foreground.count() == result.foreground.count());
    CHECK(rerun.amplified.data == result.amplified.data);
    CHECK(rerun.refined.field.data == result.refined.field.data);
    CHECK(rerun.period.period_px == result.period.period_px);

    // The report lists the summary as key = value lines.
    fp::ErrorStats stats;
    stats.mean_deg = 1.25;
    stats.rmse_deg = 2.0;
    stats.max_deg = 9.0;
    stats.pixels = 1234;
    const std::string report = fp::report_text("scan_01.pgm", result, &stats);
    std::istringstream lines(report);
    std::string line;
    int n_lines = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++n_lines;
        CHECK(line.find(" = ") != std::string::npos);
    }
    CHECK(n_lines >= 15);
    CHECK(report.find("input = scan_01.pgm\n") != std::string::npos);
    CHECK(report.find("period_px = ") != std::string::npos);
    CHECK(report.find("mean_deg = 1.25\n") != std::string::npos);
    CHECK(report.find("pixel_count = 1234\n") != std::string::npos);

    const std::string bare = fp::report_text("scan_01.pgm", result, nullptr);
    CHECK(bare.find("mean_deg") == std::string::npos);
}

}  // TEST_SUITE
