// fpfield: fingerprint orientation-field pipeline driver.
//
// Exit codes: 0 success, 1 usage or internal error, 2 unreadable input,
// 3 empty foreground, 4 no reliable period segments, 5 iteration cap hit
// (artifacts are still written in that case).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpcore/errors.hpp"
#include "fpcore/orf_io.hpp"
#include "fpcore/pgm_io.hpp"
#include "fpcore/pipeline.hpp"
#include "fpcore/png_io.hpp"
#include "fpcore/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnreadable = 2;
constexpr int kExitEmptyForeground = 3;
constexpr int kExitNoSegments = 4;
constexpr int kExitIterationCap = 5;

// Raised only by the input-reading helpers so IO failures on inputs map to
// their own exit code while write failures stay generic.
struct UnreadableInput : fp::Error {
    explicit UnreadableInput(const std::string& msg) : Error(msg) {}
};

fp::GrayImage read_image(const std::string& path) {
    try {
        if (fp::looks_like_png(path)) return fp::read_png(path);
        return fp::read_pgm(path);
    } catch (const fp::Error& e) {
        throw UnreadableInput(std::string(e.what()) + " (" + path + ")");
    }
}

fp::OrientationField read_field_input(const std::string& path) {
    try {
        return fp::read_field(path);
    } catch (const fp::Error& e) {
        throw UnreadableInput(std::string(e.what()) + " (" + path + ")");
    }
}

fp::BinaryMask read_mask_input(const std::string& path) {
    try {
        return fp::read_mask_pgm(path);
    } catch (const fp::Error& e) {
        throw UnreadableInput(std::string(e.what()) + " (" + path + ")");
    }
}

// Shared --config / --set plumbing for every subcommand.
struct ParamArgs {
    std::string config_path;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value parameter file");
        cmd->add_option("--set", overrides, "override one parameter, e.g. --set grid_step=8");
    }

    fp::PipelineParams materialize() const {
        fp::PipelineParams params;
        if (!config_path.empty()) {
            try {
                params = fp::load_params(config_path);
            } catch (const fp::IoError& e) {
                throw UnreadableInput(std::string(e.what()) + " (" + config_path + ")");
            }
        }
        for (const std::string& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw fp::InvalidParameter("--set expects key=value, got '" + kv + "'");
            fp::set_param(params, kv.substr(0, eq), kv.substr(eq + 1));
        }
        params.validate();
        return params;
    }
};

void write_text(const std::string& text, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fp::IoError("cannot open for writing: " + tmp.string());
        out << text;
        if (!out.flush()) throw fp::IoError("short write: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string join_dir(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

// Parses "x,y" pairs for synth singularity placement.
std::pair<double, double> parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw fp::InvalidParameter("expected x,y — got '" + text + "'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw fp::InvalidParameter("expected numeric x,y — got '" + text + "'");
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"fingerprint orientation-field extraction and refinement"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ----------------------------------------------------------- preprocess
    auto* cmd_pre = app.add_subcommand("preprocess", "equalize, mask and amplify one image");
    {
        auto input = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>(".");
        auto pargs = std::make_shared<ParamArgs>();
        cmd_pre->add_option("input", *input, "grayscale PGM or PNG")->required();
        cmd_pre->add_option("--out-dir", *out_dir, "output directory (default .)");
        pargs->attach(cmd_pre);
        cmd_pre->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                const fp::GrayImage image = read_image(*input);
                const fp::EqualizeResult eq = fp::equalize(image, params);
                const fp::BorderResult border = fp::remove_border(eq.image, params);
                const fp::BinaryMask fg = fp::segment(eq.image, border.mask, params);
                const fp::GrayImage amp = fp::amplify_ridges(eq.image, fg, params);
                fp::write_pgm(eq.image, join_dir(*out_dir, "equalized.pgm"));
                fp::write_mask_pgm(fg, join_dir(*out_dir, "mask.pgm"));
                fp::write_pgm(amp, join_dir(*out_dir, "amplified.pgm"));
                return kExitOk;
            };
        });
    }

    // -------------------------------------------------------------- extract
    auto* cmd_extract = app.add_subcommand("extract", "first-stage orientation field");
    {
        auto input = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>("orientation.orf");
        auto raw = std::make_shared<bool>(false);
        auto pargs = std::make_shared<ParamArgs>();
        cmd_extract->add_option("input", *input, "grayscale PGM or PNG")->required();
        cmd_extract->add_option("-o,--output", *output, "orientation field file");
        cmd_extract->add_flag("--raw", *raw, "estimate on the input directly, skip preprocessing");
        pargs->attach(cmd_extract);
        cmd_extract->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                const fp::GrayImage image = read_image(*input);
                fp::GrayImage source = image;
                if (!*raw) {
                    const fp::EqualizeResult eq = fp::equalize(image, params);
                    const fp::BorderResult border = fp::remove_border(eq.image, params);
                    const fp::BinaryMask fg = fp::segment(eq.image, border.mask, params);
                    source = fp::amplify_ridges(eq.image, fg, params);
                }
                const fp::FilterBank bank =
                    fp::build_filter_bank(params.filter_size, params.sigma1, params.alpha1,
                                          params.sigma2, params.alpha2, params.n_angles);
                const fp::OrientationField field = fp::estimate_orientation(
                    source, bank, params.field_smooth_factor * params.filter_size,
                    params.response_blur_factor * params.filter_size,
                    params.strict_single_angle != 0);
                fp::write_field(field, *output);
                return kExitOk;
            };
        });
    }

    // --------------------------------------------------------------- period
    auto* cmd_period = app.add_subcommand("period", "ridge-period estimate, printed key = value");
    {
        auto input = std::make_shared<std::string>();
        auto field_path = std::make_shared<std::string>();
        auto raw = std::make_shared<bool>(false);
        auto pargs = std::make_shared<ParamArgs>();
        cmd_period->add_option("input", *input, "grayscale PGM or PNG")->required();
        cmd_period->add_option("--field", *field_path,
                               "estimate along this field instead of extracting one");
        cmd_period->add_flag("--raw", *raw, "probe the input directly, skip preprocessing");
        pargs->attach(cmd_period);
        cmd_period->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                const fp::GrayImage image = read_image(*input);
                fp::GrayImage source = image;
                if (!*raw) {
                    const fp::EqualizeResult eq = fp::equalize(image, params);
                    const fp::BorderResult border = fp::remove_border(eq.image, params);
                    const fp::BinaryMask fg = fp::segment(eq.image, border.mask, params);
                    source = fp::amplify_ridges(eq.image, fg, params);
                }
                fp::OrientationField field;
                if (field_path->empty()) {
                    const fp::FilterBank bank =
                        fp::build_filter_bank(params.filter_size, params.sigma1, params.alpha1,
                                              params.sigma2, params.alpha2, params.n_angles);
                    field = fp::estimate_orientation(
                        source, bank, params.field_smooth_factor * params.filter_size,
                        params.response_blur_factor * params.filter_size,
                        params.strict_single_angle != 0);
                } else {
                    field = read_field_input(*field_path);
                }
                const fp::PeriodEstimate est = fp::estimate_period(field, source, params);
                std::cout << "period_px = " << est.period_px << "\n"
                          << "ridge_frequency = " << est.frequency << "\n"
                          << "reliable_segments = " << est.reliable_count << "\n";
                return kExitOk;
            };
        });
    }

    // --------------------------------------------------------------- refine
    auto* cmd_refine = app.add_subcommand("refine", "refined orientation field");
    {
        auto input = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>("refined.orf");
        auto trace_dir = std::make_shared<std::string>();
        auto pargs = std::make_shared<ParamArgs>();
        cmd_refine->add_option("input", *input, "grayscale PGM or PNG")->required();
        cmd_refine->add_option("-o,--output", *output, "refined field file");
        cmd_refine->add_option("--trace-dir", *trace_dir,
                               "also write the intermediate masks and fields here");
        pargs->attach(cmd_refine);
        cmd_refine->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                const fp::GrayImage image = read_image(*input);
                const fp::PipelineResult result = fp::run_pipeline(image, params);
                fp::write_field(result.refined.field, *output);
                if (!trace_dir->empty()) {
                    const fp::RefineTrace& t = result.refined.trace;
                    fp::write_mask_pgm(t.mask_delta_free, join_dir(*trace_dir, "m1.pgm"));
                    fp::write_mask_pgm(t.mask_unstable, join_dir(*trace_dir, "m2.pgm"));
                    fp::write_mask_pgm(t.mask_singular, join_dir(*trace_dir, "m3.pgm"));
                    fp::write_mask_pgm(t.mask_smooth_seed, join_dir(*trace_dir, "m4.pgm"));
                    fp::write_field(t.field_coarse, join_dir(*trace_dir, "coarse.orf"));
                    fp::write_field(t.field_fine, join_dir(*trace_dir, "fine.orf"));
                    fp::write_field(t.field_adjusted, join_dir(*trace_dir, "adjusted.orf"));
                }
                return result.refined.trace.iteration_cap_hit ? kExitIterationCap : kExitOk;
            };
        });
    }

    // ------------------------------------------------------------------ run
    auto* cmd_run = app.add_subcommand("run", "full pipeline, writes every artifact");
    {
        auto input = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>(".");
        auto truth_path = std::make_shared<std::string>();
        auto pargs = std::make_shared<ParamArgs>();
        cmd_run->add_option("input", *input, "grayscale PGM or PNG")->required();
        cmd_run->add_option("--out-dir", *out_dir, "output directory (default .)");
        cmd_run->add_option("--truth", *truth_path,
                            "ground-truth field; adds error stats to the report");
        pargs->attach(cmd_run);
        cmd_run->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                const fp::GrayImage image = read_image(*input);
                const fp::PipelineResult result = fp::run_pipeline(image, params);
                fp::write_pgm(result.equalized.image, join_dir(*out_dir, "equalized.pgm"));
                fp::write_mask_pgm(result.foreground, join_dir(*out_dir, "mask.pgm"));
                fp::write_pgm(result.amplified, join_dir(*out_dir, "amplified.pgm"));
                fp::write_field(result.orientation, join_dir(*out_dir, "orientation.orf"));
                fp::write_field(result.refined.field, join_dir(*out_dir, "refined.orf"));
                const fp::OverlayImage overlay =
                    fp::render_overlay(image, result.refined.field, params.overlay_stride);
                fp::write_png_gray_alpha(overlay.gray, overlay.alpha,
                                         join_dir(*out_dir, "overlay.png"));
                fp::ErrorStats stats;
                bool have_stats = false;
                if (!truth_path->empty()) {
                    const fp::OrientationField truth = read_field_input(*truth_path);
                    stats = fp::angular_error(truth, result.refined.field, result.foreground);
                    have_stats = true;
                }
                write_text(fp::report_text(*input, result, have_stats ? &stats : nullptr),
                           join_dir(*out_dir, "report.txt"));
                return result.refined.trace.iteration_cap_hit ? kExitIterationCap : kExitOk;
            };
        });
    }

    // ---------------------------------------------------------------- synth
    auto* cmd_synth = app.add_subcommand("synth", "synthetic field and ridge-image generator");
    {
        auto width = std::make_shared<int>(256);
        auto height = std::make_shared<int>(256);
        auto loops = std::make_shared<std::vector<std::string>>();
        auto deltas = std::make_shared<std::vector<std::string>>();
        auto base_angle = std::make_shared<double>(0.0);
        auto output = std::make_shared<std::string>("field.orf");
        auto render_path = std::make_shared<std::string>();
        auto period = std::make_shared<double>(8.0);
        auto seed = std::make_shared<unsigned long long>(1);
        auto corrupt = std::make_shared<std::string>();
        auto pargs = std::make_shared<ParamArgs>();
        cmd_synth->add_option("--width", *width, "field width");
        cmd_synth->add_option("--height", *height, "field height");
        cmd_synth->add_option("--loop", *loops, "loop position x,y (repeatable)");
        cmd_synth->add_option("--delta", *deltas, "delta position x,y (repeatable)");
        cmd_synth->add_option("--base-angle", *base_angle, "background orientation, radians");
        cmd_synth->add_option("-o,--output", *output, "field file");
        cmd_synth->add_option("--render", *render_path, "also render a ridge image here (PGM)");
        cmd_synth->add_option("--period", *period, "ridge period for --render, px");
        cmd_synth->add_option("--seed", *seed, "generator seed");
        cmd_synth->add_option("--corrupt", *corrupt, "randomize a disk, cx,cy,radius");
        pargs->attach(cmd_synth);
        cmd_synth->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                std::vector<fp::Singularity> sing;
                for (const std::string& p : *loops) {
                    const auto [x, y] = parse_point(p);
                    sing.push_back({fp::Singularity::Type::Loop, x, y});
                }
                for (const std::string& p : *deltas) {
                    const auto [x, y] = parse_point(p);
                    sing.push_back({fp::Singularity::Type::Delta, x, y});
                }
                fp::OrientationField field = fp::synth_field(*width, *height, sing, *base_angle);
                if (!corrupt->empty()) {
                    const auto first = corrupt->find(',');
                    const auto second = corrupt->find(',', first + 1);
                    if (first == std::string::npos || second == std::string::npos)
                        throw fp::InvalidParameter("--corrupt expects cx,cy,radius");
                    const double cx = std::stod(corrupt->substr(0, first));
                    const double cy = std::stod(corrupt->substr(first + 1, second - first - 1));
                    const double radius = std::stod(corrupt->substr(second + 1));
                    field = fp::corrupt_region(field, cx, cy, radius,
                                               static_cast<std::uint64_t>(*seed));
                }
                fp::write_field(field, *output);
                if (!render_path->empty()) {
                    const fp::GrayImage ridges =
                        fp::render_ridges(field, *period, static_cast<std::uint64_t>(*seed),
                                          params.render_iterations);
                    fp::write_pgm(ridges, *render_path);
                }
                return kExitOk;
            };
        });
    }

    // --------------------------------------------------------------- render
    auto* cmd_render = app.add_subcommand("render", "orientation overlay PNG");
    {
        auto image_path = std::make_shared<std::string>();
        auto field_path = std::make_shared<std::string>();
        auto output = std::make_shared<std::string>("overlay.png");
        auto stride = std::make_shared<int>(0);
        auto pargs = std::make_shared<ParamArgs>();
        cmd_render->add_option("--image", *image_path, "background image")->required();
        cmd_render->add_option("--field", *field_path, "orientation field")->required();
        cmd_render->add_option("-o,--output", *output, "overlay file");
        cmd_render->add_option("--stride", *stride, "grid spacing, px (>= 4)");
        pargs->attach(cmd_render);
        cmd_render->callback([=, &action] {
            action = [=] {
                const fp::PipelineParams params = pargs->materialize();
                const fp::GrayImage image = read_image(*image_path);
                const fp::OrientationField field = read_field_input(*field_path);
                const int use_stride = (*stride > 0) ? *stride : params.overlay_stride;
                const fp::OverlayImage overlay = fp::render_overlay(image, field, use_stride);
                fp::write_png_gray_alpha(overlay.gray, overlay.alpha, *output);
                return kExitOk;
            };
        });
    }

    // ----------------------------------------------------------------- eval
    auto* cmd_eval = app.add_subcommand("eval", "angular error between two fields");
    {
        auto truth_path = std::make_shared<std::string>();
        auto candidate_path = std::make_shared<std::string>();
        auto mask_path = std::make_shared<std::string>();
        cmd_eval->add_option("--truth", *truth_path, "ground-truth field")->required();
        cmd_eval->add_option("--candidate", *candidate_path, "field under test")->required();
        cmd_eval->add_option("--mask", *mask_path, "evaluation mask (PGM)")->required();
        cmd_eval->callback([=, &action] {
            action = [=] {
                const fp::OrientationField truth = read_field_input(*truth_path);
                const fp::OrientationField candidate = read_field_input(*candidate_path);
                const fp::BinaryMask mask = read_mask_input(*mask_path);
                const fp::ErrorStats stats = fp::angular_error(truth, candidate, mask);
                std::cout << "mean_deg = " << stats.mean_deg << "\n"
                          << "rmse_deg = " << stats.rmse_deg << "\n"
                          << "max_deg = " << stats.max_deg << "\n"
                          << "pixel_count = " << stats.pixels << "\n";
                return kExitOk;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Normalize CLI11's parse-error codes onto the documented contract:
        // help/version print and exit 0, every usage error exits 1.
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }
    return action ? action() : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const UnreadableInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnreadable;
    } catch (const fp::EmptyForeground& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmptyForeground;
    } catch (const fp::NoReliableSegments& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoSegments;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
