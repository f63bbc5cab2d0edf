#include "fpcore/params.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fp {

namespace {

struct IntField {
    const char* name;
    int PipelineParams::*ptr;
};

struct DoubleField {
    const char* name;
    double PipelineParams::*ptr;
};

const std::vector<IntField>& int_fields() {
    static const std::vector<IntField> fields = {
        {"filter_size", &PipelineParams::filter_size},
        {"n_angles", &PipelineParams::n_angles},
        {"strict_single_angle", &PipelineParams::strict_single_angle},
        {"clip_lo", &PipelineParams::clip_lo},
        {"clip_hi", &PipelineParams::clip_hi},
        {"seg_median_radius", &PipelineParams::seg_median_radius},
        {"seg_min_radius", &PipelineParams::seg_min_radius},
        {"seg_dilate1", &PipelineParams::seg_dilate1},
        {"seg_erode", &PipelineParams::seg_erode},
        {"seg_dilate2", &PipelineParams::seg_dilate2},
        {"seg_keep", &PipelineParams::seg_keep},
        {"amp_radius", &PipelineParams::amp_radius},
        {"tmin1", &PipelineParams::tmin1},
        {"tmin2", &PipelineParams::tmin2},
        {"tmax1", &PipelineParams::tmax1},
        {"tmax2", &PipelineParams::tmax2},
        {"segment_length", &PipelineParams::segment_length},
        {"grid_step", &PipelineParams::grid_step},
        {"n_samples", &PipelineParams::n_samples},
        {"n_circle", &PipelineParams::n_circle},
        {"m1_erode", &PipelineParams::m1_erode},
        {"m2_dilate", &PipelineParams::m2_dilate},
        {"m0_erode", &PipelineParams::m0_erode},
        {"m4_dilate", &PipelineParams::m4_dilate},
        {"iter_erode", &PipelineParams::iter_erode},
        {"iter_dilate", &PipelineParams::iter_dilate},
        {"iteration_cap", &PipelineParams::iteration_cap},
        {"a2_scalar_strength", &PipelineParams::a2_scalar_strength},
        {"render_iterations", &PipelineParams::render_iterations},
        {"overlay_stride", &PipelineParams::overlay_stride},
    };
    return fields;
}

const std::vector<DoubleField>& double_fields() {
    static const std::vector<DoubleField> fields = {
        {"sigma1", &PipelineParams::sigma1},
        {"alpha1", &PipelineParams::alpha1},
        {"sigma2", &PipelineParams::sigma2},
        {"alpha2", &PipelineParams::alpha2},
        {"response_blur_factor", &PipelineParams::response_blur_factor},
        {"field_smooth_factor", &PipelineParams::field_smooth_factor},
        {"hist_sigma", &PipelineParams::hist_sigma},
        {"tau_variation", &PipelineParams::tau_variation},
        {"tau_line", &PipelineParams::tau_line},
        {"line_min_cols", &PipelineParams::line_min_cols},
        {"line_max_resid", &PipelineParams::line_max_resid},
        {"seg_blur_sigma", &PipelineParams::seg_blur_sigma},
        {"tau_segment", &PipelineParams::tau_segment},
        {"edge_pre_sigma", &PipelineParams::edge_pre_sigma},
        {"edge_high", &PipelineParams::edge_high},
        {"edge_low", &PipelineParams::edge_low},
        {"edge_density_sigma", &PipelineParams::edge_density_sigma},
        {"tau_edge", &PipelineParams::tau_edge},
        {"t_reliable", &PipelineParams::t_reliable},
        {"strength", &PipelineParams::strength},
        {"rho_smooth", &PipelineParams::rho_smooth},
        {"rho_drift", &PipelineParams::rho_drift},
        {"rho_adjust", &PipelineParams::rho_adjust},
        {"tau_delta", &PipelineParams::tau_delta},
        {"tau_unstable", &PipelineParams::tau_unstable},
        {"tau_singular", &PipelineParams::tau_singular},
        {"tau_converge", &PipelineParams::tau_converge},
        {"epsilon_weight", &PipelineParams::epsilon_weight},
        {"s1_sigma", &PipelineParams::s1_sigma},
        {"i3_sigma", &PipelineParams::i3_sigma},
        {"min_component_factor", &PipelineParams::min_component_factor},
        {"w_sigma", &PipelineParams::w_sigma},
    };
    return fields;
}

[[noreturn]] void fail(const std::string& what) { throw InvalidParameter(what); }

}  // namespace

void PipelineParams::validate() const {
    if (filter_size < 3 || filter_size % 2 == 0) fail("filter_size must be odd and >= 3");
    if (n_angles < 1) fail("n_angles must be >= 1");
    if (!(sigma1 > 0) || !(sigma2 > 0)) fail("sigma1/sigma2 must be positive");
    if (!(alpha1 > 0) || !(alpha2 > 0)) fail("alpha1/alpha2 must be positive");
    if (!(response_blur_factor > 0) || !(field_smooth_factor > 0))
        fail("blur factors must be positive");
    if (clip_lo < 0 || clip_hi > 255 || clip_lo >= clip_hi) fail("clip_lo/clip_hi out of order");
    if (!(hist_sigma > 0)) fail("hist_sigma must be positive");
    if (!(tau_variation > 0)) fail("tau_variation must be positive");
    if (!(tau_line > 0)) fail("tau_line must be positive");
    if (!(line_min_cols > 0) || line_min_cols > 1) fail("line_min_cols must be in (0, 1]");
    if (!(line_max_resid > 0)) fail("line_max_resid must be positive");
    if (seg_median_radius < 0 || seg_min_radius < 0) fail("segmentation radii must be >= 0");
    if (!(seg_blur_sigma > 0)) fail("seg_blur_sigma must be positive");
    if (!(tau_segment > 0)) fail("tau_segment must be positive");
    if (seg_dilate1 < 0 || seg_erode < 0 || seg_dilate2 < 0) fail("morphology radii must be >= 0");
    if (seg_keep < 1) fail("seg_keep must be >= 1");
    if (!(edge_pre_sigma > 0) || !(edge_density_sigma > 0)) fail("edge sigmas must be positive");
    if (!(edge_high > 0) || edge_high > 1 || !(edge_low > 0) || edge_low > edge_high)
        fail("edge thresholds must satisfy 0 < low <= high <= 1");
    if (!(tau_edge > 0) || tau_edge > 1) fail("tau_edge must be in (0, 1]");
    if (amp_radius < 1) fail("amp_radius must be >= 1");
    if (tmin1 >= tmin2) fail("tmin1 must be < tmin2");
    if (tmax1 >= tmax2) fail("tmax1 must be < tmax2");
    if (tmin1 < 0 || tmin2 > 255 || tmax1 < 0 || tmax2 > 255) fail("amplification thresholds out of range");
    if (segment_length < 2) fail("segment_length must be >= 2");
    if (grid_step < 1) fail("grid_step must be >= 1");
    if (n_samples < 4) fail("n_samples must be >= 4");
    if (!(t_reliable > 0) || t_reliable > 1) fail("t_reliable must be in (0, 1]");
    if (!(strength > 0) || strength > 1) fail("strength must be in (0, 1]");
    if (!(rho_smooth > 0) || !(rho_drift > 0) || !(rho_adjust > 0))
        fail("circle radius factors must be positive");
    if (!(tau_delta > 0) || tau_delta > 1) fail("tau_delta must be in (0, 1]");
    if (!(tau_unstable > 0) || tau_unstable > 1) fail("tau_unstable must be in (0, 1]");
    if (!(tau_singular > 0) || tau_singular > 1) fail("tau_singular must be in (0, 1]");
    if (!(tau_converge > 0) || tau_converge > 1) fail("tau_converge must be in (0, 1]");
    if (!(epsilon_weight > 0)) fail("epsilon_weight must be positive");
    if (n_circle < 0) fail("n_circle must be >= 0");
    if (m1_erode < 0 || m2_dilate < 0 || m0_erode < 0 || m4_dilate < 0)
        fail("refinement morphology radii must be >= 0");
    if (!(s1_sigma > 0) || !(i3_sigma > 0) || !(w_sigma > 0)) fail("refinement sigmas must be positive");
    if (!(min_component_factor >= 0)) fail("min_component_factor must be >= 0");
    if (iter_dilate < 0 || iter_erode <= iter_dilate)
        fail("iter_erode must exceed iter_dilate for guaranteed convergence");
    if (iteration_cap < 1) fail("iteration_cap must be >= 1");
    if (render_iterations < 1) fail("render_iterations must be >= 1");
    if (overlay_stride < 4) fail("overlay_stride must be >= 4");
}

std::string params_to_string(const PipelineParams& params) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& f : int_fields()) out << f.name << " = " << params.*(f.ptr) << "\n";
    for (const auto& f : double_fields()) out << f.name << " = " << params.*(f.ptr) << "\n";
    return out.str();
}

void set_param(PipelineParams& params, const std::string& key, const std::string& value) {
    for (const auto& f : int_fields()) {
        if (key == f.name) {
            std::size_t pos = 0;
            int v;
            try {
                v = std::stoi(value, &pos);
            } catch (const std::exception&) {
                fail(key + ": not an integer: " + value);
            }
            if (pos != value.size()) fail(key + ": not an integer: " + value);
            params.*(f.ptr) = v;
            return;
        }
    }
    for (const auto& f : double_fields()) {
        if (key == f.name) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(value, &pos);
            } catch (const std::exception&) {
                fail(key + ": not a number: " + value);
            }
            if (pos != value.size()) fail(key + ": not a number: " + value);
            params.*(f.ptr) = v;
            return;
        }
    }
    fail("unknown parameter: " + key);
}

PipelineParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    PipelineParams params;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        std::string key, value;
        if (eq == std::string::npos) {
            std::istringstream probe(line);
            if (!(probe >> key)) continue;  // blank line
            fail(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            const std::size_t a = s.find_first_not_of(" \t\r");
            const std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        key = trim(line.substr(0, eq));
        value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(path + ":" + std::to_string(lineno) + ": expected key = value");
        set_param(params, key, value);
    }
    params.validate();
    return params;
}

void save_params(const PipelineParams& params, const std::string& path) {
    const std::string text = params_to_string(params);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << text;
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace fp
