#pragma once

#include <cstdint>
#include <vector>

#include "fpcore/errors.hpp"

namespace fp {

// Raster containers are row-major; (x, y) addresses column x of row y.

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw InvalidParameter("GrayImage dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return data.size(); }
};

struct RealMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    RealMap() = default;
    RealMap(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw InvalidParameter("RealMap dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return data.size(); }
};

// Per-pixel strength values in [0, 1]; same layout as RealMap.
using StrengthMap = RealMap;

// Binary raster; stored values are exactly 0 or 255 so the PGM form is the
// in-memory form.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw InvalidParameter("BinaryMask dimensions must be positive");
        data.assign(static_cast<std::size_t>(w) * h, fill ? 255 : 0);
    }

    bool get(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 255 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return data.size(); }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint8_t v : data) n += (v != 0);
        return n;
    }
    bool empty() const { return count() == 0; }
};

// Odd-sized convolution weights anchored at the central cell.
struct Kernel {
    int width = 0;
    int height = 0;
    std::vector<double> weights;

    Kernel() = default;
    Kernel(int w, int h) : width(w), height(h) {
        if (w <= 0 || h <= 0 || w % 2 == 0 || h % 2 == 0)
            throw InvalidParameter("Kernel dimensions must be positive and odd");
        weights.assign(static_cast<std::size_t>(w) * h, 0.0);
    }

    int anchor_x() const { return (width - 1) / 2; }
    int anchor_y() const { return (height - 1) / 2; }
    double& at(int x, int y) { return weights[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return weights[static_cast<std::size_t>(y) * width + x]; }
};

inline RealMap to_real(const GrayImage& img) {
    RealMap out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i];
    return out;
}

inline GrayImage to_gray(const RealMap& map) {
    GrayImage out(map.width, map.height);
    for (std::size_t i = 0; i < map.data.size(); ++i) {
        double v = map.data[i];
        v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
        out.data[i] = static_cast<std::uint8_t>(v + 0.5);
    }
    return out;
}

inline RealMap mask_to_real(const BinaryMask& mask) {
    RealMap out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.data.size(); ++i) out.data[i] = mask.data[i] ? 1.0 : 0.0;
    return out;
}

inline void require_same_size(int wa, int ha, int wb, int hb, const char* what) {
    if (wa != wb || ha != hb) throw DimensionMismatch(what);
}

}  // namespace fp
