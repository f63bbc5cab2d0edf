#pragma once

#include <string>

#include "fpcore/raster.hpp"

namespace fp {

// Reads any 8/16-bit PNG and folds it down to 8-bit grayscale.
GrayImage read_png(const std::string& path);

// 8-bit gray + alpha PNG; gray and alpha must share dimensions. Writes are
// atomic.
void write_png_gray_alpha(const GrayImage& gray, const GrayImage& alpha, const std::string& path);

// True when the file starts with the PNG signature.
bool looks_like_png(const std::string& path);

}  // namespace fp
