#pragma once

#include <string>

#include "fpcore/raster.hpp"

namespace fp {

// Binary PGM (P5), maxval 255 only. Writes are atomic: a temporary file in
// the same directory is renamed over the target.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path);

// Masks serialize with values exactly 0 and 255; reading rejects any other
// sample value.
BinaryMask read_mask_pgm(const std::string& path);
void write_mask_pgm(const BinaryMask& mask, const std::string& path);

}  // namespace fp
