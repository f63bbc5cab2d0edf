#pragma once

#include <string>

#include "fpcore/orientation.hpp"

namespace fp {

// ORF1 container: bytes 'O','R','F','1', u32 little-endian width and height,
// then width*height (re, im) pairs of f32 little-endian in row-major order.
// Values round-trip bit-exactly at f32 precision; writes are atomic.
OrientationField read_field(const std::string& path);
void write_field(const OrientationField& field, const std::string& path);

}  // namespace fp
