#pragma once

#include <stdexcept>
#include <string>

namespace fp {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& msg) : Error("invalid parameter: " + msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct OutOfBounds : Error {
    explicit OutOfBounds(const std::string& msg) : Error("out of bounds: " + msg) {}
};

// Segmentation produced no foreground pixels.
struct EmptyForeground : Error {
    EmptyForeground() : Error("empty foreground: no significant region found") {}
    explicit EmptyForeground(const std::string& msg) : Error("empty foreground: " + msg) {}
};

// Period estimation found no segment passing the reliability test.
struct NoReliableSegments : Error {
    NoReliableSegments() : Error("no reliable segments for period estimation") {}
    explicit NoReliableSegments(const std::string& msg) : Error("no reliable segments: " + msg) {}
};

// Error statistics were requested over an empty pixel set.
struct EmptyMask : Error {
    EmptyMask() : Error("empty mask: no pixels to evaluate") {}
    explicit EmptyMask(const std::string& msg) : Error("empty mask: " + msg) {}
};

// Refinement input field carries no usable orientation information.
struct DegenerateField : Error {
    DegenerateField() : Error("degenerate field: zero magnitude almost everywhere") {}
    explicit DegenerateField(const std::string& msg) : Error("degenerate field: " + msg) {}
};

// Circle weight normalization collapsed: the numerators cancel below the
// epsilon cutoff. Field operators catch this internally and fall back.
struct DegenerateWeights : Error {
    DegenerateWeights() : Error("degenerate weights: projections undefined or below cutoff") {}
};

// Self-referenced weights need a nonzero field value at the centre.
struct ZeroAnchor : Error {
    ZeroAnchor() : Error("zero anchor: field magnitude is zero at the centre") {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

struct BadMagic : IoError {
    explicit BadMagic(const std::string& msg) : IoError("bad magic: " + msg) {}
};

struct TruncatedFile : IoError {
    explicit TruncatedFile(const std::string& msg) : IoError("truncated file: " + msg) {}
};

struct DimensionOverflow : IoError {
    explicit DimensionOverflow(const std::string& msg) : IoError("dimension overflow: " + msg) {}
};

}  // namespace fp
