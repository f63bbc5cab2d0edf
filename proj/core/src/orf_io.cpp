#include "fpcore/orf_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace fp {

namespace {

constexpr std::uint64_t kMaxPixels = 100000000;

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32le(std::string& out, float f) {
    put_u32le(out, std::bit_cast<std::uint32_t>(f));
}

std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

OrientationField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    unsigned char header[12];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (static_cast<std::size_t>(in.gcount()) != sizeof(header)) throw TruncatedFile(path);
    if (header[0] != 'O' || header[1] != 'R' || header[2] != 'F' || header[3] != '1')
        throw BadMagic(path + ": not an ORF1 field");
    const std::uint32_t w = get_u32le(header + 4);
    const std::uint32_t h = get_u32le(header + 8);
    if (w == 0 || h == 0 || static_cast<std::uint64_t>(w) * h > kMaxPixels)
        throw DimensionOverflow(path);
    OrientationField field(static_cast<int>(w), static_cast<int>(h));
    std::vector<unsigned char> payload(static_cast<std::size_t>(w) * h * 8);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) throw TruncatedFile(path);
    for (std::size_t i = 0; i < field.data.size(); ++i) {
        const float re = std::bit_cast<float>(get_u32le(&payload[i * 8]));
        const float im = std::bit_cast<float>(get_u32le(&payload[i * 8 + 4]));
        field.data[i] = cplx(re, im);
    }
    return field;
}

void write_field(const OrientationField& field, const std::string& path) {
    std::string bytes;
    bytes.reserve(12 + field.size() * 8);
    bytes += "ORF1";
    put_u32le(bytes, static_cast<std::uint32_t>(field.width));
    put_u32le(bytes, static_cast<std::uint32_t>(field.height));
    for (const cplx& z : field.data) {
        put_f32le(bytes, static_cast<float>(z.real()));
        put_f32le(bytes, static_cast<float>(z.imag()));
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace fp
