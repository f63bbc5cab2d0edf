#include "fpcore/pgm_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fp {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw TruncatedFile(path);
    long value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1000000000L) throw DimensionOverflow(path);
        any = true;
        c = in.get();
    }
    if (!any) throw BadMagic(path + ": malformed header");
    return static_cast<int>(value);
}

void write_atomic(const std::string& path, const void* bytes, std::size_t n,
                  const std::string& header) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << header;
        out.write(static_cast<const char*>(bytes), static_cast<std::streamsize>(n));
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') throw BadMagic(path + ": not a P5 PGM");
    const int w = next_header_int(in, path);
    const int h = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (w <= 0 || h <= 0) throw DimensionOverflow(path);
    if (static_cast<long long>(w) * h > 100000000LL) throw DimensionOverflow(path);
    if (maxval != 255) throw BadMagic(path + ": maxval must be 255");
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.size()) throw TruncatedFile(path);
    return img;
}

void write_pgm(const GrayImage& image, const std::string& path) {
    char header[64];
    std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", image.width, image.height);
    write_atomic(path, image.data.data(), image.size(), header);
}

BinaryMask read_mask_pgm(const std::string& path) {
    const GrayImage img = read_pgm(path);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        if (img.data[i] != 0 && img.data[i] != 255)
            throw IoError(path + ": mask sample is neither 0 nor 255");
        mask.data[i] = img.data[i];
    }
    return mask;
}

void write_mask_pgm(const BinaryMask& mask, const std::string& path) {
    char header[64];
    std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", mask.width, mask.height);
    write_atomic(path, mask.data.data(), mask.size(), header);
}

}  // namespace fp
