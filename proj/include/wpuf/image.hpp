#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpuf {

/// 8-bit intensity raster, row-major.
struct SpeckleImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    SpeckleImage() = default;
    SpeckleImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t size() const { return data.size(); }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const SpeckleImage& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

/// Binary PGM (P5, maxval 255). Written atomically via temp file + rename.
inline void write_pgm(const SpeckleImage& img, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("write_pgm: cannot open " + tmp);
        out << "P5\n" << img.width << " " << img.height << "\n255\n";
        out.write(reinterpret_cast<const char*>(img.data.data()),
                  static_cast<std::streamsize>(img.data.size()));
        if (!out) throw std::runtime_error("write_pgm: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline SpeckleImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: not a binary PGM: " + path.string());
    int w = 0, h = 0, maxval = 0;
    auto skip_comments = [&in] {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string line;
            std::getline(in, line);
            in >> std::ws;
        }
    };
    skip_comments();
    in >> w;
    skip_comments();
    in >> h;
    skip_comments();
    in >> maxval;
    if (maxval != 255 || w <= 0 || h <= 0)
        throw std::runtime_error("read_pgm: unsupported header in " + path.string());
    in.get();  // single whitespace before raster
    SpeckleImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
    if (!in) throw std::runtime_error("read_pgm: truncated raster in " + path.string());
    return img;
}

}  // namespace wpuf
