// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/png.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <zlib.h>

namespace chm {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::ofstream& out, const char type[4], const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> head;
    put_u32_be(head, static_cast<std::uint32_t>(data.size()));
    out.write(reinterpret_cast<const char*>(head.data()), 4);
    out.write(type, 4);
    if (!data.empty()) out.write(reinterpret_cast<const char*>(data.data()),
                                 static_cast<std::streamsize>(data.size()));
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
    std::vector<std::uint8_t> tail;
    put_u32_be(tail, crc);
    out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

} // namespace

void write_png_gray8(const std::string& path, const std::vector<std::uint8_t>& pixels,
                     int width, int height) {
    if (width < 1 || height < 1) throw ParameterError("png dimensions must be positive");
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw ParameterError("png pixel buffer size mismatch");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    out.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(0); // grayscale
    ihdr.push_back(0); // deflate
    ihdr.push_back(0); // adaptive filtering
    ihdr.push_back(0); // no interlace
    put_chunk(out, "IHDR", ihdr);

    // filter byte 0 before every scanline
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (width + 1));
    for (int row = 0; row < height; ++row) {
        raw.push_back(0);
        raw.insert(raw.end(), pixels.begin() + static_cast<std::size_t>(row) * width,
                   pixels.begin() + static_cast<std::size_t>(row + 1) * width);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> idat(bound);
    if (compress2(idat.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IoError("png deflate failed");
    idat.resize(bound);
    put_chunk(out, "IDAT", idat);
    put_chunk(out, "IEND", {});
    if (!out) throw IoError("failed writing " + path);
}

void render_height_png(const Raster& r, const std::string& path) {
    if (r.bands != 1) throw ParameterError("render expects a 1-band raster");
    const int w = r.grid.width, h = r.grid.height;
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h, 0);
    if (r.dtype == DType::U8) {
        px = r.u8;
    } else {
        // 0..102 m maps onto 0..255; nodata renders black
        for (std::size_t i = 0; i < r.f32.size(); ++i) {
            const float v = r.f32[i];
            if (r.is_nodata(v)) continue;
            px[i] = static_cast<std::uint8_t>(
                std::clamp(std::lround(static_cast<double>(v) / 102.0 * 255.0), 0L, 255L));
        }
    }
    write_png_gray8(path, px, w, h);
}

} // namespace chm
