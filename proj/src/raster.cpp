// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace chm {

static_assert(std::endian::native == std::endian::little,
              "raster payload is little-endian; big-endian hosts unsupported");
static_assert(sizeof(float) == 4);

const char* dtype_name(DType t) { return t == DType::U8 ? "u8" : "f32"; }

Raster Raster::make_u8(const GridSpec& grid, int bands, std::uint8_t fill) {
    grid.validate();
    Raster r;
    r.grid = grid;
    r.bands = bands;
    r.dtype = DType::U8;
    r.u8.assign(static_cast<std::size_t>(bands) * grid.pixel_count(), fill);
    return r;
}

Raster Raster::make_f32(const GridSpec& grid, int bands, float fill) {
    grid.validate();
    Raster r;
    r.grid = grid;
    r.bands = bands;
    r.dtype = DType::F32;
    r.f32.assign(static_cast<std::size_t>(bands) * grid.pixel_count(), fill);
    return r;
}

namespace {

std::string strip_raster_ext(const std::string& path) {
    if (path.size() > 4) {
        const std::string tail = path.substr(path.size() - 4);
        if (tail == ".hdr" || tail == ".bin") return path.substr(0, path.size() - 4);
    }
    return path;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Raster read_raster(const std::string& path) {
    const std::string stem = strip_raster_ext(path);
    std::ifstream hdr(stem + ".hdr");
    if (!hdr) throw IoError("cannot open raster header: " + stem + ".hdr");

    Raster r;
    r.grid.width = r.grid.height = -1;
    std::optional<DType> dtype;
    std::string line;
    int lineno = 0;
    while (std::getline(hdr, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(stem + ".hdr:" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "width") r.grid.width = std::stoi(val);
            else if (key == "height") r.grid.height = std::stoi(val);
            else if (key == "bands") r.bands = std::stoi(val);
            else if (key == "origin_x") r.grid.origin_x = std::stod(val);
            else if (key == "origin_y") r.grid.origin_y = std::stod(val);
            else if (key == "pixel_size") r.grid.pixel_size = std::stod(val);
            else if (key == "crs") r.crs = val;
            else if (key == "nodata") {
                if (val != "none") r.nodata = std::stof(val);
            } else if (key == "dtype") {
                if (val == "u8") dtype = DType::U8;
                else if (val == "f32") dtype = DType::F32;
                else throw UnsupportedFormatError(stem + ".hdr: unknown dtype '" + val + "'");
            }
            // unknown keys ignored
        } catch (const std::invalid_argument&) {
            throw ParseError(stem + ".hdr:" + std::to_string(lineno) + ": bad value for " + key);
        } catch (const std::out_of_range&) {
            throw ParseError(stem + ".hdr:" + std::to_string(lineno) + ": value out of range for " + key);
        }
    }
    if (!dtype) throw ParseError(stem + ".hdr: missing dtype");
    if (r.grid.width < 1 || r.grid.height < 1 || r.bands < 1)
        throw ParseError(stem + ".hdr: missing or invalid dimensions");
    r.dtype = *dtype;

    std::ifstream bin(stem + ".bin", std::ios::binary);
    if (!bin) throw IoError("cannot open raster payload: " + stem + ".bin");
    bin.seekg(0, std::ios::end);
    const std::size_t actual = static_cast<std::size_t>(bin.tellg());
    bin.seekg(0);

    const std::size_t n = r.value_count();
    const std::size_t expected = n * (r.dtype == DType::U8 ? 1 : 4);
    if (actual != expected)
        throw CorruptFileError(stem + ".bin: payload is " + std::to_string(actual) +
                               " bytes, header implies " + std::to_string(expected));

    if (r.dtype == DType::U8) {
        r.u8.resize(n);
        bin.read(reinterpret_cast<char*>(r.u8.data()), static_cast<std::streamsize>(n));
    } else {
        r.f32.resize(n);
        bin.read(reinterpret_cast<char*>(r.f32.data()), static_cast<std::streamsize>(n * 4));
    }
    if (!bin) throw IoError("short read on " + stem + ".bin");
    return r;
}

void write_raster(const Raster& r, const std::string& path) {
    const std::string stem = strip_raster_ext(path);
    {
        std::ofstream hdr(stem + ".hdr", std::ios::trunc);
        if (!hdr) throw IoError("cannot write raster header: " + stem + ".hdr");
        hdr << "width = " << r.grid.width << "\n"
            << "height = " << r.grid.height << "\n"
            << "bands = " << r.bands << "\n"
            << "dtype = " << dtype_name(r.dtype) << "\n";
        hdr.precision(17);
        hdr << "origin_x = " << r.grid.origin_x << "\n"
            << "origin_y = " << r.grid.origin_y << "\n"
            << "pixel_size = " << r.grid.pixel_size << "\n";
        if (r.nodata) {
            hdr.precision(9);
            hdr << "nodata = " << *r.nodata << "\n";
        } else {
            hdr << "nodata = none\n";
        }
        hdr << "crs = " << (r.crs.empty() ? "unknown" : r.crs) << "\n";
        if (!hdr) throw IoError("failed writing " + stem + ".hdr");
    }
    std::ofstream bin(stem + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("cannot write raster payload: " + stem + ".bin");
    if (r.dtype == DType::U8) {
        bin.write(reinterpret_cast<const char*>(r.u8.data()),
                  static_cast<std::streamsize>(r.u8.size()));
    } else {
        bin.write(reinterpret_cast<const char*>(r.f32.data()),
                  static_cast<std::streamsize>(r.f32.size() * 4));
    }
    if (!bin) throw IoError("failed writing " + stem + ".bin");
}

} // namespace chm
