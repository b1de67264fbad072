// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/las_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace chm {

static_assert(std::endian::native == std::endian::little,
              "LAS payload is little-endian; big-endian hosts unsupported");

namespace {

constexpr std::uint16_t kHeaderSize14 = 375;
constexpr std::uint16_t kRecordLen6 = 30;
constexpr double kScale = 0.001;

template <typename T>
T get(const std::vector<char>& buf, std::size_t off) {
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    return v;
}

template <typename T>
void put(std::vector<char>& buf, std::size_t off, T v) {
    std::memcpy(buf.data() + off, &v, sizeof(T));
}

std::uint16_t min_record_length(int format) {
    switch (format) {
        case 0: return 20;
        case 1: return 28;
        case 6: return 30;
        default: return 0;
    }
}

} // namespace

PointCloud read_las(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    in.seekg(0, std::ios::end);
    const std::size_t file_size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    if (file_size < 227) throw CorruptFileError(path + ": shorter than a LAS 1.2 header");

    std::vector<char> head(227);
    in.read(head.data(), 227);
    if (std::memcmp(head.data(), "LASF", 4) != 0)
        throw UnsupportedFormatError(path + ": missing LASF signature");

    const int ver_major = static_cast<unsigned char>(head[24]);
    const int ver_minor = static_cast<unsigned char>(head[25]);
    if (ver_major != 1 || ver_minor < 2 || ver_minor > 4)
        throw UnsupportedFormatError(path + ": LAS " + std::to_string(ver_major) + "." +
                                     std::to_string(ver_minor) + " not supported (need 1.2-1.4)");

    const auto header_size = get<std::uint16_t>(head, 94);
    const auto point_offset = get<std::uint32_t>(head, 96);
    const int raw_format = static_cast<unsigned char>(head[104]);
    if (raw_format & 0x80)
        throw UnsupportedFormatError(path + ": LAZ-compressed points not supported");
    const int format = raw_format & 0x3F;
    if (format != 0 && format != 1 && format != 6)
        throw UnsupportedFormatError(path + ": point format " + std::to_string(format) +
                                     " not supported (need 0, 1 or 6)");
    const auto record_len = get<std::uint16_t>(head, 105);
    if (record_len < min_record_length(format))
        throw CorruptFileError(path + ": record length too small for point format");

    std::uint64_t n_points = get<std::uint32_t>(head, 107);
    if (ver_minor == 4) {
        if (file_size < kHeaderSize14 || header_size < kHeaderSize14)
            throw CorruptFileError(path + ": truncated LAS 1.4 header");
        std::vector<char> ext(kHeaderSize14 - 227);
        in.read(ext.data(), static_cast<std::streamsize>(ext.size()));
        const auto n64 = get<std::uint64_t>(ext, 247 - 227);
        if (n64 > 0) n_points = n64;
    }

    const double sx = get<double>(head, 131), sy = get<double>(head, 139), sz = get<double>(head, 147);
    const double ox = get<double>(head, 155), oy = get<double>(head, 163), oz = get<double>(head, 171);

    if (n_points == 0) throw DegenerateInputError(path + ": no points");
    if (point_offset + n_points * record_len > file_size)
        throw CorruptFileError(path + ": point payload extends past end of file");

    in.seekg(static_cast<std::streamoff>(point_offset));
    std::vector<char> rec(record_len);
    std::vector<LidarPoint> pts;
    pts.reserve(n_points);
    for (std::uint64_t i = 0; i < n_points; ++i) {
        in.read(rec.data(), record_len);
        if (!in) throw CorruptFileError(path + ": truncated point record");
        LidarPoint p;
        p.x = get<std::int32_t>(rec, 0) * sx + ox;
        p.y = get<std::int32_t>(rec, 4) * sy + oy;
        p.z = get<std::int32_t>(rec, 8) * sz + oz;
        if (format == 6) {
            const auto ret = static_cast<std::uint8_t>(rec[14]);
            p.return_number = std::max<std::uint8_t>(1, ret & 0x0F);
            p.classification = static_cast<std::uint8_t>(rec[16]);
        } else {
            const auto flags = static_cast<std::uint8_t>(rec[14]);
            p.return_number = std::max<std::uint8_t>(1, flags & 0x07);
            p.classification = static_cast<std::uint8_t>(rec[15]) & 0x1F;
        }
        pts.push_back(p);
    }
    return make_cloud(std::move(pts));
}

void write_las(const PointCloud& cloud, const std::string& path) {
    if (cloud.empty()) throw DegenerateInputError("refusing to write an empty LAS file");

    // Offset 0 keeps coordinate quantization reproducible when values fit
    // int32 at millimeter scale; large projected coordinates get the
    // floored minimum as offset.
    auto pick_offset = [](double lo, double hi) {
        const double reach = 2.0e6 * kScale * 1000.0; // int32 range at kScale, with headroom
        return (std::abs(lo) < reach && std::abs(hi) < reach) ? 0.0 : std::floor(lo);
    };
    const double ox = pick_offset(cloud.bounds.min_x, cloud.bounds.max_x);
    const double oy = pick_offset(cloud.bounds.min_y, cloud.bounds.max_y);
    const double oz = pick_offset(cloud.bounds.min_z, cloud.bounds.max_z);

    std::vector<char> head(kHeaderSize14, 0);
    std::memcpy(head.data(), "LASF", 4);
    put<std::uint16_t>(head, 6, 0x0010); // WKT bit, required for format 6
    head[24] = 1;
    head[25] = 4;
    const char software[] = "canopyhm";
    std::memcpy(head.data() + 58, software, sizeof(software) - 1);
    put<std::uint16_t>(head, 94, kHeaderSize14);
    put<std::uint32_t>(head, 96, kHeaderSize14);
    head[104] = 6;
    put<std::uint16_t>(head, 105, kRecordLen6);
    // legacy counts stay 0 for point format 6
    put<double>(head, 131, kScale);
    put<double>(head, 139, kScale);
    put<double>(head, 147, kScale);
    put<double>(head, 155, ox);
    put<double>(head, 163, oy);
    put<double>(head, 171, oz);
    put<double>(head, 179, cloud.bounds.max_x);
    put<double>(head, 187, cloud.bounds.min_x);
    put<double>(head, 195, cloud.bounds.max_y);
    put<double>(head, 203, cloud.bounds.min_y);
    put<double>(head, 211, cloud.bounds.max_z);
    put<double>(head, 219, cloud.bounds.min_z);
    put<std::uint64_t>(head, 247, cloud.size());
    // points-by-return histogram, slots 1..15
    std::uint64_t by_return[15] = {};
    for (const LidarPoint& p : cloud.points) {
        const int r = std::clamp<int>(p.return_number, 1, 15);
        ++by_return[r - 1];
    }
    for (int i = 0; i < 15; ++i) put<std::uint64_t>(head, 255 + 8 * i, by_return[i]);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));

    std::vector<char> rec(kRecordLen6, 0);
    for (const LidarPoint& p : cloud.points) {
        std::fill(rec.begin(), rec.end(), 0);
        put<std::int32_t>(rec, 0, static_cast<std::int32_t>(std::llround((p.x - ox) / kScale)));
        put<std::int32_t>(rec, 4, static_cast<std::int32_t>(std::llround((p.y - oy) / kScale)));
        put<std::int32_t>(rec, 8, static_cast<std::int32_t>(std::llround((p.z - oz) / kScale)));
        const auto r = static_cast<std::uint8_t>(std::clamp<int>(p.return_number, 1, 15));
        rec[14] = static_cast<char>(r | (r << 4)); // return r of r
        rec[16] = static_cast<char>(p.classification);
        out.write(rec.data(), kRecordLen6);
    }
    if (!out) throw IoError("failed writing " + path);
}

} // namespace chm
