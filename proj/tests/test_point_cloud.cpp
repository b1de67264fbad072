// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "chm/ivf.hpp"
#include "chm/las_io.hpp"
#include "chm/point_cloud.hpp"
#include "oracles.hpp"

using namespace chm;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = "pc_" + name;
    std::ofstream out(path, std::ios::trunc);
    out << body;
    return path;
}

PointCloud random_cloud(std::size_t n, double extent, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> co(0.0, extent);
    std::uniform_int_distribution<int> cls(0, 6);
    std::uniform_int_distribution<int> ret(1, 3);
    // snap to 1/1024 m so whole-meter translations stay fp-exact
    auto snap = [&] { return std::round(co(rng) * 1024.0) / 1024.0; };
    std::vector<LidarPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back({snap(), snap(), snap(),
                       static_cast<std::uint8_t>(cls(rng)), static_cast<std::uint8_t>(ret(rng))});
    return make_cloud(std::move(pts));
}

} // namespace

TEST_CASE("csv single row gives a one-point cloud with degenerate bounds") {
    const auto path = write_temp("single.csv", "x,y,z,classification,return_number\n1.0,2.0,3.0,2,1\n");
    const PointCloud c = read_point_cloud(path, CloudFormat::Csv);
    REQUIRE(c.size() == 1);
    CHECK(c.points[0].x == 1.0);
    CHECK(c.points[0].y == 2.0);
    CHECK(c.points[0].z == 3.0);
    CHECK(c.points[0].classification == 2);
    CHECK(c.points[0].return_number == 1);
    CHECK(c.bounds.min_x == 1.0);
    CHECK(c.bounds.max_x == 1.0);
    CHECK(c.bounds.min_z == 3.0);
    CHECK(c.bounds.max_z == 3.0);
}

TEST_CASE("csv bounds are coordinate-wise extrema") {
    const auto path = write_temp("extrema.csv",
                                 "x,y,z,classification,return_number\n"
                                 "0,0,0,2,1\n1,1,5,2,1\n2,2,10,2,1\n");
    const PointCloud c = read_point_cloud(path, CloudFormat::Csv);
    CHECK(c.bounds.min_z == 0.0);
    CHECK(c.bounds.max_z == 10.0);
}

TEST_CASE("csv parse errors carry the line number") {
    const auto bad_row = write_temp("bad_row.csv", "x,y,z,classification,return_number\n1,2,oops,2,1\n");
    CHECK_THROWS_WITH_AS(read_point_cloud(bad_row, CloudFormat::Csv), doctest::Contains(":2:"),
                         ParseError);
    const auto bad_header = write_temp("bad_header.csv", "x,y,z\n1,2,3\n");
    CHECK_THROWS_AS(read_point_cloud(bad_header, CloudFormat::Csv), ParseError);
    const auto empty = write_temp("empty.csv", "x,y,z,classification,return_number\n");
    CHECK_THROWS_AS(read_point_cloud(empty, CloudFormat::Csv), DegenerateInputError);
}

TEST_CASE("csv rejects out-of-range attribute values") {
    const auto path = write_temp("bad_cls.csv", "x,y,z,classification,return_number\n1,2,3,300,1\n");
    CHECK_THROWS_AS(read_point_cloud(path, CloudFormat::Csv), ParseError);
    const auto ret0 = write_temp("ret0.csv", "x,y,z,classification,return_number\n1,2,3,2,0\n");
    CHECK_THROWS_AS(read_point_cloud(ret0, CloudFormat::Csv), ParseError);
}

TEST_CASE("las round-trips its own writer bit-identically") {
    // millimeter-grid coordinates are exactly representable in the format
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> milli(-5'000'000, 5'000'000);
    std::uniform_int_distribution<int> cls(0, 255);
    std::uniform_int_distribution<int> ret(1, 15);
    std::vector<LidarPoint> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back({milli(rng) * 0.001, milli(rng) * 0.001, milli(rng) * 0.001,
                       static_cast<std::uint8_t>(cls(rng)), static_cast<std::uint8_t>(ret(rng))});
    const PointCloud original = make_cloud(pts);

    write_point_cloud(original, "pc_roundtrip.las", CloudFormat::Las);
    const PointCloud back = read_point_cloud("pc_roundtrip.las", CloudFormat::Las);
    REQUIRE(back.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(back.points[i].x == original.points[i].x);
        CHECK(back.points[i].y == original.points[i].y);
        CHECK(back.points[i].z == original.points[i].z);
        CHECK(back.points[i].classification == original.points[i].classification);
        CHECK(back.points[i].return_number == original.points[i].return_number);
    }
}

TEST_CASE("csv round-trips bit-identically") {
    const PointCloud original = random_cloud(64, 100.0, 5);
    write_point_cloud(original, "pc_roundtrip.csv", CloudFormat::Csv);
    const PointCloud back = read_point_cloud("pc_roundtrip.csv", CloudFormat::Csv);
    REQUIRE(back.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) CHECK(back.points[i] == original.points[i]);
}

TEST_CASE("las reader rejects what it cannot parse") {
    CHECK_THROWS_AS(read_point_cloud(write_temp("not_las.las", "hello world, definitely not lidar"),
                                     CloudFormat::Las),
                    Error);
    // truncate a valid file mid-record
    const PointCloud original = random_cloud(50, 10.0, 6);
    write_point_cloud(original, "pc_trunc.las", CloudFormat::Las);
    std::ifstream in("pc_trunc.las", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out("pc_trunc.las", std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 17));
    out.close();
    CHECK_THROWS_AS(read_point_cloud("pc_trunc.las", CloudFormat::Las), CorruptFileError);
}

TEST_CASE("ivf removes a single isolated point") {
    std::vector<LidarPoint> pts = {{50.0, 50.0, 50.0, 2, 1}};
    // surround with a far-away cluster so the cloud itself is non-trivial
    for (int i = 0; i < 10; ++i)
        pts.push_back({1.0 + 0.05 * i, 1.0, 1.0, 2, 1});
    const PointCloud cloud = make_cloud(pts);
    const PointCloud kept = ivf_denoise(cloud, 1.0, 5);
    CHECK(kept.size() == 10);
    for (const LidarPoint& p : kept.points) CHECK(p.x < 2.0);
}

TEST_CASE("ivf keeps a dense voxel cluster") {
    std::vector<LidarPoint> pts;
    for (int i = 0; i < 10; ++i)
        pts.push_back({0.5 + 0.01 * i, 0.5, 0.5, 2, 1}); // all in one voxel
    const PointCloud cloud = make_cloud(pts);
    CHECK(ivf_denoise(cloud, 1.0, 5).size() == 10);
}

TEST_CASE("ivf matches the all-pairs neighborhood oracle on 500 random points") {
    const PointCloud cloud = random_cloud(500, 20.0, 99);
    for (const IvfRule rule : {IvfRule::CountLessEqual, IvfRule::CountLess}) {
        const auto got = ivf_noise_mask(cloud, 1.0, 5, rule);
        const auto want = oracle::ivf_noise_allpairs(cloud, 1.0, 5, rule);
        CHECK(got == want);
    }
}

TEST_CASE("ivf parameter and degenerate errors") {
    const PointCloud cloud = random_cloud(10, 5.0, 3);
    CHECK_THROWS_AS(ivf_denoise(cloud, 0.0, 5), ParameterError);
    CHECK_THROWS_AS(ivf_denoise(cloud, -1.0, 5), ParameterError);
    CHECK_THROWS_AS(ivf_denoise(PointCloud{}, 1.0, 5), DegenerateInputError);
}

TEST_CASE("ivf output is a subset and repeated application is monotone") {
    const PointCloud cloud = random_cloud(400, 12.0, 17);
    const PointCloud once = ivf_denoise(cloud, 1.0, 3);
    REQUIRE(once.size() <= cloud.size());
    // subset: every survivor appears in the input, order preserved
    std::size_t cursor = 0;
    for (const LidarPoint& p : once.points) {
        while (cursor < cloud.size() && !(cloud.points[cursor] == p)) ++cursor;
        REQUIRE(cursor < cloud.size());
        ++cursor;
    }
    if (!once.empty()) {
        const PointCloud twice = ivf_denoise(once, 1.0, 3);
        CHECK(twice.size() <= once.size());
    }
}

TEST_CASE("ivf is invariant under translation by integer voxel multiples") {
    const PointCloud cloud = random_cloud(300, 15.0, 23);
    const auto base = ivf_noise_mask(cloud, 1.0, 5);
    std::vector<LidarPoint> moved = cloud.points;
    for (LidarPoint& p : moved) {
        p.x += 7.0;
        p.y -= 3.0;
        p.z += 11.0;
    }
    CHECK(ivf_noise_mask(make_cloud(moved), 1.0, 5) == base);
}
