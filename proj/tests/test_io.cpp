// test_io.cpp - GF01 and CSV grid round trips.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "scanstat/io.hpp"

using namespace scanstat;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("GF01 round trip is bit exact") {
    const GridField f = testref::random_field({5, 7, 3}, 123);
    TempFile tmp("scanstat_io_test.gf01");
    io::write_gf01(tmp.path, f);
    const GridField g = io::read_gf01(tmp.path);
    CHECK(f == g);
    CHECK(io::read_auto(tmp.path) == f);
}

TEST_CASE("CSV round trip for d=2") {
    const GridField f = testref::random_field({6, 9}, 321);
    TempFile tmp("scanstat_io_test.csv");
    io::write_csv(tmp.path, f);
    const GridField g = io::read_csv(tmp.path);
    REQUIRE(g.dims() == f.dims());
    for (std::size_t i = 0; i < f.cell_count(); ++i)
        REQUIRE(g.data()[i] == f.data()[i]);  // 17 significant digits round-trip
    CHECK(io::read_auto(tmp.path) == f);

    const GridField cube = testref::random_field({2, 2, 2}, 5);
    CHECK_THROWS_AS(io::write_csv(tmp.path, cube), std::invalid_argument);
}

TEST_CASE("malformed inputs are reported with the path") {
    TempFile tmp("scanstat_io_bad.gf01");
    {
        std::ofstream out(tmp.path, std::ios::binary);
        out << "NOTMAGIC-and-some-junk";
    }
    CHECK_THROWS_AS(io::read_gf01(tmp.path), std::runtime_error);

    TempFile ragged("scanstat_io_ragged.csv");
    {
        std::ofstream out(ragged.path);
        out << "1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(io::read_csv(ragged.path), std::runtime_error);

    TempFile words("scanstat_io_words.csv");
    {
        std::ofstream out(words.path);
        out << "1,2\nthree,4\n";
    }
    CHECK_THROWS_AS(io::read_csv(words.path), std::runtime_error);
    CHECK_THROWS_AS(io::read_gf01("/nonexistent/path.gf01"), std::runtime_error);
}

TEST_CASE("truncated GF01 data section is detected") {
    const GridField f = testref::random_field({4, 4}, 9);
    TempFile tmp("scanstat_io_trunc.gf01");
    io::write_gf01(tmp.path, f);
    std::filesystem::resize_file(tmp.path, std::filesystem::file_size(tmp.path) - 16);
    CHECK_THROWS_AS(io::read_gf01(tmp.path), std::runtime_error);
}
