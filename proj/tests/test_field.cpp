// test_field.cpp - noise generation, signal injection, and prefix-sum boxcar
// arithmetic against brute-force oracles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scanstat/field.hpp"

using namespace scanstat;

TEST_CASE("white_noise is deterministic in (dims, seed)") {
    const GridField a = white_noise({4, 4}, 7);
    const GridField b = white_noise({4, 4}, 7);
    CHECK(a == b);
    const GridField c = white_noise({4, 4}, 8);
    CHECK(a.data()[0] != c.data()[0]);
}

TEST_CASE("white_noise moments at 256x256") {
    const GridField f = white_noise({256, 256}, 20260808);
    double mean = 0.0;
    for (const double x : f.data()) mean += x;
    mean /= static_cast<double>(f.cell_count());
    CHECK(std::abs(mean) <= 4.0 / 256.0);  // 4 sigma band for the sample mean
    double var = 0.0;
    for (const double x : f.data()) var += (x - mean) * (x - mean);
    var /= static_cast<double>(f.cell_count() - 1);
    CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("invalid dims are rejected") {
    CHECK_THROWS_AS(white_noise({0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(white_noise({4, -1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(white_noise({}, 1), std::invalid_argument);
    CHECK_THROWS_AS(white_noise({1 << 30, 1 << 30, 1 << 30}, 1), std::invalid_argument);
}

TEST_CASE("inject_signal puts mu/sqrt(|R|) on each cell") {
    GridField zero({4, 4});
    const Rect rect{{0, 0}, {2, 2}};
    const GridField out = inject_signal(zero, {rect, 6.0});
    CHECK(out.at(std::vector<Index>{0, 0}) == 3.0);
    CHECK(out.at(std::vector<Index>{1, 1}) == 3.0);
    CHECK(out.at(std::vector<Index>{2, 2}) == 0.0);

    const GridField same = inject_signal(zero, {rect, 0.0});
    CHECK(same == zero);

    CHECK_THROWS_AS(inject_signal(zero, {Rect{{3, 3}, {2, 2}}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(inject_signal(zero, {rect, -1.0}), std::invalid_argument);
}

TEST_CASE("inject_signal raises the Z-score over R* by exactly mu") {
    const GridField noise = white_noise({256, 256}, 99);
    const Rect rect{{100, 37}, {34, 38}};
    const GridField with = inject_signal(noise, {rect, 6.0});
    const PrefixSumTable before(noise);
    const PrefixSumTable after(with);
    CHECK(after.zscore(rect) - before.zscore(rect) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("prefix sums on a 2x2 example") {
    const GridField f({2, 2}, {1.0, 2.0, 3.0, 4.0});
    const PrefixSumTable table(f);
    CHECK(table.rect_sum(Rect{{0, 0}, {2, 2}}) == 10.0);
    CHECK(table.rect_sum(Rect{{0, 0}, {2, 1}}) == 4.0);  // column {1, 3}
    CHECK(table.zscore(Rect{{0, 0}, {2, 2}}) == 5.0);
}

TEST_CASE("all 1x1 sums equal the raw entries") {
    const GridField f = testref::random_field({32, 32}, 5);
    const PrefixSumTable table(f);
    for (Index r = 0; r < 32; ++r)
        for (Index c = 0; c < 32; ++c) {
            const double got = table.rect_sum(Rect{{r, c}, {1, 1}});
            const double want = f.at(std::vector<Index>{r, c});
            REQUIRE(testref::close_rel(got, want, 1e-9));
        }
}

TEST_CASE("rect_sum matches brute force on random 16^3 rectangles") {
    const GridField f = testref::random_field({16, 16, 16}, 17);
    const PrefixSumTable table(f);
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const Rect r = testref::random_rect(f.dims(), gen);
        const double got = table.rect_sum(r);
        const double want = testref::brute_rect_sum(f, r);
        REQUIRE(testref::close_rel(got, want, 1e-9));
    }
}

TEST_CASE("degenerate rectangles are rejected") {
    const GridField f({4, 4});
    const PrefixSumTable table(f);
    CHECK_THROWS_AS(table.rect_sum(Rect{{0, 0}, {0, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(table.rect_sum(Rect{{3, 3}, {2, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(table.rect_sum(Rect{{-1, 0}, {2, 2}}), std::invalid_argument);
}

TEST_CASE("zscore examples") {
    GridField ones({6, 6});
    for (double& x : ones.data()) x = 1.0;
    const PrefixSumTable table(ones);
    CHECK(table.zscore(Rect{{1, 2}, {3, 4}}) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-12));

    // Adding a constant c raises the Z-score by c*sqrt(|R|).
    const GridField noise = testref::random_field({6, 6}, 23);
    GridField shifted = noise;
    for (double& x : shifted.data()) x += 2.5;
    const PrefixSumTable t0(noise);
    const PrefixSumTable t1(shifted);
    const Rect rect{{0, 1}, {4, 2}};
    CHECK(t1.zscore(rect) - t0.zscore(rect) ==
          doctest::Approx(2.5 * std::sqrt(8.0)).epsilon(1e-9));
}

TEST_CASE("zscore_field matches per-anchor zscores and brute force") {
    GridField ones({4, 4});
    for (double& x : ones.data()) x = 1.0;
    const PrefixSumTable table(ones);
    const GridField zf = table.zscore_field(std::vector<Index>{2, 2});
    CHECK(zf.dims() == std::vector<Index>{3, 3});
    for (const double z : zf.data()) CHECK(z == doctest::Approx(2.0).epsilon(1e-12));

    const GridField f = testref::random_field({32, 32}, 31);
    const PrefixSumTable tf(f);
    const std::vector<Index> shape{5, 3};
    const GridField zs = tf.zscore_field(shape);
    CHECK(zs.dims() == std::vector<Index>{28, 30});
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<Index> rdist(0, 27), cdist(0, 29);
        const Index r = rdist(gen), c = cdist(gen);
        const Rect rect{{r, c}, shape};
        const double via_field = zs.at(std::vector<Index>{r, c});
        REQUIRE(std::abs(via_field - tf.zscore(rect)) <= 1e-12);
        REQUIRE(testref::close_rel(via_field, testref::brute_zscore(f, rect), 1e-9));
    }

    // shape == dims degenerates to the global Z-score.
    const GridField whole = tf.zscore_field(f.dims());
    CHECK(whole.cell_count() == 1);
    CHECK(whole.data()[0] ==
          doctest::Approx(tf.zscore(Rect{{0, 0}, f.dims()})).epsilon(1e-12));

    CHECK_THROWS_AS(tf.zscore_field(std::vector<Index>{40, 3}), std::invalid_argument);
}

TEST_CASE("prefix full-grid corner equals direct summation") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const GridField f = testref::random_field({9, 7, 5}, seed);
        const PrefixSumTable table(f);
        double direct = 0.0;
        for (const double x : f.data()) direct += x;
        REQUIRE(testref::close_rel(table.rect_sum(Rect{{0, 0, 0}, {9, 7, 5}}), direct, 1e-9));
    }
}
