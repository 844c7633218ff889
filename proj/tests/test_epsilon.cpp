// test_epsilon.cpp - the delta metric, dyadic pyramid, covering enumeration,
// and the epsilon-adaptive scan.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scanstat/epsilon.hpp"

using namespace scanstat;

TEST_CASE("delta metric basics") {
    const Rect a{{0, 0}, {4, 4}};
    CHECK(delta_metric(a, a) == 0.0);
    const Rect b{{10, 10}, {4, 4}};
    CHECK(delta_metric(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // d=1: cells {0,1} vs {1,2} overlap in one of two.
    const Rect c{{0}, {2}};
    const Rect d{{1}, {2}};
    CHECK(delta_metric(c, d) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(delta_metric(a, c), std::invalid_argument);
}

TEST_CASE("delta is a metric on random triples") {
    std::mt19937_64 gen(100);
    const std::vector<Index> dims{40, 40};
    for (int trial = 0; trial < 1000; ++trial) {
        const Rect x = testref::random_rect(dims, gen);
        const Rect y = testref::random_rect(dims, gen);
        const Rect z = testref::random_rect(dims, gen);
        const double dxy = delta_metric(x, y);
        const double dyx = delta_metric(y, x);
        REQUIRE(dxy == dyx);
        REQUIRE(dxy >= 0.0);
        REQUIRE(dxy <= std::sqrt(2.0) + 1e-12);
        if (x == y) REQUIRE(dxy == 0.0);
        REQUIRE(dxy <= delta_metric(x, z) + delta_metric(z, y) + 1e-9);
    }
}

TEST_CASE("pyramid levels on the 2x2 example") {
    const GridField f({2, 2}, {1.0, 2.0, 3.0, 4.0});
    const DyadPyramid pyr = DyadPyramid::build(f);
    CHECK(pyr.level(std::vector<int>{0, 0}) == f);
    const GridField& l10 = pyr.level(std::vector<int>{1, 0});
    CHECK(l10.dims() == std::vector<Index>{1, 2});
    CHECK(l10.data()[0] == 4.0);  // 1 + 3, summed along axis 0
    CHECK(l10.data()[1] == 6.0);  // 2 + 4
    const GridField& l01 = pyr.level(std::vector<int>{0, 1});
    CHECK(l01.data()[0] == 3.0);
    CHECK(l01.data()[1] == 7.0);
    CHECK(pyr.level(std::vector<int>{1, 1}).data()[0] == 10.0);
}

TEST_CASE("pyramid equals brute-force block sums on a random 64x64 field") {
    const GridField f = testref::random_field({64, 64}, 55);
    const DyadPyramid pyr = DyadPyramid::build(f);
    std::mt19937_64 gen(7);
    for (int a0 = 0; a0 <= 6; ++a0)
        for (int a1 = 0; a1 <= 6; ++a1) {
            const std::vector<int> a{a0, a1};
            const GridField& level = pyr.level(a);
            REQUIRE(level.dims() == std::vector<Index>{64 >> a0, 64 >> a1});
            for (int probe = 0; probe < 10; ++probe) {
                std::vector<Index> t(2);
                for (int j = 0; j < 2; ++j) {
                    std::uniform_int_distribution<Index> dist(0, level.dims()[j] - 1);
                    t[static_cast<std::size_t>(j)] = dist(gen);
                }
                REQUIRE(testref::close_rel(level.at(t), testref::brute_block_sum(f, a, t), 1e-9));
            }
        }
}

TEST_CASE("pyramid rejects non-power-of-two extents") {
    const GridField f({6, 8});
    CHECK_THROWS_AS(DyadPyramid::build(f), std::invalid_argument);
}

TEST_CASE("dyadic convolution identity on a random field") {
    // (dyad_a * b_f)(t) == (y * b_{2^a o f})(2^a o t) for all fitting (a, f, t).
    const GridField f = testref::random_field({64, 64}, 60);
    const PrefixSumTable base(f);
    const DyadPyramid pyr = DyadPyramid::build(f);
    for (int a0 = 0; a0 <= 3; ++a0)
        for (int a1 = 0; a1 <= 3; ++a1) {
            const GridField& level = pyr.level(std::vector<int>{a0, a1});
            const PrefixSumTable lt(level);
            for (Index f0 = 1; f0 <= 4; ++f0)
                for (Index f1 = 1; f1 <= 4; ++f1) {
                    if (f0 > level.dims()[0] || f1 > level.dims()[1]) continue;
                    for (Index t0 = 0; t0 + f0 <= level.dims()[0]; t0 += 3)
                        for (Index t1 = 0; t1 + f1 <= level.dims()[1]; t1 += 3) {
                            const double lhs = lt.rect_sum(Rect{{t0, t1}, {f0, f1}});
                            const double rhs = base.rect_sum(
                                Rect{{t0 << a0, t1 << a1}, {f0 << a0, f1 << a1}});
                            REQUIRE(testref::close_rel(lhs, rhs, 1e-9));
                        }
                }
        }
}

TEST_CASE("covering parameter arithmetic") {
    const CoveringParams p = CoveringParams::make(1.0, {64, 128}, 2, 1024);
    CHECK(p.f_max == 16);  // ceil(8*2/1)
    CHECK(p.a_lo == 3);    // floor(log2(64/8))
    CHECK(p.a_hi == 4);    // ceil(log2(128/8))
    CHECK_THROWS_AS(CoveringParams::make(0.5, {16, 32}, 2, 64), std::invalid_argument);
    CHECK_THROWS_AS(CoveringParams::make(-1.0, {64, 64}, 2, 64), std::invalid_argument);
    // a_hi never exceeds log2(n).
    const CoveringParams q = CoveringParams::make(8.0, {16, 32}, 2, 64);
    CHECK(q.a_hi <= 6);
}

TEST_CASE("covering enumeration: every element fits and the count matches") {
    const CoveringParams p = CoveringParams::make(1.0, {16, 32}, 2, 64);
    std::uint64_t count = 0;
    const std::vector<Index> dims{64, 64};
    for_each_covering_element(64, 2, p, [&](const CoveringElement& el) {
        const Rect r = el.rect();
        REQUIRE(r.fits(dims));
        for (int j = 0; j < 2; ++j) {
            REQUIRE(el.a[static_cast<std::size_t>(j)] >= p.a_lo);
            REQUIRE(el.a[static_cast<std::size_t>(j)] <= p.a_hi);
            REQUIRE(el.f[static_cast<std::size_t>(j)] >= 1);
            REQUIRE(el.f[static_cast<std::size_t>(j)] <= p.f_max);
        }
        ++count;
    });
    CHECK(count == covering_size(64, 2, p));
    CHECK(count > 0);
}

TEST_CASE("covering verification stays below eps at desk scale") {
    const ShapeRange range{16, 32};
    const CoveringParams p = CoveringParams::make(1.0, range, 2, 64);
    const double worst = covering_verify(64, 2, range, p, 2000, 9);
    CHECK(worst <= 1.0);
    CHECK(worst > 0.0);  // random rectangles rarely sit exactly on the covering
}

TEST_CASE("epsilon scan recovers an injected covering rectangle") {
    GridField zero({64, 64});
    // Dyadic-aligned: anchor and shape multiples of 2^a for a in range.
    const Rect star{{16, 24}, {16, 24}};
    const GridField field = inject_signal(zero, {star, 10.0});
    const EpsScanResult res = epsilon_adaptive_scan(field, {16, 23}, 1.0);
    CHECK(res.outcome.best_rect == star);
    CHECK(res.outcome.stat == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(res.op_count > 0);
}

TEST_CASE("epsilon scan in-range records are dominated by the full scan") {
    const GridField f = testref::random_field({64, 64}, 71);
    const ShapeRange range{16, 23};
    const EpsScanResult eps = epsilon_adaptive_scan(f, range, 1.0);
    const ScanOutcome full = adaptive_scan(f, range);
    // Unflagged (in-range) covering rectangles are a subset of the full scan's
    // class, so their best P-value cannot beat the full scan's.
    double best_in_range = 1.0;
    bool any_in_range = false;
    for (const auto& rec : eps.outcome.per_shape) {
        if (rec.clamped) continue;
        any_in_range = true;
        best_in_range = std::min(best_in_range, alpha_from_tau(rec.tau_hat));
    }
    REQUIRE(any_in_range);
    CHECK(best_in_range >= full.pvalue - 1e-12);
    CHECK(eps.flagged_shapes > 0);  // f starts at 1, so sub-h_lo shapes exist
    CHECK(eps.outcome.pvalue == doctest::Approx(alpha_from_tau(eps.outcome.tau_hat)).epsilon(1e-12));
}

TEST_CASE("epsilon scan preconditions") {
    const GridField f = testref::random_field({60, 60}, 72);
    CHECK_THROWS_AS(epsilon_adaptive_scan(f, {16, 20}, 1.0), std::invalid_argument);
    const GridField g = testref::random_field({64, 64}, 73);
    CHECK_THROWS_AS(epsilon_adaptive_scan(g, {4, 16}, 1.0), std::invalid_argument);  // eps^2 h_lo < 8d
    CHECK_THROWS_AS(covering_verify(64, 2, {16, 80}, CoveringParams::make(1.0, {16, 23}, 2, 64),
                                    10, 1),
                    std::invalid_argument);
}

TEST_CASE("epsilon scan determinism") {
    const GridField f = testref::random_field({64, 64}, 74);
    const EpsScanResult a = epsilon_adaptive_scan(f, {16, 23}, 1.0);
    const EpsScanResult b = epsilon_adaptive_scan(f, {16, 23}, 1.0);
    CHECK(a.outcome.tau_hat == b.outcome.tau_hat);
    CHECK(a.outcome.best_rect == b.outcome.best_rect);
    CHECK(a.op_count == b.op_count);
}
