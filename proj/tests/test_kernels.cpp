// test_kernels.cpp - scalar/AVX2 backend equivalence. The contract is bit
// identity, so every comparison below is exact.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "scanstat/kernels.hpp"

using namespace scanstat::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 3.0);
    std::vector<double> v(n);
    for (double& x : v) x = normal(gen);
    return v;
}

}  // namespace

TEST_CASE("scalar and avx2 backends agree bit for bit") {
    const Kernels& ref = scalar_kernels();
    const Kernels* simd = avx2_kernels();
    if (!simd) {
        MESSAGE("avx2 backend unavailable on this machine; scalar-only run");
        return;
    }
    // Lengths straddling the vector width, including 0 and odd tails.
    for (const std::size_t n : {0ul, 1ul, 2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 15ul, 64ul, 67ul, 513ul}) {
        CAPTURE(n);
        const auto a = random_vec(n, 11 + static_cast<unsigned>(n));
        const auto b = random_vec(n, 29 + static_cast<unsigned>(n));
        const auto c = random_vec(n, 47 + static_cast<unsigned>(n));
        const auto e = random_vec(n, 83 + static_cast<unsigned>(n));

        std::vector<double> out0(n), out1(n);
        ref.add(out0.data(), a.data(), b.data(), n);
        simd->add(out1.data(), a.data(), b.data(), n);
        CHECK(out0 == out1);

        out0 = c;
        out1 = c;
        ref.acc(out0.data(), a.data(), n);
        simd->acc(out1.data(), a.data(), n);
        CHECK(out0 == out1);

        ref.diff(out0.data(), a.data(), b.data(), n);
        simd->diff(out1.data(), a.data(), b.data(), n);
        CHECK(out0 == out1);

        ref.combine4(out0.data(), a.data(), b.data(), c.data(), e.data(), n);
        simd->combine4(out1.data(), a.data(), b.data(), c.data(), e.data(), n);
        CHECK(out0 == out1);

        const auto wide = random_vec(2 * n, 101 + static_cast<unsigned>(n));
        ref.pair_sum(out0.data(), wide.data(), n);
        simd->pair_sum(out1.data(), wide.data(), n);
        CHECK(out0 == out1);

        const MaxResult m0 = ref.max(a.data(), n);
        const MaxResult m1 = simd->max(a.data(), n);
        CHECK(m0.value == m1.value);
        CHECK(m0.index == m1.index);

        const MaxResult d0 = ref.diff_max(a.data(), b.data(), n);
        const MaxResult d1 = simd->diff_max(a.data(), b.data(), n);
        CHECK(d0.value == d1.value);
        CHECK(d0.index == d1.index);
    }
}

TEST_CASE("max kernels return the first index among ties") {
    const std::vector<double> ties{1.0, 5.0, 2.0, 5.0, 5.0, -1.0, 5.0};
    for (const Kernels* k : {&scalar_kernels(), avx2_kernels()}) {
        if (!k) continue;
        const MaxResult m = k->max(ties.data(), ties.size());
        CHECK(m.value == 5.0);
        CHECK(m.index == 1);
        // diff against zeros reduces to max.
        const std::vector<double> zeros(ties.size(), 0.0);
        const MaxResult d = k->diff_max(ties.data(), zeros.data(), ties.size());
        CHECK(d.value == 5.0);
        CHECK(d.index == 1);
    }
}

TEST_CASE("empty input yields -inf and index 0") {
    for (const Kernels* k : {&scalar_kernels(), avx2_kernels()}) {
        if (!k) continue;
        const MaxResult m = k->max(nullptr, 0);
        CHECK(m.value == -std::numeric_limits<double>::infinity());
        CHECK(m.index == 0);
    }
}

TEST_CASE("pair_sum pairs adjacent entries") {
    const std::vector<double> src{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    std::vector<double> dst(5);
    scalar_kernels().pair_sum(dst.data(), src.data(), 5);
    CHECK(dst == std::vector<double>{3.0, 7.0, 11.0, 15.0, 19.0});
}

TEST_CASE("active backend is one of the registered ones") {
    const Kernels& k = active();
    const bool known = std::string(k.name) == "scalar" || std::string(k.name) == "avx2";
    CHECK(known);
}
