// kernels_avx2.cpp - AVX2 backend. Compiled with -mavx2 (no FMA: fused ops
// would round differently from the scalar reference and break bit equality).
#include "scanstat/kernels.hpp"

#if defined(SCANSTAT_HAVE_AVX2)

#include <immintrin.h>

#include <limits>

namespace scanstat::kernels {
namespace avx2 {

void add(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void acc(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i,
                         _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
    for (; i < n; ++i) dst[i] += src[i];
}

void diff(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void combine4(double* dst, const double* pp, const double* pm, const double* mp,
              const double* mm, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_sub_pd(_mm256_loadu_pd(pp + i), _mm256_loadu_pd(pm + i));
        v = _mm256_sub_pd(v, _mm256_loadu_pd(mp + i));
        v = _mm256_add_pd(v, _mm256_loadu_pd(mm + i));
        _mm256_storeu_pd(dst + i, v);
    }
    for (; i < n; ++i) dst[i] = ((pp[i] - pm[i]) - mp[i]) + mm[i];
}

void pair_sum(double* dst, const double* src, std::size_t n_out) {
    std::size_t i = 0;
    for (; i + 4 <= n_out; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(src + 2 * i);      // a0 a1 a2 a3
        const __m256d v1 = _mm256_loadu_pd(src + 2 * i + 4);  // a4 a5 a6 a7
        // hadd gives [a0+a1, a4+a5, a2+a3, a6+a7]; restore pair order.
        const __m256d h = _mm256_hadd_pd(v0, v1);
        _mm256_storeu_pd(dst + i, _mm256_permute4x64_pd(h, 0b11011000));
    }
    for (; i < n_out; ++i) dst[i] = src[2 * i] + src[2 * i + 1];
}

namespace {

// First index in [0, n) where hi[i] - lo[i] equals target (target is known to
// occur; the comparison reproduces the exact subtraction).
std::size_t find_first_diff(const double* hi, const double* lo, std::size_t n, double target) {
    const __m256d t = _mm256_set1_pd(target);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_sub_pd(_mm256_loadu_pd(hi + i), _mm256_loadu_pd(lo + i));
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, t, _CMP_EQ_OQ));
        if (mask) return i + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
    }
    for (; i < n; ++i)
        if (hi[i] - lo[i] == target) return i;
    return 0;
}

}  // namespace

MaxResult diff_max(const double* hi, const double* lo, std::size_t n) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), 0};
    __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        best = _mm256_max_pd(best, _mm256_sub_pd(_mm256_loadu_pd(hi + i),
                                                 _mm256_loadu_pd(lo + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double value = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] > value) value = lanes[k];
    for (std::size_t j = i; j < n; ++j) {
        const double v = hi[j] - lo[j];
        if (v > value) value = v;
    }
    return {value, find_first_diff(hi, lo, n, value)};
}

MaxResult max(const double* a, std::size_t n) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), 0};
    __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) best = _mm256_max_pd(best, _mm256_loadu_pd(a + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double value = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] > value) value = lanes[k];
    for (std::size_t j = i; j < n; ++j)
        if (a[j] > value) value = a[j];
    std::size_t index = 0;
    const __m256d t = _mm256_set1_pd(value);
    for (i = 0; i + 4 <= n; i += 4) {
        const int mask =
            _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(a + i), t, _CMP_EQ_OQ));
        if (mask) {
            index = i + static_cast<std::size_t>(__builtin_ctz(static_cast<unsigned>(mask)));
            return {value, index};
        }
    }
    for (; i < n; ++i)
        if (a[i] == value) return {value, i};
    return {value, index};
}

}  // namespace avx2

const Kernels* avx2_kernels() {
    static const Kernels k{avx2::add,      avx2::acc,      avx2::diff,
                           avx2::combine4, avx2::pair_sum, avx2::diff_max,
                           avx2::max,      "avx2"};
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &k : nullptr;
}

}  // namespace scanstat::kernels

#else

namespace scanstat::kernels {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace scanstat::kernels

#endif
