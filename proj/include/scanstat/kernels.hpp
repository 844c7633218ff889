// kernels.hpp - flat-array arithmetic primitives with runtime SIMD dispatch.
//
// Every backend computes bit-identical results: elementwise operations apply
// the same rounding per element, pair_sum adds each pair in the same order,
// and the max kernels return the exact maximum together with the FIRST index
// attaining it. Backends are therefore interchangeable and equivalence-tested
// against the scalar reference.
#pragma once

#include <cstddef>

namespace scanstat::kernels {

struct MaxResult {
    double value;       // -inf when n == 0
    std::size_t index;  // first index attaining value; 0 when n == 0
};

struct Kernels {
    // dst[i] = a[i] + b[i]
    void (*add)(double* dst, const double* a, const double* b, std::size_t n);
    // dst[i] += src[i]
    void (*acc)(double* dst, const double* src, std::size_t n);
    // dst[i] = a[i] - b[i]
    void (*diff)(double* dst, const double* a, const double* b, std::size_t n);
    // dst[i] = ((pp[i] - pm[i]) - mp[i]) + mm[i]   (fixed association order)
    void (*combine4)(double* dst, const double* pp, const double* pm,
                     const double* mp, const double* mm, std::size_t n);
    // dst[i] = src[2i] + src[2i+1], i < n_out
    void (*pair_sum)(double* dst, const double* src, std::size_t n_out);
    // max over i of (hi[i] - lo[i]), first index
    MaxResult (*diff_max)(const double* hi, const double* lo, std::size_t n);
    // max over i of a[i], first index
    MaxResult (*max)(const double* a, std::size_t n);
    const char* name;
};

/// Scalar reference backend. Always available.
const Kernels& scalar_kernels();

/// AVX2 backend, or nullptr when not compiled in or not supported by the CPU.
const Kernels* avx2_kernels();

/// Backend selected at startup: the widest supported one, unless the
/// environment variable SCANSTAT_SIMD forces "scalar" or "avx2".
const Kernels& active();

}  // namespace scanstat::kernels
