// kernels.cpp - scalar reference backend and runtime dispatch.
#include "scanstat/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

namespace scanstat::kernels {

namespace scalar {

void add(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void acc(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void diff(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void combine4(double* dst, const double* pp, const double* pm, const double* mp,
              const double* mm, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = ((pp[i] - pm[i]) - mp[i]) + mm[i];
}

void pair_sum(double* dst, const double* src, std::size_t n_out) {
    for (std::size_t i = 0; i < n_out; ++i) dst[i] = src[2 * i] + src[2 * i + 1];
}

MaxResult diff_max(const double* hi, const double* lo, std::size_t n) {
    MaxResult r{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double v = hi[i] - lo[i];
        if (v > r.value) {
            r.value = v;
            r.index = i;
        }
    }
    return r;
}

MaxResult max(const double* a, std::size_t n) {
    MaxResult r{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] > r.value) {
            r.value = a[i];
            r.index = i;
        }
    }
    return r;
}

}  // namespace scalar

const Kernels& scalar_kernels() {
    static const Kernels k{scalar::add,      scalar::acc,      scalar::diff,
                           scalar::combine4, scalar::pair_sum, scalar::diff_max,
                           scalar::max,      "scalar"};
    return k;
}

namespace {

const Kernels& select() {
    if (const char* force = std::getenv("SCANSTAT_SIMD")) {
        if (std::strcmp(force, "scalar") == 0) return scalar_kernels();
        if (std::strcmp(force, "avx2") == 0) {
            if (const Kernels* k = avx2_kernels()) return *k;
            return scalar_kernels();
        }
    }
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
}

}  // namespace

const Kernels& active() {
    static const Kernels& k = select();
    return k;
}

}  // namespace scanstat::kernels
