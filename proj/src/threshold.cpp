#include "scanstat/threshold.hpp"

#include <cmath>
#include <numbers>

namespace scanstat {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

void require_shape_dim(const ScanFamily& family, std::span<const Index> shape) {
    if (static_cast<int>(shape.size()) != family.d)
        throw std::invalid_argument("shape dimensionality does not match the scan family");
}

}  // namespace

const char* to_string(ScanKind kind) {
    switch (kind) {
        case ScanKind::oracle: return "oracle";
        case ScanKind::multiscale: return "multiscale";
        case ScanKind::adaptive: return "adaptive";
    }
    return "?";
}

Index max_h_hi(Index n) {
    return static_cast<Index>(std::floor(static_cast<double>(n) / std::numbers::e));
}

namespace {

ScanFamily make_range_family(ScanKind kind, Index n, int d, Index h_lo, Index h_hi) {
    if (n < 1 || d < 1) throw std::invalid_argument("scan family requires n >= 1, d >= 1");
    if (h_lo < 1 || h_lo > h_hi)
        throw std::invalid_argument("shape range requires 1 <= h_lo <= h_hi");
    if (h_hi > max_h_hi(n))
        throw std::invalid_argument("shape range requires h_hi <= floor(n/e)");
    ScanFamily f;
    f.kind = kind;
    f.n = n;
    f.d = d;
    f.h_lo = h_lo;
    f.h_hi = h_hi;
    return f;
}

}  // namespace

ScanFamily ScanFamily::oracle(Index n, int d, std::vector<Index> h_star) {
    if (n < 1 || d < 1) throw std::invalid_argument("scan family requires n >= 1, d >= 1");
    if (static_cast<int>(h_star.size()) != d)
        throw std::invalid_argument("oracle shape dimensionality mismatch");
    for (const Index h : h_star)
        if (h < 1 || h > n) throw std::invalid_argument("oracle shape must lie in [1, n]");
    ScanFamily f;
    f.kind = ScanKind::oracle;
    f.n = n;
    f.d = d;
    f.oracle_shape = std::move(h_star);
    return f;
}

ScanFamily ScanFamily::multiscale(Index n, int d, Index h_lo, Index h_hi) {
    return make_range_family(ScanKind::multiscale, n, d, h_lo, h_hi);
}

ScanFamily ScanFamily::adaptive(Index n, int d, Index h_lo, Index h_hi) {
    return make_range_family(ScanKind::adaptive, n, d, h_lo, h_hi);
}

double tau_from_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    // -log(-log(1 - alpha)); log1p keeps small alpha accurate.
    return -std::log(-std::log1p(-alpha));
}

double alpha_from_tau(double tau) {
    const double alpha = -std::expm1(-std::exp(-tau));
    if (alpha >= 1.0) return std::nextafter(1.0, 0.0);
    if (alpha <= 0.0) return std::numeric_limits<double>::min();
    return alpha;
}

CriticalParams centering(const ScanFamily& family, std::span<const Index> shape, bool* clamped) {
    if (clamped) *clamped = false;
    CriticalParams p;
    const double n = static_cast<double>(family.n);
    switch (family.kind) {
        case ScanKind::oracle: {
            double s = 0.0;
            for (const Index h : family.oracle_shape) s += std::log(n / static_cast<double>(h));
            p.v = std::sqrt(2.0 * s);
            p.log_exponent = 2.0 * family.d - 1.0;
            p.kappa = -kLogSqrt2Pi;
            break;
        }
        case ScanKind::multiscale: {
            p.v = std::sqrt(2.0 * family.d * std::log(n / static_cast<double>(family.h_lo)));
            p.log_exponent = 4.0 * family.d - 1.0;
            p.kappa = -(family.d * std::log(4.0) + kLogSqrt2Pi);
            break;
        }
        case ScanKind::adaptive: {
            require_shape_dim(family, shape);
            double s = 0.0;
            for (const Index h : shape) {
                if (h < 1 || h > family.n)
                    throw std::invalid_argument("adaptive centering shape must lie in [1, n]");
                if (clamped && (h < family.h_lo || h > family.h_hi)) *clamped = true;
                const double lg =
                    std::max(0.0, std::log(static_cast<double>(h) /
                                           static_cast<double>(family.h_lo)));
                const double factor = (1.0 + lg) * (1.0 + lg);
                s += std::log((n / static_cast<double>(h)) * factor);
            }
            p.v = std::sqrt(2.0 * s);
            p.log_exponent = 4.0 * family.d - 1.0;
            p.kappa = -(family.d * std::log(4.0) + kLogSqrt2Pi);
            break;
        }
    }
    if (!(p.v > 0.0))
        throw std::invalid_argument("degenerate centering v = 0 (shape equals the grid)");
    return p;
}

double critical_value(const CriticalParams& params, double tau) {
    return params.v + (params.log_exponent * std::log(params.v) + params.kappa + tau) / params.v;
}

double tau_hat(const CriticalParams& params, double z) {
    return params.v * (z - params.v) - params.log_exponent * std::log(params.v) - params.kappa;
}

double pvalue(const CriticalParams& params, double z) {
    return alpha_from_tau(tau_hat(params, z));
}

double modified_centering(Index n, std::span<const Index> shape) {
    double s = 0.0;
    for (const Index h : shape)
        s += std::log(static_cast<double>(n) / static_cast<double>(h));
    return std::sqrt(2.0 * s);
}

}  // namespace scanstat
