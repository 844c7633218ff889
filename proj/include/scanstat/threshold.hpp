// threshold.hpp - closed-form critical values and P-values for the scan tests.
//
// Every test family shares the same Gumbel link between the level alpha and
// the threshold offset tau, and a critical value of the form
//
//     u(tau) = v + (e * log(v) + kappa + tau) / v
//
// with family-specific centering v, log exponent e, and constant kappa:
//
//   oracle       v = sqrt(2 * sum_j log(n / h*_j))            e = 2d-1, kappa = -log(sqrt(2*pi))
//   multiscale   v = sqrt(2 * d * log(n / h_lo))              e = 4d-1, kappa = -log(4^d * sqrt(2*pi))
//   adaptive     v = sqrt(2 * sum_j log[(n/h_j)*(1+log(h_j/h_lo))^2]), e/kappa as multiscale
//
// u is strictly increasing in tau, so the P-value of an observed score z is
// the closed-form inverse: tau_hat = v*(z - v) - e*log(v) - kappa, followed by
// alpha = 1 - exp(-exp(-tau_hat)).
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scanstat/grid.hpp"

namespace scanstat {

enum class ScanKind { oracle, multiscale, adaptive };

const char* to_string(ScanKind kind);

/// Which test is run and with which shape parameters. Construct through the
/// named factories; they validate 1 <= h_lo <= h_hi <= floor(n/e) for the
/// range-based kinds and h*_j in [1, n] for the oracle.
struct ScanFamily {
    ScanKind kind;
    Index n = 0;
    int d = 0;
    Index h_lo = 1;
    Index h_hi = 1;
    std::vector<Index> oracle_shape;  // set iff kind == oracle

    static ScanFamily oracle(Index n, int d, std::vector<Index> h_star);
    static ScanFamily multiscale(Index n, int d, Index h_lo, Index h_hi);
    static ScanFamily adaptive(Index n, int d, Index h_lo, Index h_hi);
};

/// Largest h_hi admitted for grid side n (the n/e bound, floored).
Index max_h_hi(Index n);

struct CriticalParams {
    double v = 0.0;
    double log_exponent = 0.0;
    double kappa = 0.0;
};

/// tau = -log(-log(1 - alpha)); strictly decreasing. alpha must be in (0,1).
double tau_from_alpha(double alpha);

/// alpha = 1 - exp(-exp(-tau)), evaluated expm1-style so small tails do not
/// underflow; the result is clamped into (0,1).
double alpha_from_tau(double tau);

/// The (v, exponent, kappa) triple for `family` evaluated at `shape`.
/// Oracle and multiscale ignore `shape` (they use h* and h_lo). For the
/// adaptive family, shapes outside [h_lo, h_hi] are admitted with the
/// log(h/h_lo) term clamped at 0 from below and n/h evaluated as-is;
/// *clamped (when non-null) reports whether the shape was out of range.
CriticalParams centering(const ScanFamily& family, std::span<const Index> shape = {},
                         bool* clamped = nullptr);

/// u = v + (e*log(v) + kappa + tau) / v.
double critical_value(const CriticalParams& params, double tau);

/// Inverse of critical_value in tau: v*(z - v) - e*log(v) - kappa.
double tau_hat(const CriticalParams& params, double z);

/// alpha_from_tau(tau_hat(params, z)); strictly decreasing in z.
double pvalue(const CriticalParams& params, double z);

/// Centering of the modified adaptive statistic: sqrt(2 * sum_j log(n/h_j)).
double modified_centering(Index n, std::span<const Index> shape);

}  // namespace scanstat
