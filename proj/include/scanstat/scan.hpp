// scan.hpp - the full scan tests: oracle, multiscale, adaptive, and the
// modified adaptive statistic.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scanstat/field.hpp"
#include "scanstat/threshold.hpp"

namespace scanstat {

/// Shape range [h_lo, h_hi] applied to every axis.
struct ShapeRange {
    Index h_lo = 1;
    Index h_hi = 1;
};

struct PerShapeRecord {
    std::vector<Index> shape;
    double max_z = 0.0;           // best Z-score at this shape
    std::vector<Index> anchor;    // first anchor attaining it
    double v = 0.0;               // shape-dependent centering
    double tau_hat = 0.0;
    bool clamped = false;         // shape outside [h_lo, h_hi] (epsilon scan only)
};

struct ScanOutcome {
    std::string kind;
    Rect best_rect;
    double stat = 0.0;     // Z-score of best_rect
    double tau_hat = 0.0;
    double pvalue = 1.0;
    std::vector<PerShapeRecord> per_shape;  // populated by adaptive and epsilon scans
    std::vector<std::string> warnings;

    bool reject(double alpha) const { return pvalue <= alpha; }
};

struct ModifiedResult {
    double stat = 0.0;
    Rect best_rect;
};

struct ScanOptions {
    int threads = 1;            // shape-sweep workers; results are thread-count invariant
    bool keep_per_shape = true; // adaptive: drop per-shape records when false
};

/// Scan restricted to rectangles of the known shape h_star.
ScanOutcome oracle_scan(const GridField& field, std::vector<Index> h_star,
                        double alpha = 0.05, const ScanOptions& opt = {});

ScanOutcome multiscale_scan(const GridField& field, ShapeRange range,
                            const ScanOptions& opt = {});

ScanOutcome adaptive_scan(const GridField& field, ShapeRange range,
                          const ScanOptions& opt = {});

/// max_h (max_R y[R] - v_mod(h)) * v_mod(h); no closed-form P-value, calibrate
/// by Monte Carlo or permutation.
ModifiedResult modified_adaptive_stat(const GridField& field, ShapeRange range,
                                      const ScanOptions& opt = {});

/// One shape sweep serving the three range-based tests at once (the sweep
/// dominates the cost; the per-shape statistics are cheap projections).
struct FullScanBundle {
    ScanOutcome multiscale;
    ScanOutcome adaptive;
    ModifiedResult modified;
};

FullScanBundle scan_bundle(const GridField& field, ShapeRange range,
                           const ScanOptions& opt = {});

/// Per-shape maxima of window sums over every shape in [lo_j, hi_j] per axis,
/// visited in lexicographic shape order. `visit(shape, max_sum, anchor)`
/// receives the raw window sum (not the Z-score) and its first attaining
/// anchor. Exposed for the epsilon scan and for tests.
void sweep_shapes(const PrefixSumTable& table, std::span<const Index> lo,
                  std::span<const Index> hi,
                  const std::function<void(std::span<const Index>, double,
                                           std::span<const Index>)>& visit,
                  int threads = 1);

/// Square-grid side length; throws unless all dims are equal.
Index require_square(const GridField& field);

}  // namespace scanstat
