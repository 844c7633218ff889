// epsilon.hpp - the epsilon-covering machinery: the canonical metric delta,
// the dyadic pyramid, the covering enumeration, and the near-linear
// epsilon-adaptive scan.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "scanstat/field.hpp"
#include "scanstat/scan.hpp"

namespace scanstat {

/// Canonical noise-field metric between rectangles:
/// delta = sqrt(2 * (1 - |R0 ∩ R1| / sqrt(|R0| |R1|))), in [0, sqrt(2)].
double delta_metric(const Rect& r0, const Rect& r1);

/// Block-summed coarsenings dyad_a of a field with power-of-two extents:
/// level a (a_j in [0, log2 n_j]) has extent n_j / 2^{a_j} and its entry at t
/// is the sum of the 2^a-block of the base field at 2^a ∘ t. Level 0...0 is
/// the field itself; each level is built from a predecessor by pairwise
/// addition along one axis.
class DyadPyramid {
public:
    /// Build all levels with a_j <= cap_j (cap defaults to log2 n_j).
    /// Throws on non-power-of-two extents.
    static DyadPyramid build(const GridField& field, std::span<const int> cap = {},
                             std::uint64_t* op_count = nullptr);

    const GridField& level(std::span<const int> a) const;
    const std::vector<int>& max_level() const { return cap_; }
    int dim() const { return static_cast<int>(cap_.size()); }

private:
    DyadPyramid() = default;
    std::vector<int> cap_;
    std::vector<Index> base_dims_;
    std::map<std::vector<int>, GridField> levels_;
};

/// Loop bounds of the covering: scales a in [a_lo, a_hi], dyadic multiples
/// f in [1, f_max]. Requires eps^2 * h_lo >= 8d. The covering itself takes
/// every f >= 1; the snap construction that certifies it only ever produces
/// f >= 4d/eps^2 - 1/2, so the scan restricts its loop to f_scan_lo without
/// losing the covering guarantee.
struct CoveringParams {
    double eps = 0.0;
    int a_lo = 0;
    int a_hi = 0;
    Index f_max = 0;
    Index f_scan_lo = 1;

    static CoveringParams make(double eps, ShapeRange range, int d, Index n);
};

/// One covering element: the rectangle with anchor 2^a ∘ t and shape 2^a ∘ f.
struct CoveringElement {
    std::vector<int> a;
    std::vector<Index> f;
    std::vector<Index> t;

    Rect rect() const;
};

/// Visit every covering element (fitting anchors only), lexicographic in
/// (a, f, t).
void for_each_covering_element(Index n, int d, const CoveringParams& params,
                               const std::function<void(const CoveringElement&)>& visit);

std::uint64_t covering_size(Index n, int d, const CoveringParams& params);

/// Monte Carlo check of the covering property: samples random rectangles with
/// shapes in [h_lo, h_hi]^d, snaps each to nearby covering elements (nearest
/// dyadic multiples per axis), and returns the largest of the per-trial
/// minimum delta distances. The covering property holds when this is <= eps.
double covering_verify(Index n, int d, ShapeRange range, const CoveringParams& params,
                       int trials, std::uint64_t seed);

struct EpsScanResult {
    ScanOutcome outcome;            // kind "epsilon"; per_shape has one record per (a, f)
    std::uint64_t op_count = 0;     // pyramid cells + prefix cells + anchor evaluations
    std::int64_t flagged_shapes = 0;  // scanned shapes outside [h_lo, h_hi]^d
};

/// Algorithm: build the pyramid up to a_hi, then for every scale a in
/// [a_lo, a_hi]^d and every f in [1, f_max]^d scan the level with shape f;
/// the window sum at level anchor t equals the base-field window sum of shape
/// 2^a ∘ f at anchor 2^a ∘ t, so s_hat = max_t sum / sqrt(prod f_j 2^{a_j}) is
/// an exact Z-score. P-values use the adaptive centering at shape 2^a ∘ f,
/// clamped (and flagged) when that shape leaves [h_lo, h_hi]^d.
EpsScanResult epsilon_adaptive_scan(const GridField& field, ShapeRange range, double eps,
                                    const ScanOptions& opt = {});

}  // namespace scanstat
