// field.hpp - Gaussian field simulation, signal injection, and exact boxcar
// sums via d-dimensional prefix-sum tables.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scanstat/grid.hpp"

namespace scanstat {

/// Deterministic iid standard-normal field. Identical (dims, seed) give a
/// bit-identical field on a given build; see rng.hpp for the generator and
/// normal transform.
GridField white_noise(std::vector<Index> dims, std::uint64_t seed);

/// A rectangle of elevated mean: mu / sqrt(|rect|) is added to every cell of
/// `rect`, so the Z-score of the field over `rect` rises by exactly mu.
struct SignalSpec {
    Rect rect;
    double mu = 0.0;
};

GridField inject_signal(const GridField& field, const SignalSpec& spec);

/// Inclusive d-dimensional prefix sums with a zero border: cum has extents
/// dims[j] + 1 and cum[i] = sum of all cells strictly below i per axis.
/// Any rectangle sum is 2^d table lookups.
class PrefixSumTable {
public:
    explicit PrefixSumTable(const GridField& field);

    const std::vector<Index>& dims() const { return dims_; }
    const std::vector<Index>& cum_dims() const { return cdims_; }
    int dim() const { return static_cast<int>(dims_.size()); }
    std::span<const double> cum() const { return cum_; }
    const std::vector<std::size_t>& cum_strides() const { return cstrides_; }

    double rect_sum(const Rect& rect) const;
    double zscore(const Rect& rect) const;

    /// Field of Z-scores for every anchor of `shape`: output extent is
    /// dims[j] - shape[j] + 1 and entry t equals zscore(Rect{t, shape}).
    GridField zscore_field(std::span<const Index> shape) const;

private:
    std::vector<Index> dims_;
    std::vector<Index> cdims_;
    std::vector<std::size_t> cstrides_;
    std::vector<double> cum_;
};

inline PrefixSumTable prefix_sums(const GridField& field) { return PrefixSumTable(field); }
inline double rect_sum(const PrefixSumTable& t, const Rect& r) { return t.rect_sum(r); }
inline double zscore(const PrefixSumTable& t, const Rect& r) { return t.zscore(r); }
inline GridField zscore_field(const PrefixSumTable& t, std::span<const Index> shape) {
    return t.zscore_field(shape);
}

}  // namespace scanstat
