// oracles.hpp - brute-force reference computations for tests. Everything here
// walks raw cells directly and stays independent of the prefix-sum /
// pyramid / sweep code paths it is used to check.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "scanstat/grid.hpp"

namespace testref {

using scanstat::GridField;
using scanstat::Index;
using scanstat::Rect;

inline double brute_rect_sum(const GridField& field, const Rect& rect) {
    const int d = field.dim();
    std::vector<Index> idx(static_cast<std::size_t>(d), 0);
    double sum = 0.0;
    std::vector<Index> cell(static_cast<std::size_t>(d));
    do {
        for (int j = 0; j < d; ++j)
            cell[static_cast<std::size_t>(j)] =
                rect.anchor[static_cast<std::size_t>(j)] + idx[static_cast<std::size_t>(j)];
        sum += field.at(cell);
    } while (scanstat::next_index(idx, rect.shape));
    return sum;
}

inline double brute_zscore(const GridField& field, const Rect& rect) {
    return brute_rect_sum(field, rect) / std::sqrt(rect.size());
}

/// Sum of the 2^a-block at block position t (the dyadic pyramid oracle).
inline double brute_block_sum(const GridField& field, const std::vector<int>& a,
                              const std::vector<Index>& t) {
    Rect rect;
    rect.anchor.resize(a.size());
    rect.shape.resize(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        rect.shape[j] = Index{1} << a[j];
        rect.anchor[j] = t[j] << a[j];
    }
    return brute_rect_sum(field, rect);
}

/// Exhaustive maximum Z-score at one shape (anchor loop over the whole grid).
inline std::pair<double, std::vector<Index>> brute_shape_max(const GridField& field,
                                                             const std::vector<Index>& shape) {
    const int d = field.dim();
    std::vector<Index> limits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        limits[static_cast<std::size_t>(j)] =
            field.dims()[static_cast<std::size_t>(j)] - shape[static_cast<std::size_t>(j)] + 1;
    std::vector<Index> t(static_cast<std::size_t>(d), 0);
    double best = -1e300;
    std::vector<Index> best_anchor;
    do {
        const double z = brute_zscore(field, Rect{t, shape});
        if (z > best) {
            best = z;
            best_anchor = t;
        }
    } while (scanstat::next_index(t, limits));
    return {best, best_anchor};
}

inline GridField random_field(std::vector<Index> dims, unsigned seed) {
    GridField field(std::move(dims));
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : field.data()) x = normal(gen);
    return field;
}

inline Rect random_rect(const std::vector<Index>& dims, std::mt19937_64& gen) {
    Rect r;
    r.anchor.resize(dims.size());
    r.shape.resize(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) {
        std::uniform_int_distribution<Index> shape_dist(1, dims[j]);
        r.shape[j] = shape_dist(gen);
        std::uniform_int_distribution<Index> anchor_dist(0, dims[j] - r.shape[j]);
        r.anchor[j] = anchor_dist(gen);
    }
    return r;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace testref
