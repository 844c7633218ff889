// grid.hpp - d-dimensional grid fields and axis-aligned rectangles.
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scanstat {

using Index = std::int64_t;

/// Product of extents with overflow/zero checking. Throws std::invalid_argument
/// on an empty vector, a non-positive extent, or a product that cannot be
/// addressed in memory.
std::size_t checked_cell_count(std::span<const Index> dims);

/// Row-major strides (last axis contiguous).
std::vector<std::size_t> row_major_strides(std::span<const Index> dims);

/// Lexicographic odometer over the box [0, limits). Returns false after the
/// last index has been visited. `idx` must start at all zeros.
bool next_index(std::vector<Index>& idx, std::span<const Index> limits);

/// An axis-aligned rectangle of grid cells: `shape[j]` cells along axis j
/// starting at the 0-based cell `anchor[j]`.
struct Rect {
    std::vector<Index> anchor;
    std::vector<Index> shape;

    int dim() const { return static_cast<int>(shape.size()); }

    /// Number of cells, as an exact double (desk-scale sizes are < 2^53).
    double size() const;
    std::uint64_t cells() const;

    bool fits(std::span<const Index> dims) const;
    void require_fits(std::span<const Index> dims) const;

    bool operator==(const Rect&) const = default;
};

/// Lexicographic (shape, anchor) order used for deterministic tie-breaking.
bool rect_less(const Rect& a, const Rect& b);

/// Dense d-dimensional array of doubles, row-major.
class GridField {
public:
    explicit GridField(std::vector<Index> dims);
    GridField(std::vector<Index> dims, std::vector<double> data);

    int dim() const { return static_cast<int>(dims_.size()); }
    const std::vector<Index>& dims() const { return dims_; }
    std::size_t cell_count() const { return data_.size(); }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    std::size_t offset(std::span<const Index> idx) const;
    double at(std::span<const Index> idx) const { return data_[offset(idx)]; }
    double& at(std::span<const Index> idx) { return data_[offset(idx)]; }

    bool operator==(const GridField&) const = default;

private:
    std::vector<Index> dims_;
    std::vector<double> data_;
};

}  // namespace scanstat
