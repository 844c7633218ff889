#include "scanstat/grid.hpp"

#include <sstream>

namespace scanstat {

std::size_t checked_cell_count(std::span<const Index> dims) {
    if (dims.empty()) throw std::invalid_argument("grid must have at least one dimension");
    unsigned __int128 product = 1;
    for (const Index d : dims) {
        if (d < 1) {
            std::ostringstream msg;
            msg << "grid extent must be positive, got " << d;
            throw std::invalid_argument(msg.str());
        }
        product *= static_cast<unsigned __int128>(d);
        if (product > (std::numeric_limits<std::size_t>::max() / sizeof(double)))
            throw std::invalid_argument("grid cell count overflows addressable memory");
    }
    return static_cast<std::size_t>(product);
}

std::vector<std::size_t> row_major_strides(std::span<const Index> dims) {
    std::vector<std::size_t> strides(dims.size());
    std::size_t s = 1;
    for (std::size_t j = dims.size(); j-- > 0;) {
        strides[j] = s;
        s *= static_cast<std::size_t>(dims[j]);
    }
    return strides;
}

bool next_index(std::vector<Index>& idx, std::span<const Index> limits) {
    for (std::size_t j = idx.size(); j-- > 0;) {
        if (++idx[j] < limits[j]) return true;
        idx[j] = 0;
    }
    return false;
}

double Rect::size() const { return static_cast<double>(cells()); }

std::uint64_t Rect::cells() const {
    std::uint64_t c = 1;
    for (const Index h : shape) c *= static_cast<std::uint64_t>(h);
    return c;
}

bool Rect::fits(std::span<const Index> dims) const {
    if (anchor.size() != dims.size() || shape.size() != dims.size()) return false;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (anchor[j] < 0 || shape[j] < 1 || anchor[j] + shape[j] > dims[j]) return false;
    }
    return true;
}

void Rect::require_fits(std::span<const Index> dims) const {
    if (!fits(dims)) throw std::invalid_argument("rectangle does not fit the grid");
}

bool rect_less(const Rect& a, const Rect& b) {
    if (a.shape != b.shape) return a.shape < b.shape;
    return a.anchor < b.anchor;
}

GridField::GridField(std::vector<Index> dims)
    : dims_(std::move(dims)), data_(checked_cell_count(dims_), 0.0) {}

GridField::GridField(std::vector<Index> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    if (data_.size() != checked_cell_count(dims_))
        throw std::invalid_argument("data length does not match the grid extents");
}

std::size_t GridField::offset(std::span<const Index> idx) const {
    std::size_t off = 0;
    for (std::size_t j = 0; j < dims_.size(); ++j)
        off = off * static_cast<std::size_t>(dims_[j]) + static_cast<std::size_t>(idx[j]);
    return off;
}

}  // namespace scanstat
