#include "scanstat/field.hpp"

#include <cmath>
#include <cstring>

#include "scanstat/kernels.hpp"
#include "scanstat/rng.hpp"

namespace scanstat {

GridField white_noise(std::vector<Index> dims, std::uint64_t seed) {
    GridField field(std::move(dims));
    rng::NormalStream normals(seed);
    for (double& x : field.data()) x = normals.next();
    return field;
}

GridField inject_signal(const GridField& field, const SignalSpec& spec) {
    spec.rect.require_fits(field.dims());
    if (spec.mu < 0.0) throw std::invalid_argument("signal size mu must be nonnegative");
    GridField out = field;
    const double bump = spec.mu / std::sqrt(spec.rect.size());
    const auto strides = row_major_strides(out.dims());
    const int d = out.dim();
    // Contiguous runs along the last axis.
    const Index run = spec.rect.shape[d - 1];
    std::vector<Index> limits(d > 1
                                  ? std::vector<Index>(spec.rect.shape.begin(),
                                                       spec.rect.shape.end() - 1)
                                  : std::vector<Index>{1});
    std::vector<Index> outer(limits.size(), 0);
    do {
        std::size_t base = 0;
        for (int j = 0; j + 1 < d; ++j)
            base += static_cast<std::size_t>(spec.rect.anchor[j] + outer[j]) * strides[j];
        base += static_cast<std::size_t>(spec.rect.anchor[d - 1]);
        double* row = out.data().data() + base;
        for (Index i = 0; i < run; ++i) row[i] += bump;
    } while (d > 1 && next_index(outer, limits));
    return out;
}

PrefixSumTable::PrefixSumTable(const GridField& field) : dims_(field.dims()) {
    const int d = field.dim();
    cdims_.resize(dims_.size());
    for (std::size_t j = 0; j < dims_.size(); ++j) cdims_[j] = dims_[j] + 1;
    cstrides_ = row_major_strides(cdims_);
    cum_.assign(checked_cell_count(cdims_), 0.0);

    const auto& k = kernels::active();
    const auto fstrides = row_major_strides(dims_);
    const Index run = dims_[d - 1];

    // Copy the field into the interior (offset 1 per axis), accumulating the
    // last axis on the fly.
    std::vector<Index> outer(static_cast<std::size_t>(d > 1 ? d - 1 : 1), 0);
    std::vector<Index> limits(d > 1 ? std::vector<Index>(dims_.begin(), dims_.end() - 1)
                                    : std::vector<Index>{1});
    const double* src = field.data().data();
    do {
        std::size_t fbase = 0;
        std::size_t cbase = 0;
        for (int j = 0; j + 1 < d; ++j) {
            fbase += static_cast<std::size_t>(outer[j]) * fstrides[j];
            cbase += static_cast<std::size_t>(outer[j] + 1) * cstrides_[j];
        }
        const double* in = src + fbase;
        double* row = cum_.data() + cbase;  // row[0] is the zero border
        double running = 0.0;
        for (Index i = 0; i < run; ++i) {
            running += in[i];
            row[i + 1] = running;
        }
    } while (d > 1 && next_index(outer, limits));

    // Accumulate the remaining axes, innermost runs stay contiguous.
    for (int axis = d - 2; axis >= 0; --axis) {
        std::size_t runlen = 1;
        for (int j = axis + 1; j < d; ++j) runlen *= static_cast<std::size_t>(cdims_[j]);
        std::vector<Index> head(static_cast<std::size_t>(axis > 0 ? axis : 1), 0);
        std::vector<Index> head_limits(axis > 0
                                           ? std::vector<Index>(cdims_.begin(), cdims_.begin() + axis)
                                           : std::vector<Index>{1});
        do {
            std::size_t base = 0;
            for (int j = 0; j < axis; ++j)
                base += static_cast<std::size_t>(head[j]) * cstrides_[j];
            for (Index i = 1; i < cdims_[axis]; ++i) {
                double* cur = cum_.data() + base + static_cast<std::size_t>(i) * cstrides_[axis];
                const double* prev = cur - cstrides_[axis];
                k.acc(cur, prev, runlen);
            }
        } while (axis > 0 && next_index(head, head_limits));
    }
}

double PrefixSumTable::rect_sum(const Rect& rect) const {
    rect.require_fits(dims_);
    const int d = dim();
    double sum = 0.0;
    // Inclusion-exclusion over the 2^d corners; sign is parity of the number
    // of "low" coordinates.
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        std::size_t off = 0;
        int low = 0;
        for (int j = 0; j < d; ++j) {
            const bool high = (mask >> j) & 1u;
            const Index c = high ? rect.anchor[j] + rect.shape[j] : rect.anchor[j];
            if (!high) ++low;
            off += static_cast<std::size_t>(c) * cstrides_[j];
        }
        sum += (low % 2 == 0) ? cum_[off] : -cum_[off];
    }
    return sum;
}

double PrefixSumTable::zscore(const Rect& rect) const {
    return rect_sum(rect) / std::sqrt(rect.size());
}

GridField PrefixSumTable::zscore_field(std::span<const Index> shape) const {
    const int d = dim();
    if (static_cast<int>(shape.size()) != d)
        throw std::invalid_argument("shape dimensionality mismatch");
    std::vector<Index> out_dims(static_cast<std::size_t>(d));
    double size = 1.0;
    for (int j = 0; j < d; ++j) {
        if (shape[j] < 1 || shape[j] > dims_[j])
            throw std::invalid_argument("shape exceeds the grid");
        out_dims[j] = dims_[j] - shape[j] + 1;
        size *= static_cast<double>(shape[j]);
    }
    const double inv_sqrt = 1.0 / std::sqrt(size);

    // Corner offsets relative to the anchor's cum offset, with signs.
    std::vector<std::ptrdiff_t> corner(1u << d);
    std::vector<double> sign(1u << d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        std::ptrdiff_t off = 0;
        int low = 0;
        for (int j = 0; j < d; ++j) {
            if ((mask >> j) & 1u)
                off += static_cast<std::ptrdiff_t>(shape[j]) *
                       static_cast<std::ptrdiff_t>(cstrides_[j]);
            else
                ++low;
        }
        corner[mask] = off;
        sign[mask] = (low % 2 == 0) ? 1.0 : -1.0;
    }

    GridField out(out_dims);
    std::vector<Index> t(static_cast<std::size_t>(d), 0);
    std::size_t flat = 0;
    do {
        std::size_t base = 0;
        for (int j = 0; j < d; ++j) base += static_cast<std::size_t>(t[j]) * cstrides_[j];
        double sum = 0.0;
        for (unsigned mask = 0; mask < (1u << d); ++mask)
            sum += sign[mask] * cum_[base + static_cast<std::size_t>(corner[mask])];
        out.data()[flat++] = sum * inv_sqrt;
    } while (next_index(t, out_dims));
    return out;
}

}  // namespace scanstat
