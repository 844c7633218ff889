#include "scanstat/scan.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "scanstat/kernels.hpp"

namespace scanstat {

Index require_square(const GridField& field) {
    const auto& dims = field.dims();
    for (const Index d : dims)
        if (d != dims[0])
            throw std::invalid_argument("threshold-bearing scans require a square grid");
    return dims[0];
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ShapeMaxRecord {
    std::vector<Index> shape;
    double max_sum = kNegInf;
    std::vector<Index> anchor;
};

struct Slot {
    double max_sum = kNegInf;
    std::vector<Index> anchor;
};

// Window sums for one prefix (h_1..h_{d-1}, t_1..t_{d-1}) reduce to a single
// array D over the last-axis border grid; the sum of the window with last
// extent h at last anchor t is D[t+h] - D[t].
void build_last_axis_profile(const PrefixSumTable& table, std::span<const Index> h_prefix,
                             std::span<const Index> t_prefix, double* D) {
    const auto& k = kernels::active();
    const auto& cstrides = table.cum_strides();
    const int d = table.dim();
    const std::size_t len = static_cast<std::size_t>(table.cum_dims()[d - 1]);
    const double* cum = table.cum().data();

    auto row = [&](unsigned mask) {
        std::size_t off = 0;
        for (int j = 0; j + 1 < d; ++j) {
            const Index c = t_prefix[j] + (((mask >> j) & 1u) ? h_prefix[j] : 0);
            off += static_cast<std::size_t>(c) * cstrides[j];
        }
        return cum + off;
    };

    if (d == 2) {
        k.diff(D, row(1), row(0), len);
    } else if (d == 3) {
        k.combine4(D, row(3), row(1), row(2), row(0), len);
    } else {
        for (std::size_t i = 0; i < len; ++i) D[i] = 0.0;
        for (unsigned mask = 0; mask < (1u << (d - 1)); ++mask) {
            const double* r = row(mask);
            const int low = (d - 1) - __builtin_popcount(mask);
            const double sign = (low % 2 == 0) ? 1.0 : -1.0;
            for (std::size_t i = 0; i < len; ++i) D[i] += sign * r[i];
        }
    }
}

// Sweeps the shape-prefix indices [prefix_begin, prefix_end) of the mixed
// radix space over the first d-1 axes, emitting one record per full shape in
// lexicographic order.
void sweep_prefix_block(const PrefixSumTable& table, std::span<const Index> lo,
                        std::span<const Index> hi, std::uint64_t prefix_begin,
                        std::uint64_t prefix_end, std::vector<ShapeMaxRecord>& out) {
    const auto& k = kernels::active();
    const int d = table.dim();
    const auto& dims = table.dims();
    const Index lo_last = lo[d - 1];
    const Index hi_last = hi[d - 1];
    const std::size_t n_last = static_cast<std::size_t>(hi_last - lo_last + 1);

    std::vector<Index> radix(static_cast<std::size_t>(d - 1));
    for (int j = 0; j < d - 1; ++j) radix[j] = hi[j] - lo[j] + 1;

    std::vector<double> D(static_cast<std::size_t>(table.cum_dims()[d - 1]));
    std::vector<Slot> slots(n_last);
    std::vector<Index> h_prefix(static_cast<std::size_t>(d - 1));
    std::vector<Index> t_prefix(static_cast<std::size_t>(d - 1));
    std::vector<Index> t_limits(static_cast<std::size_t>(d - 1));

    for (std::uint64_t p = prefix_begin; p < prefix_end; ++p) {
        std::uint64_t rem = p;
        for (int j = d - 2; j >= 0; --j) {
            h_prefix[j] = lo[j] + static_cast<Index>(rem % static_cast<std::uint64_t>(radix[j]));
            rem /= static_cast<std::uint64_t>(radix[j]);
        }
        for (auto& s : slots) {
            s.max_sum = kNegInf;
            s.anchor.clear();
        }
        for (int j = 0; j < d - 1; ++j) {
            t_prefix[j] = 0;
            t_limits[j] = dims[j] - h_prefix[j] + 1;
        }
        do {
            build_last_axis_profile(table, h_prefix, t_prefix, D.data());
            for (Index h = lo_last; h <= hi_last; ++h) {
                const std::size_t anchors = static_cast<std::size_t>(dims[d - 1] - h + 1);
                const kernels::MaxResult m = k.diff_max(D.data() + h, D.data(), anchors);
                Slot& s = slots[static_cast<std::size_t>(h - lo_last)];
                if (m.value > s.max_sum) {
                    s.max_sum = m.value;
                    s.anchor.assign(t_prefix.begin(), t_prefix.end());
                    s.anchor.push_back(static_cast<Index>(m.index));
                }
            }
        } while (next_index(t_prefix, t_limits));

        for (Index h = lo_last; h <= hi_last; ++h) {
            Slot& s = slots[static_cast<std::size_t>(h - lo_last)];
            ShapeMaxRecord rec;
            rec.shape.assign(h_prefix.begin(), h_prefix.end());
            rec.shape.push_back(h);
            rec.max_sum = s.max_sum;
            rec.anchor = std::move(s.anchor);
            out.push_back(std::move(rec));
        }
    }
}

}  // namespace

void sweep_shapes(const PrefixSumTable& table, std::span<const Index> lo,
                  std::span<const Index> hi,
                  const std::function<void(std::span<const Index>, double,
                                           std::span<const Index>)>& visit,
                  int threads) {
    const int d = table.dim();
    const auto& dims = table.dims();
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
        throw std::invalid_argument("shape range dimensionality mismatch");
    for (int j = 0; j < d; ++j) {
        if (lo[j] < 1 || lo[j] > hi[j] || hi[j] > dims[j])
            throw std::invalid_argument("shape range must satisfy 1 <= lo <= hi <= dims");
    }

    if (d == 1) {
        const auto& k = kernels::active();
        const double* cum = table.cum().data();
        for (Index h = lo[0]; h <= hi[0]; ++h) {
            const std::size_t anchors = static_cast<std::size_t>(dims[0] - h + 1);
            const kernels::MaxResult m = k.diff_max(cum + h, cum, anchors);
            const Index shape[1] = {h};
            const Index anchor[1] = {static_cast<Index>(m.index)};
            visit(std::span<const Index>(shape, 1), m.value, std::span<const Index>(anchor, 1));
        }
        return;
    }

    std::uint64_t prefix_count = 1;
    for (int j = 0; j < d - 1; ++j)
        prefix_count *= static_cast<std::uint64_t>(hi[j] - lo[j] + 1);

    int workers = threads > 1 ? threads : 1;
    if (static_cast<std::uint64_t>(workers) > prefix_count)
        workers = static_cast<int>(prefix_count);

    if (workers <= 1) {
        std::vector<ShapeMaxRecord> records;
        sweep_prefix_block(table, lo, hi, 0, prefix_count, records);
        for (const auto& r : records) visit(r.shape, r.max_sum, r.anchor);
        return;
    }

    std::vector<std::vector<ShapeMaxRecord>> parts(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t begin = prefix_count * static_cast<std::uint64_t>(w) /
                                    static_cast<std::uint64_t>(workers);
        const std::uint64_t end = prefix_count * static_cast<std::uint64_t>(w + 1) /
                                  static_cast<std::uint64_t>(workers);
        pool.emplace_back([&, w, begin, end] {
            sweep_prefix_block(table, lo, hi, begin, end, parts[static_cast<std::size_t>(w)]);
        });
    }
    for (auto& t : pool) t.join();
    // Blocks cover contiguous lexicographic ranges; concatenation preserves order.
    for (const auto& part : parts)
        for (const auto& r : part) visit(r.shape, r.max_sum, r.anchor);
}

namespace {

void append_regime_warning(std::vector<std::string>& warnings, Index h_lo, Index n) {
    if (static_cast<double>(h_lo) <= std::log(static_cast<double>(n))) {
        std::ostringstream msg;
        msg << "h_lo = " << h_lo << " <= log(n) = " << std::log(static_cast<double>(n))
            << ": outside the asymptotic regime, thresholds may be conservative";
        warnings.push_back(msg.str());
    }
}

double shape_size(std::span<const Index> shape) {
    double s = 1.0;
    for (const Index h : shape) s *= static_cast<double>(h);
    return s;
}

}  // namespace

ScanOutcome oracle_scan(const GridField& field, std::vector<Index> h_star, double alpha,
                        const ScanOptions& opt) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    const Index n = require_square(field);
    const int d = field.dim();
    const ScanFamily family = ScanFamily::oracle(n, d, h_star);
    const CriticalParams params = centering(family);

    const PrefixSumTable table(field);
    ScanOutcome out;
    out.kind = "oracle";
    sweep_shapes(
        table, h_star, h_star,
        [&](std::span<const Index> shape, double max_sum, std::span<const Index> anchor) {
            out.stat = max_sum / std::sqrt(shape_size(shape));
            out.best_rect.anchor.assign(anchor.begin(), anchor.end());
            out.best_rect.shape.assign(shape.begin(), shape.end());
        },
        opt.threads);
    out.tau_hat = tau_hat(params, out.stat);
    out.pvalue = alpha_from_tau(out.tau_hat);
    return out;
}

FullScanBundle scan_bundle(const GridField& field, ShapeRange range, const ScanOptions& opt) {
    const Index n = require_square(field);
    const int d = field.dim();
    const ScanFamily fam_multi = ScanFamily::multiscale(n, d, range.h_lo, range.h_hi);
    const ScanFamily fam_adapt = ScanFamily::adaptive(n, d, range.h_lo, range.h_hi);
    const CriticalParams params_multi = centering(fam_multi);

    FullScanBundle bundle;
    bundle.multiscale.kind = "multiscale";
    bundle.adaptive.kind = "adaptive";
    append_regime_warning(bundle.multiscale.warnings, range.h_lo, n);
    append_regime_warning(bundle.adaptive.warnings, range.h_lo, n);

    double best_multi_z = kNegInf;
    double best_adapt_tau = kNegInf;
    double best_mod = kNegInf;

    const PrefixSumTable table(field);
    std::vector<Index> lo(static_cast<std::size_t>(d), range.h_lo);
    std::vector<Index> hi(static_cast<std::size_t>(d), range.h_hi);
    sweep_shapes(
        table, lo, hi,
        [&](std::span<const Index> shape, double max_sum, std::span<const Index> anchor) {
            const double z = max_sum / std::sqrt(shape_size(shape));
            if (z > best_multi_z) {
                best_multi_z = z;
                bundle.multiscale.best_rect.anchor.assign(anchor.begin(), anchor.end());
                bundle.multiscale.best_rect.shape.assign(shape.begin(), shape.end());
            }
            const CriticalParams params_h = centering(fam_adapt, shape);
            const double th = tau_hat(params_h, z);
            if (th > best_adapt_tau) {
                best_adapt_tau = th;
                bundle.adaptive.stat = z;
                bundle.adaptive.best_rect.anchor.assign(anchor.begin(), anchor.end());
                bundle.adaptive.best_rect.shape.assign(shape.begin(), shape.end());
            }
            if (opt.keep_per_shape) {
                PerShapeRecord rec;
                rec.shape.assign(shape.begin(), shape.end());
                rec.max_z = z;
                rec.anchor.assign(anchor.begin(), anchor.end());
                rec.v = params_h.v;
                rec.tau_hat = th;
                bundle.adaptive.per_shape.push_back(std::move(rec));
            }
            const double v_mod = modified_centering(n, shape);
            const double mod = (z - v_mod) * v_mod;
            if (mod > best_mod) {
                best_mod = mod;
                bundle.modified.best_rect.anchor.assign(anchor.begin(), anchor.end());
                bundle.modified.best_rect.shape.assign(shape.begin(), shape.end());
            }
        },
        opt.threads);

    bundle.multiscale.stat = best_multi_z;
    bundle.multiscale.tau_hat = tau_hat(params_multi, best_multi_z);
    bundle.multiscale.pvalue = alpha_from_tau(bundle.multiscale.tau_hat);
    bundle.adaptive.tau_hat = best_adapt_tau;
    bundle.adaptive.pvalue = alpha_from_tau(best_adapt_tau);
    bundle.modified.stat = best_mod;
    return bundle;
}

ScanOutcome multiscale_scan(const GridField& field, ShapeRange range, const ScanOptions& opt) {
    ScanOptions o = opt;
    o.keep_per_shape = false;
    return scan_bundle(field, range, o).multiscale;
}

ScanOutcome adaptive_scan(const GridField& field, ShapeRange range, const ScanOptions& opt) {
    return scan_bundle(field, range, opt).adaptive;
}

ModifiedResult modified_adaptive_stat(const GridField& field, ShapeRange range,
                                      const ScanOptions& opt) {
    ScanOptions o = opt;
    o.keep_per_shape = false;
    return scan_bundle(field, range, o).modified;
}

}  // namespace scanstat
