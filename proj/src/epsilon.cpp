#include "scanstat/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "scanstat/kernels.hpp"
#include "scanstat/rng.hpp"

namespace scanstat {

double delta_metric(const Rect& r0, const Rect& r1) {
    if (r0.dim() != r1.dim() || r0.anchor.size() != r0.shape.size() ||
        r1.anchor.size() != r1.shape.size())
        throw std::invalid_argument("delta_metric requires rectangles of equal dimension");
    double overlap = 1.0;
    for (int j = 0; j < r0.dim(); ++j) {
        const Index lo = std::max(r0.anchor[j], r1.anchor[j]);
        const Index hi = std::min(r0.anchor[j] + r0.shape[j], r1.anchor[j] + r1.shape[j]);
        if (hi <= lo) return std::numbers::sqrt2;
        overlap *= static_cast<double>(hi - lo);
    }
    const double d2 = 2.0 * (1.0 - overlap / std::sqrt(r0.size() * r1.size()));
    return std::sqrt(std::max(0.0, d2));
}

namespace {

int log2_exact(Index n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw std::invalid_argument("extent must be a power of two for the dyadic pyramid");
    int l = 0;
    while ((Index{1} << l) < n) ++l;
    return l;
}

}  // namespace

DyadPyramid DyadPyramid::build(const GridField& field, std::span<const int> cap,
                               std::uint64_t* op_count) {
    const int d = field.dim();
    DyadPyramid pyr;
    pyr.base_dims_ = field.dims();
    pyr.cap_.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const int full = log2_exact(field.dims()[j]);
        pyr.cap_[j] = cap.empty() ? full : std::min(cap[j], full);
        if (!cap.empty() && cap[j] < 0) throw std::invalid_argument("negative pyramid cap");
    }

    const auto& k = kernels::active();
    std::vector<Index> limits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) limits[j] = pyr.cap_[j] + 1;

    std::vector<Index> a_idx(static_cast<std::size_t>(d), 0);
    do {
        std::vector<int> a(a_idx.begin(), a_idx.end());
        if (std::all_of(a.begin(), a.end(), [](int x) { return x == 0; })) {
            pyr.levels_.emplace(a, field);
            if (op_count) *op_count += field.cell_count();
            continue;
        }
        // Reduce along the first axis with a positive scale; that predecessor
        // is lexicographically earlier and already built.
        int axis = 0;
        while (a[static_cast<std::size_t>(axis)] == 0) ++axis;
        std::vector<int> pred = a;
        --pred[static_cast<std::size_t>(axis)];
        const GridField& src = pyr.levels_.at(pred);

        std::vector<Index> out_dims(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) out_dims[j] = pyr.base_dims_[j] >> a[static_cast<std::size_t>(j)];
        GridField dst(out_dims);

        std::size_t tail = 1;
        for (int j = axis + 1; j < d; ++j) tail *= static_cast<std::size_t>(src.dims()[j]);
        std::size_t head = 1;
        for (int j = 0; j < axis; ++j) head *= static_cast<std::size_t>(out_dims[j]);
        const Index pairs = out_dims[axis];

        const double* s = src.data().data();
        double* t = dst.data().data();
        for (std::size_t hblock = 0; hblock < head; ++hblock) {
            const double* sb = s + hblock * static_cast<std::size_t>(2 * pairs) * tail;
            double* tb = t + hblock * static_cast<std::size_t>(pairs) * tail;
            if (axis == d - 1) {
                k.pair_sum(tb, sb, static_cast<std::size_t>(pairs));
            } else {
                for (Index i = 0; i < pairs; ++i)
                    k.add(tb + static_cast<std::size_t>(i) * tail,
                          sb + static_cast<std::size_t>(2 * i) * tail,
                          sb + static_cast<std::size_t>(2 * i + 1) * tail, tail);
            }
        }
        if (op_count) *op_count += dst.cell_count();
        pyr.levels_.emplace(std::move(a), std::move(dst));
    } while (next_index(a_idx, limits));
    return pyr;
}

const GridField& DyadPyramid::level(std::span<const int> a) const {
    const std::vector<int> key(a.begin(), a.end());
    const auto it = levels_.find(key);
    if (it == levels_.end()) throw std::invalid_argument("pyramid level not materialized");
    return it->second;
}

CoveringParams CoveringParams::make(double eps, ShapeRange range, int d, Index n) {
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (range.h_lo < 1 || range.h_lo > range.h_hi)
        throw std::invalid_argument("shape range requires 1 <= h_lo <= h_hi");
    const double dd = static_cast<double>(d);
    if (eps * eps * static_cast<double>(range.h_lo) < 8.0 * dd - 1e-9) {
        std::ostringstream msg;
        msg << "eps^2 * h_lo = " << eps * eps * static_cast<double>(range.h_lo)
            << " violates the requirement eps^2 * h_lo >= 8d = " << 8.0 * dd;
        throw std::invalid_argument(msg.str());
    }
    const int log2_n = log2_exact(n);
    CoveringParams p;
    p.eps = eps;
    p.a_lo = static_cast<int>(
        std::floor(std::log2(eps * eps * static_cast<double>(range.h_lo) / (4.0 * dd))));
    p.a_hi = static_cast<int>(
        std::ceil(std::log2(eps * eps * static_cast<double>(range.h_hi) / (4.0 * dd))));
    p.a_hi = std::min(p.a_hi, log2_n);
    p.a_lo = std::min(p.a_lo, p.a_hi);
    p.f_max = static_cast<Index>(std::ceil(8.0 * dd / (eps * eps)));
    p.f_scan_lo = std::max<Index>(
        1, static_cast<Index>(std::ceil(4.0 * dd / (eps * eps) - 0.5)));
    p.f_scan_lo = std::min(p.f_scan_lo, p.f_max);
    return p;
}

Rect CoveringElement::rect() const {
    Rect r;
    r.anchor.resize(t.size());
    r.shape.resize(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        r.anchor[j] = t[j] << a[j];
        r.shape[j] = f[j] << a[j];
    }
    return r;
}

void for_each_covering_element(Index n, int d, const CoveringParams& params,
                               const std::function<void(const CoveringElement&)>& visit) {
    log2_exact(n);
    const Index a_span = params.a_hi - params.a_lo + 1;
    std::vector<Index> a_idx(static_cast<std::size_t>(d), 0);
    const std::vector<Index> a_limits(static_cast<std::size_t>(d), a_span);
    CoveringElement el;
    el.a.resize(static_cast<std::size_t>(d));
    el.f.resize(static_cast<std::size_t>(d));
    el.t.resize(static_cast<std::size_t>(d));
    do {
        std::vector<Index> level_dims(static_cast<std::size_t>(d));
        std::vector<Index> f_limits(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            el.a[static_cast<std::size_t>(j)] =
                params.a_lo + static_cast<int>(a_idx[static_cast<std::size_t>(j)]);
            level_dims[static_cast<std::size_t>(j)] = n >> el.a[static_cast<std::size_t>(j)];
            f_limits[static_cast<std::size_t>(j)] =
                std::min(params.f_max, level_dims[static_cast<std::size_t>(j)]);
        }
        std::vector<Index> f_idx(static_cast<std::size_t>(d), 0);
        do {
            std::vector<Index> t_limits(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j) {
                el.f[static_cast<std::size_t>(j)] = f_idx[static_cast<std::size_t>(j)] + 1;
                t_limits[static_cast<std::size_t>(j)] =
                    level_dims[static_cast<std::size_t>(j)] - el.f[static_cast<std::size_t>(j)] + 1;
            }
            std::vector<Index> t_idx(static_cast<std::size_t>(d), 0);
            do {
                for (int j = 0; j < d; ++j)
                    el.t[static_cast<std::size_t>(j)] = t_idx[static_cast<std::size_t>(j)];
                visit(el);
            } while (next_index(t_idx, t_limits));
        } while (next_index(f_idx, f_limits));
    } while (next_index(a_idx, a_limits));
}

std::uint64_t covering_size(Index n, int d, const CoveringParams& params) {
    log2_exact(n);
    std::uint64_t total = 0;
    const Index a_span = params.a_hi - params.a_lo + 1;
    std::vector<Index> a_idx(static_cast<std::size_t>(d), 0);
    const std::vector<Index> a_limits(static_cast<std::size_t>(d), a_span);
    do {
        // Per axis: sum over f in [1, min(f_max, m)] of (m - f + 1) anchors,
        // i.e. fm*m - fm*(fm-1)/2.
        std::uint64_t per_a = 1;
        for (int j = 0; j < d; ++j) {
            const Index m = n >> (params.a_lo + static_cast<int>(a_idx[static_cast<std::size_t>(j)]));
            const std::uint64_t fm = static_cast<std::uint64_t>(std::min(params.f_max, m));
            per_a *= fm * static_cast<std::uint64_t>(m) - fm * (fm - 1) / 2;
        }
        total += per_a;
    } while (next_index(a_idx, a_limits));
    return total;
}

double covering_verify(Index n, int d, ShapeRange range, const CoveringParams& params,
                       int trials, std::uint64_t seed) {
    log2_exact(n);
    if (range.h_hi > n) throw std::invalid_argument("h_hi exceeds the grid");
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    rng::SplitMix64 gen(seed);
    double worst = 0.0;

    Rect sample;
    sample.anchor.resize(static_cast<std::size_t>(d));
    sample.shape.resize(static_cast<std::size_t>(d));
    for (int trial = 0; trial < trials; ++trial) {
        for (int j = 0; j < d; ++j) {
            sample.shape[static_cast<std::size_t>(j)] =
                range.h_lo + static_cast<Index>(gen.next_below(
                                 static_cast<std::uint64_t>(range.h_hi - range.h_lo + 1)));
            sample.anchor[static_cast<std::size_t>(j)] = static_cast<Index>(
                gen.next_below(static_cast<std::uint64_t>(n - sample.shape[static_cast<std::size_t>(j)] + 1)));
        }
        // Snap to the covering as in the covering construction: per axis pick
        // the scale from the shape, then the nearest dyadic multiples for the
        // extent and the anchor (both roundings tried).
        double best = std::numeric_limits<double>::infinity();
        std::vector<Index> blocks(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            const double hj = static_cast<double>(sample.shape[static_cast<std::size_t>(j)]);
            int aj = static_cast<int>(
                std::floor(std::log2(hj * params.eps * params.eps / (4.0 * d))));
            aj = std::clamp(aj, params.a_lo, params.a_hi);
            blocks[static_cast<std::size_t>(j)] = Index{1} << aj;
        }
        std::vector<Index> choice(static_cast<std::size_t>(d), 0);
        const std::vector<Index> choice_limits(static_cast<std::size_t>(d), 4);
        Rect cand;
        cand.anchor.resize(static_cast<std::size_t>(d));
        cand.shape.resize(static_cast<std::size_t>(d));
        do {
            bool ok = true;
            for (int j = 0; j < d && ok; ++j) {
                const Index b = blocks[static_cast<std::size_t>(j)];
                const Index h = sample.shape[static_cast<std::size_t>(j)];
                const Index t = sample.anchor[static_cast<std::size_t>(j)];
                const bool g_up = choice[static_cast<std::size_t>(j)] & 1;
                const bool s_up = choice[static_cast<std::size_t>(j)] & 2;
                Index g = (h / b) * b + (g_up ? b : 0);
                if (g == 0) g = b;
                const Index f = g / b;
                if (f < 1 || f > params.f_max || g > n) {
                    ok = false;
                    break;
                }
                Index s = (t / b) * b + (s_up ? b : 0);
                s = std::min(s, n - g);  // n and g are multiples of b
                if (s < 0) {
                    ok = false;
                    break;
                }
                cand.shape[static_cast<std::size_t>(j)] = g;
                cand.anchor[static_cast<std::size_t>(j)] = s;
            }
            if (ok) best = std::min(best, delta_metric(sample, cand));
        } while (next_index(choice, choice_limits));
        worst = std::max(worst, best);
    }
    return worst;
}

EpsScanResult epsilon_adaptive_scan(const GridField& field, ShapeRange range, double eps,
                                    const ScanOptions& opt) {
    const Index n = require_square(field);
    const int d = field.dim();
    const CoveringParams params = CoveringParams::make(eps, range, d, n);
    const ScanFamily family = ScanFamily::adaptive(n, d, range.h_lo, range.h_hi);

    EpsScanResult result;
    result.outcome.kind = "epsilon";
    {
        std::ostringstream note;
        note << "covering: a in [" << params.a_lo << ", " << params.a_hi << "], f in ["
             << params.f_scan_lo << ", " << params.f_max << "]";
        result.outcome.warnings.push_back(note.str());
    }

    const std::vector<int> cap(static_cast<std::size_t>(d), params.a_hi);
    const DyadPyramid pyramid = DyadPyramid::build(field, cap, &result.op_count);

    double best_tau = -std::numeric_limits<double>::infinity();
    Rect best_rect;
    double best_z = 0.0;

    std::vector<Index> a_idx(static_cast<std::size_t>(d), 0);
    const std::vector<Index> a_limits(static_cast<std::size_t>(d),
                                      static_cast<Index>(params.a_hi - params.a_lo + 1));
    std::vector<int> a(static_cast<std::size_t>(d));
    do {
        for (int j = 0; j < d; ++j)
            a[static_cast<std::size_t>(j)] =
                params.a_lo + static_cast<int>(a_idx[static_cast<std::size_t>(j)]);
        const GridField& level = pyramid.level(a);
        const auto& ldims = level.dims();

        // The f loop starts at the smallest multiple the covering construction
        // can emit; anything below never represents an in-range rectangle.
        std::vector<Index> f(static_cast<std::size_t>(d), 0);
        std::vector<Index> f_limits(static_cast<std::size_t>(d));
        bool level_scannable = true;
        for (int j = 0; j < d; ++j) {
            f_limits[static_cast<std::size_t>(j)] =
                std::min(params.f_max, ldims[static_cast<std::size_t>(j)]) - params.f_scan_lo + 1;
            if (f_limits[static_cast<std::size_t>(j)] < 1) level_scannable = false;
        }
        if (!level_scannable) continue;

        const PrefixSumTable table(level);
        result.op_count += table.cum().size();
        double block_size = 1.0;
        for (int j = 0; j < d; ++j)
            block_size *= static_cast<double>(Index{1} << a[static_cast<std::size_t>(j)]);
        std::vector<Index> f_shape(static_cast<std::size_t>(d));
        do {
            std::uint64_t anchors = 1;
            for (int j = 0; j < d; ++j) {
                f_shape[static_cast<std::size_t>(j)] =
                    f[static_cast<std::size_t>(j)] + params.f_scan_lo;
                anchors *= static_cast<std::uint64_t>(ldims[static_cast<std::size_t>(j)] -
                                                      f_shape[static_cast<std::size_t>(j)] + 1);
            }
            result.op_count += anchors;

            double max_sum = 0.0;
            std::vector<Index> level_anchor;
            sweep_shapes(table, f_shape, f_shape,
                         [&](std::span<const Index> shape, double sum, std::span<const Index> t) {
                             (void)shape;
                             max_sum = sum;
                             level_anchor.assign(t.begin(), t.end());
                         },
                         1);

            double f_cells = 1.0;
            for (const Index fj : f_shape) f_cells *= static_cast<double>(fj);
            const double z = max_sum / std::sqrt(f_cells * block_size);

            PerShapeRecord rec;
            rec.shape.resize(static_cast<std::size_t>(d));
            rec.anchor.resize(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j) {
                rec.shape[static_cast<std::size_t>(j)] = f_shape[static_cast<std::size_t>(j)]
                                                         << a[static_cast<std::size_t>(j)];
                rec.anchor[static_cast<std::size_t>(j)] = level_anchor[static_cast<std::size_t>(j)]
                                                          << a[static_cast<std::size_t>(j)];
            }
            bool clamped = false;
            const CriticalParams ph = centering(family, rec.shape, &clamped);
            rec.max_z = z;
            rec.v = ph.v;
            rec.tau_hat = tau_hat(ph, z);
            rec.clamped = clamped;
            if (clamped) ++result.flagged_shapes;

            Rect cand{rec.anchor, rec.shape};
            if (rec.tau_hat > best_tau ||
                (rec.tau_hat == best_tau && rect_less(cand, best_rect))) {
                best_tau = rec.tau_hat;
                best_rect = std::move(cand);
                best_z = z;
            }
            if (opt.keep_per_shape) result.outcome.per_shape.push_back(std::move(rec));
        } while (next_index(f, f_limits));
    } while (next_index(a_idx, a_limits));

    if (static_cast<double>(range.h_lo) <= std::log(static_cast<double>(n)))
        result.outcome.warnings.push_back("h_lo <= log(n): outside the asymptotic regime");

    result.outcome.stat = best_z;
    result.outcome.tau_hat = best_tau;
    result.outcome.pvalue = alpha_from_tau(best_tau);
    result.outcome.best_rect = std::move(best_rect);
    return result;
}

}  // namespace scanstat
