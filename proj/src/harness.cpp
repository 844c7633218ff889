#include "scanstat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "scanstat/rng.hpp"

namespace scanstat {

const char* to_string(Scanner s) {
    switch (s) {
        case Scanner::oracle: return "oracle";
        case Scanner::multiscale: return "multiscale";
        case Scanner::adaptive: return "adaptive";
        case Scanner::modified: return "modified";
        case Scanner::epsilon: return "epsilon";
    }
    return "?";
}

std::optional<Scanner> scanner_from_string(const std::string& name) {
    if (name == "oracle") return Scanner::oracle;
    if (name == "multiscale" || name == "multi") return Scanner::multiscale;
    if (name == "adaptive") return Scanner::adaptive;
    if (name == "modified") return Scanner::modified;
    if (name == "epsilon" || name == "eps") return Scanner::epsilon;
    return std::nullopt;
}

Index ExperimentConfig::effective_h_hi() const { return h_hi > 0 ? h_hi : max_h_hi(n); }

const ScannerSeries& MCResult::of(Scanner s) const {
    for (const auto& series : this->series)
        if (series.scanner == s) return series;
    throw std::invalid_argument("scanner not present in result");
}

double MCResult::rejection_rate(Scanner s, double alpha) const {
    const auto& p = of(s).pvalue;
    std::size_t rejected = 0;
    for (const double v : p)
        if (v <= alpha) ++rejected;
    return static_cast<double>(rejected) / static_cast<double>(p.size());
}

namespace {

void validate(const ExperimentConfig& config, bool alternative) {
    if (config.reps < 1) throw std::invalid_argument("reps must be positive");
    if (config.n < 1 || config.d < 1) throw std::invalid_argument("invalid grid");
    if (config.scanners.empty()) throw std::invalid_argument("no scanners selected");
    const bool needs_shape =
        alternative || std::find(config.scanners.begin(), config.scanners.end(),
                                 Scanner::oracle) != config.scanners.end();
    if (needs_shape) {
        if (static_cast<int>(config.signal_shape.size()) != config.d)
            throw std::invalid_argument("signal_shape must be set with one extent per axis");
        for (const Index h : config.signal_shape)
            if (h < 1 || h > config.n)
                throw std::invalid_argument("signal shape exceeds the grid");
    }
    if (alternative && config.mu < 0.0) throw std::invalid_argument("mu must be nonnegative");
}

bool wants(const ExperimentConfig& config, Scanner s) {
    return std::find(config.scanners.begin(), config.scanners.end(), s) != config.scanners.end();
}

MCResult run_replicates(const ExperimentConfig& config, bool alternative) {
    validate(config, alternative);
    MCResult result;
    result.config = config;
    result.alternative = alternative;
    for (const Scanner s : config.scanners) {
        ScannerSeries series;
        series.scanner = s;
        series.stat.resize(static_cast<std::size_t>(config.reps));
        series.pvalue.resize(static_cast<std::size_t>(config.reps));
        result.series.push_back(std::move(series));
    }
    if (alternative) result.injected.resize(static_cast<std::size_t>(config.reps));

    const ShapeRange range{config.h_lo, config.effective_h_hi()};
    const bool need_bundle = wants(config, Scanner::multiscale) ||
                             wants(config, Scanner::adaptive) || wants(config, Scanner::modified);
    const ScanOptions scan_opt{1, false};

    auto run_one = [&](int r) {
        GridField field =
            white_noise(std::vector<Index>(static_cast<std::size_t>(config.d), config.n),
                        rng::sub_seed(config.seed, static_cast<std::uint64_t>(r), 0));
        if (alternative) {
            rng::SplitMix64 placer(rng::sub_seed(config.seed, static_cast<std::uint64_t>(r), 1));
            Rect rect;
            rect.shape = config.signal_shape;
            rect.anchor.resize(static_cast<std::size_t>(config.d));
            for (int j = 0; j < config.d; ++j)
                rect.anchor[static_cast<std::size_t>(j)] = static_cast<Index>(placer.next_below(
                    static_cast<std::uint64_t>(config.n - rect.shape[static_cast<std::size_t>(j)] + 1)));
            result.injected[static_cast<std::size_t>(r)] = rect;
            field = inject_signal(field, SignalSpec{rect, config.mu});
        }

        auto record = [&](Scanner s, double stat, double pv) {
            for (auto& series : result.series) {
                if (series.scanner == s) {
                    series.stat[static_cast<std::size_t>(r)] = stat;
                    series.pvalue[static_cast<std::size_t>(r)] = pv;
                }
            }
        };

        if (need_bundle) {
            const FullScanBundle bundle = scan_bundle(field, range, scan_opt);
            if (wants(config, Scanner::multiscale))
                record(Scanner::multiscale, bundle.multiscale.tau_hat, bundle.multiscale.pvalue);
            if (wants(config, Scanner::adaptive))
                record(Scanner::adaptive, bundle.adaptive.tau_hat, bundle.adaptive.pvalue);
            if (wants(config, Scanner::modified))
                record(Scanner::modified, bundle.modified.stat,
                       std::numeric_limits<double>::quiet_NaN());
        }
        if (wants(config, Scanner::oracle)) {
            const ScanOutcome o = oracle_scan(field, config.signal_shape, 0.05, scan_opt);
            record(Scanner::oracle, o.tau_hat, o.pvalue);
        }
        if (wants(config, Scanner::epsilon)) {
            const EpsScanResult e = epsilon_adaptive_scan(field, range, config.eps, scan_opt);
            record(Scanner::epsilon, e.outcome.tau_hat, e.outcome.pvalue);
        }
    };

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, config.reps);
    if (threads <= 1) {
        for (int r = 0; r < config.reps; ++r) run_one(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < config.reps; r = next.fetch_add(1)) run_one(r);
            });
        }
        for (auto& t : pool) t.join();
    }
    return result;
}

}  // namespace

MCResult run_null(const ExperimentConfig& config) { return run_replicates(config, false); }

MCResult run_power(const ExperimentConfig& config) { return run_replicates(config, true); }

std::vector<RocPoint> roc_curve(std::span<const double> null_stats,
                                std::span<const double> alt_stats) {
    if (null_stats.empty() || alt_stats.empty())
        throw std::invalid_argument("roc_curve requires nonempty samples");
    std::vector<double> pooled(null_stats.begin(), null_stats.end());
    pooled.insert(pooled.end(), alt_stats.begin(), alt_stats.end());
    std::sort(pooled.begin(), pooled.end(), std::greater<>());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<double> snull(null_stats.begin(), null_stats.end());
    std::vector<double> salt(alt_stats.begin(), alt_stats.end());
    std::sort(snull.begin(), snull.end());
    std::sort(salt.begin(), salt.end());
    const auto frac_ge = [](const std::vector<double>& sorted, double threshold) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), threshold);
        return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
    };

    std::vector<RocPoint> curve;
    curve.reserve(pooled.size() + 1);
    curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    for (const double threshold : pooled)
        curve.push_back({threshold, frac_ge(snull, threshold), frac_ge(salt, threshold)});
    return curve;
}

double roc_auc(std::span<const double> null_stats, std::span<const double> alt_stats) {
    if (null_stats.empty() || alt_stats.empty())
        throw std::invalid_argument("roc_auc requires nonempty samples");
    // Mann-Whitney with midranks.
    struct Tagged {
        double value;
        bool alt;
    };
    std::vector<Tagged> all;
    all.reserve(null_stats.size() + alt_stats.size());
    for (const double v : null_stats) all.push_back({v, false});
    for (const double v : alt_stats) all.push_back({v, true});
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        return a.value < b.value;
    });
    double rank_sum_alt = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (all[k].alt) rank_sum_alt += midrank;
        i = j;
    }
    const double na = static_cast<double>(alt_stats.size());
    const double n0 = static_cast<double>(null_stats.size());
    return (rank_sum_alt - na * (na + 1.0) / 2.0) / (na * n0);
}

std::vector<std::pair<double, double>> qq_pvalues(std::span<const double> pvalues) {
    if (pvalues.empty()) throw std::invalid_argument("qq_pvalues requires nonempty input");
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> points;
    points.reserve(sorted.size());
    const double m = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        points.emplace_back((static_cast<double>(i) + 0.5) / m, sorted[i]);
    return points;
}

double calibrate_mc(std::span<const double> null_stats, double target_alpha) {
    if (!(target_alpha > 0.0) || !(target_alpha < 1.0))
        throw std::invalid_argument("target_alpha must lie in (0, 1)");
    const double reps = static_cast<double>(null_stats.size());
    if (reps * target_alpha < 1.0)
        throw std::invalid_argument("need reps >= 1/target_alpha for calibration");
    std::vector<double> sorted(null_stats.begin(), null_stats.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t k = static_cast<std::size_t>(std::floor(reps * target_alpha));
    // Rejecting when stat > sorted[k] leaves at most k of the reps above.
    return sorted[std::min(k, sorted.size() - 1)];
}

double permutation_pvalue(const GridField& field, ShapeRange range, int permutations,
                          std::uint64_t seed) {
    if (permutations < 1) throw std::invalid_argument("permutations must be positive");
    const ScanOptions opt{1, false};
    const double observed = adaptive_scan(field, range, opt).tau_hat;
    std::vector<double> cells(field.data().begin(), field.data().end());
    int at_least = 0;
    for (int p = 0; p < permutations; ++p) {
        rng::SplitMix64 gen(rng::sub_seed(seed, static_cast<std::uint64_t>(p), 2));
        std::vector<double> shuffled = cells;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[gen.next_below(i)]);
        const GridField perm_field(field.dims(), std::move(shuffled));
        if (adaptive_scan(perm_field, range, opt).tau_hat >= observed) ++at_least;
    }
    return (1.0 + at_least) / (1.0 + permutations);
}

std::vector<TimingRecord> bench_epsilon(const ExperimentConfig& config,
                                        std::span<const double> eps_list) {
    if (eps_list.empty()) throw std::invalid_argument("eps list must be nonempty");
    validate(config, false);
    const ShapeRange range{config.h_lo, config.effective_h_hi()};
    const ScanOptions opt{1, false};
    std::vector<TimingRecord> records;
    for (const double eps : eps_list) {
        TimingRecord rec;
        rec.eps = eps;
        std::vector<double> seconds;
        seconds.reserve(static_cast<std::size_t>(config.reps));
        for (int r = 0; r < config.reps; ++r) {
            const GridField field =
                white_noise(std::vector<Index>(static_cast<std::size_t>(config.d), config.n),
                            rng::sub_seed(config.seed, static_cast<std::uint64_t>(r), 0));
            const auto t0 = std::chrono::steady_clock::now();
            const EpsScanResult res = epsilon_adaptive_scan(field, range, eps, opt);
            const auto t1 = std::chrono::steady_clock::now();
            seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
            rec.op_count = res.op_count;  // data-independent: same for every rep
        }
        std::sort(seconds.begin(), seconds.end());
        const auto quantile = [&](double q) {
            const double pos = q * (static_cast<double>(seconds.size()) - 1.0);
            const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, seconds.size() - 1);
            const double w = pos - std::floor(pos);
            return (1.0 - w) * seconds[lo] + w * seconds[hi];
        };
        rec.median_s = quantile(0.5);
        rec.p5_s = quantile(0.05);
        rec.p95_s = quantile(0.95);
        rec.min_s = seconds.front();
        rec.max_s = seconds.back();
        records.push_back(rec);
    }
    return records;
}

}  // namespace scanstat
