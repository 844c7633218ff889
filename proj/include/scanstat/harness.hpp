// harness.hpp - Monte Carlo experiment engine: empirical size and power, ROC
// curves, P-value QQ data, calibration, and epsilon-scan timing.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scanstat/epsilon.hpp"
#include "scanstat/scan.hpp"

namespace scanstat {

enum class Scanner { oracle, multiscale, adaptive, modified, epsilon };

const char* to_string(Scanner s);
std::optional<Scanner> scanner_from_string(const std::string& name);

struct ExperimentConfig {
    Index n = 128;
    int d = 2;
    Index h_lo = 4;
    Index h_hi = 0;                      // 0 = floor(n/e)
    double mu = 0.0;
    std::vector<Index> signal_shape;     // required for power runs and the oracle scanner
    int reps = 100;
    std::uint64_t seed = 1;
    std::vector<Scanner> scanners = {Scanner::adaptive};
    double eps = 0.0;                    // required when scanners include epsilon
    std::vector<double> alpha_grid = {0.05};
    int threads = 0;                     // 0 = hardware concurrency

    Index effective_h_hi() const;
};

/// Per-scanner series over replicates. `stat` is the swept ROC statistic
/// (tau_hat for the calibrated scanners, the raw statistic for modified);
/// `pvalue` is NaN for the modified scanner.
struct ScannerSeries {
    Scanner scanner;
    std::vector<double> stat;
    std::vector<double> pvalue;
};

struct MCResult {
    ExperimentConfig config;
    bool alternative = false;
    std::vector<ScannerSeries> series;
    std::vector<Rect> injected;  // one per replicate under the alternative

    const ScannerSeries& of(Scanner s) const;
    /// Fraction of replicates with pvalue <= alpha (size under H0, power under H1).
    double rejection_rate(Scanner s, double alpha) const;
};

/// `reps` independent null fields; replicate r uses sub_seed(seed, r, 0).
MCResult run_null(const ExperimentConfig& config);

/// Same noise streams as run_null, plus an injected signal of size mu at a
/// uniformly random anchor (sub_seed(seed, r, 1)); paired with run_null.
MCResult run_power(const ExperimentConfig& config);

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

/// Threshold sweep over the pooled statistics, stepwise monotone from (0,0)
/// to (1,1).
std::vector<RocPoint> roc_curve(std::span<const double> null_stats,
                                std::span<const double> alt_stats);

/// Mann-Whitney AUC with midrank tie handling (identical samples give 1/2).
double roc_auc(std::span<const double> null_stats, std::span<const double> alt_stats);

/// (uniform quantile (i-1/2)/m, i-th smallest P-value) pairs.
std::vector<std::pair<double, double>> qq_pvalues(std::span<const double> pvalues);

/// Empirical threshold for a statistic whose large values are evidence against
/// H0: the smallest observed value t with #{stat > t}/reps <= target_alpha.
/// Requires reps >= 1/target_alpha.
double calibrate_mc(std::span<const double> null_stats, double target_alpha);

/// Permutation P-value of the adaptive scan's tau_hat: shuffles the field's
/// cells `permutations` times and reports (1 + #{perm >= observed}) / (1 + P).
double permutation_pvalue(const GridField& field, ShapeRange range, int permutations,
                          std::uint64_t seed);

struct TimingRecord {
    double eps = 0.0;
    double median_s = 0.0;
    double p5_s = 0.0;
    double p95_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
    std::uint64_t op_count = 0;
};

/// Times epsilon_adaptive_scan over `config.reps` fresh noise fields per eps.
std::vector<TimingRecord> bench_epsilon(const ExperimentConfig& config,
                                        std::span<const double> eps_list);

}  // namespace scanstat
