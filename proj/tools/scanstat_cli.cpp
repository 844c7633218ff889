// scanstat_cli.cpp - command-line surface: gen, scan, cover, mc, bench.
// Machine-readable output (JSON/CSV) goes to stdout or files; human summaries
// to stderr. Exit codes: 0 success, 1 usage error, 2 data/format error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "scanstat/epsilon.hpp"
#include "scanstat/harness.hpp"
#include "scanstat/io.hpp"
#include "scanstat/rng.hpp"
#include "scanstat/scan.hpp"

using json = nlohmann::json;
using namespace scanstat;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Index> parse_extents(const std::string& text, int d, const char* what) {
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, 'x')) {
        try {
            out.push_back(static_cast<Index>(std::stoll(part)));
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": malformed extent '" + part + "'");
        }
    }
    if (static_cast<int>(out.size()) != d)
        throw UsageError(std::string(what) + ": expected " + std::to_string(d) +
                         " 'x'-separated extents, got '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": malformed number '" + part + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty list");
    return out;
}

int resolve_threads(int flag_value) {
    if (const char* env = std::getenv("SCANSTAT_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
        }
    }
    if (flag_value > 0) return flag_value;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

json rect_to_json(const Rect& rect) {
    return json{{"anchor", rect.anchor}, {"shape", rect.shape}};
}

json outcome_to_json(const ScanOutcome& out, double alpha, bool with_per_shape) {
    json j{{"kind", out.kind},
           {"stat", out.stat},
           {"tau_hat", out.tau_hat},
           {"pvalue", out.pvalue},
           {"reject", out.reject(alpha)},
           {"alpha", alpha},
           {"best_rect", rect_to_json(out.best_rect)},
           {"warnings", out.warnings}};
    if (with_per_shape) {
        json records = json::array();
        for (const auto& rec : out.per_shape) {
            records.push_back(json{{"shape", rec.shape},
                                   {"max_z", rec.max_z},
                                   {"anchor", rec.anchor},
                                   {"v", rec.v},
                                   {"tau_hat", rec.tau_hat},
                                   {"clamped", rec.clamped}});
        }
        j["per_shape"] = std::move(records);
    }
    return j;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    Index n = 0;
    int d = 2;
    std::uint64_t seed = 0;
    double mu = 0.0;
    std::string shape;
    std::string anchor = "random";
    std::string out;
};

int cmd_gen(const GenArgs& args) {
    if (args.n < 1) throw UsageError("--n must be a positive integer");
    if (args.d < 1) throw UsageError("--d must be a positive integer");
    if (args.mu < 0.0) throw UsageError("--mu must be nonnegative");
    if (args.mu > 0.0 && args.shape.empty())
        throw UsageError("--mu requires --shape for the active rectangle");

    std::vector<Index> dims(static_cast<std::size_t>(args.d), args.n);
    GridField field = white_noise(dims, args.seed);

    std::optional<Rect> rect;
    if (!args.shape.empty()) {
        Rect r;
        r.shape = parse_extents(args.shape, args.d, "--shape");
        if (args.anchor == "random") {
            rng::SplitMix64 placer(rng::sub_seed(args.seed, 0, 1));
            r.anchor.resize(static_cast<std::size_t>(args.d));
            for (int j = 0; j < args.d; ++j) {
                if (r.shape[static_cast<std::size_t>(j)] < 1 ||
                    r.shape[static_cast<std::size_t>(j)] > args.n)
                    throw UsageError("--shape must fit the grid");
                r.anchor[static_cast<std::size_t>(j)] = static_cast<Index>(placer.next_below(
                    static_cast<std::uint64_t>(args.n - r.shape[static_cast<std::size_t>(j)] + 1)));
            }
        } else {
            r.anchor = parse_extents(args.anchor, args.d, "--anchor");
        }
        r.require_fits(dims);
        field = inject_signal(field, SignalSpec{r, args.mu});
        rect = r;
    }

    std::string format = "gf01";
    if (ends_with(args.out, ".csv")) {
        if (args.d != 2) throw UsageError("CSV output requires --d 2");
        io::write_csv(args.out, field);
        format = "csv";
    } else {
        io::write_gf01(args.out, field);
    }

    json manifest{{"n", args.n},     {"d", args.d},       {"seed", args.seed},
                  {"mu", args.mu},   {"path", args.out},  {"format", format},
                  {"rect", rect ? rect_to_json(*rect) : json(nullptr)}};
    std::cout << manifest.dump() << "\n";
    std::cerr << "wrote " << format << " grid " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- scan

struct ScanArgs {
    std::string in;
    std::string method;
    std::string hstar;
    Index h_lo = 0;
    Index h_hi = 0;
    double eps = 0.0;
    double alpha = 0.05;
    bool per_shape = false;
    int threads = 0;
};

int cmd_scan(const ScanArgs& args) {
    if (!(args.alpha > 0.0) || !(args.alpha < 1.0)) throw UsageError("--alpha must lie in (0,1)");
    const bool is_oracle = args.method == "oracle";
    const bool is_multi = args.method == "multi" || args.method == "multiscale";
    const bool is_adaptive = args.method == "adaptive";
    const bool is_modified = args.method == "modified";
    const bool is_eps = args.method == "eps" || args.method == "epsilon";
    if (!is_oracle && !is_multi && !is_adaptive && !is_modified && !is_eps)
        throw UsageError("--method must be one of oracle|multi|adaptive|modified|eps");
    if (is_oracle && args.hstar.empty()) throw UsageError("--method oracle requires --hstar");
    if (!is_oracle && !args.hstar.empty())
        throw UsageError("--hstar is only valid with --method oracle");
    if (!is_oracle && args.h_lo < 1)
        throw UsageError("--hlo is required for range-based methods");
    if (is_eps && !(args.eps > 0.0)) throw UsageError("--method eps requires --eps > 0");
    if (!is_eps && args.eps > 0.0) throw UsageError("--eps is only valid with --method eps");

    const GridField field = io::read_auto(args.in);
    ScanOptions opt;
    opt.threads = resolve_threads(args.threads);
    opt.keep_per_shape = args.per_shape;

    json j;
    if (is_oracle) {
        const auto h_star = parse_extents(args.hstar, field.dim(), "--hstar");
        j = outcome_to_json(oracle_scan(field, h_star, args.alpha, opt), args.alpha, false);
    } else {
        const Index n = require_square(field);
        const ShapeRange range{args.h_lo, args.h_hi > 0 ? args.h_hi : max_h_hi(n)};
        if (is_multi) {
            j = outcome_to_json(multiscale_scan(field, range, opt), args.alpha, false);
        } else if (is_adaptive) {
            j = outcome_to_json(adaptive_scan(field, range, opt), args.alpha, args.per_shape);
        } else if (is_modified) {
            const ModifiedResult res = modified_adaptive_stat(field, range, opt);
            j = json{{"kind", "modified"},
                     {"stat", res.stat},
                     {"tau_hat", nullptr},
                     {"pvalue", nullptr},
                     {"reject", nullptr},
                     {"alpha", args.alpha},
                     {"best_rect", rect_to_json(res.best_rect)},
                     {"warnings", json::array()}};
        } else {
            const EpsScanResult res = epsilon_adaptive_scan(field, range, args.eps, opt);
            j = outcome_to_json(res.outcome, args.alpha, args.per_shape);
            j["op_count"] = res.op_count;
            j["flagged_shapes"] = res.flagged_shapes;
            j["eps"] = args.eps;
        }
    }
    std::cout << j.dump() << "\n";
    return 0;
}

// ---------------------------------------------------------------- cover

struct CoverArgs {
    Index n = 0;
    Index h_lo = 0;
    Index h_hi = 0;
    double eps = 0.0;
    std::string out;
    bool verify = false;
    int trials = 10000;
    std::uint64_t seed = 1;
};

int cmd_cover(const CoverArgs& args, int d) {
    if (args.n < 1) throw UsageError("--n must be positive");
    if (args.h_lo < 1) throw UsageError("--hlo is required");
    if (!(args.eps > 0.0)) throw UsageError("--eps must be positive");
    const ShapeRange range{args.h_lo, args.h_hi > 0 ? args.h_hi : max_h_hi(args.n)};
    const CoveringParams params = CoveringParams::make(args.eps, range, d, args.n);

    if (args.verify) {
        const double worst = covering_verify(args.n, d, range, params, args.trials, args.seed);
        const bool pass = worst <= args.eps;
        json report{{"verdict", pass ? "PASS" : "FAIL"}, {"pass", pass},
                    {"max_min_delta", worst},           {"eps", args.eps},
                    {"n", args.n},                      {"d", d},
                    {"h_lo", range.h_lo},               {"h_hi", range.h_hi},
                    {"a_lo", params.a_lo},              {"a_hi", params.a_hi},
                    {"f_max", params.f_max},            {"trials", args.trials},
                    {"seed", args.seed}};
        std::cout << report.dump() << "\n";
        std::cerr << (pass ? "PASS" : "FAIL") << " max_min_delta=" << worst << " (eps=" << args.eps
                  << ")\n";
        return 0;
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) throw std::runtime_error(args.out + ": cannot open for writing");
        os = &file;
    }
    for (int j = 1; j <= d; ++j) *os << "a_" << j << (j < d ? "," : "");
    for (int j = 1; j <= d; ++j) *os << ",f_" << j;
    for (int j = 1; j <= d; ++j) *os << ",t_" << j;
    *os << "\n";
    std::uint64_t count = 0;
    for_each_covering_element(args.n, d, params, [&](const CoveringElement& el) {
        for (int j = 0; j < d; ++j) *os << el.a[static_cast<std::size_t>(j)] << (j + 1 < d ? "," : "");
        for (int j = 0; j < d; ++j) *os << ',' << el.f[static_cast<std::size_t>(j)];
        for (int j = 0; j < d; ++j) *os << ',' << el.t[static_cast<std::size_t>(j)];
        *os << '\n';
        ++count;
    });
    std::cerr << "covering elements: " << count << "\n";
    return 0;
}

// ---------------------------------------------------------------- mc

struct McArgs {
    bool run_null_flag = false;
    bool run_power_flag = false;
    Index n = 128;
    int d = 2;
    Index h_lo = 0;
    Index h_hi = 0;
    double mu = 0.0;
    std::string shape;
    int reps = 100;
    std::uint64_t seed = 1;
    std::string scanners = "adaptive";
    std::string alphas = "0.05";
    double eps = 0.0;
    std::string out_dir = ".";
    int threads = 0;
};

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.precision(17);
    return out;
}

int cmd_mc(const McArgs& args) {
    if (!args.run_null_flag && !args.run_power_flag)
        throw UsageError("select at least one of --null / --power");
    if (args.h_lo < 1) throw UsageError("--hlo is required");

    ExperimentConfig config;
    config.n = args.n;
    config.d = args.d;
    config.h_lo = args.h_lo;
    config.h_hi = args.h_hi;
    config.mu = args.mu;
    config.reps = args.reps;
    config.seed = args.seed;
    config.eps = args.eps;
    config.threads = resolve_threads(args.threads);
    config.alpha_grid = parse_double_list(args.alphas, "--alphas");
    if (!args.shape.empty()) config.signal_shape = parse_extents(args.shape, args.d, "--shape");

    config.scanners.clear();
    {
        std::stringstream ss(args.scanners);
        std::string part;
        while (std::getline(ss, part, ',')) {
            const auto s = scanner_from_string(part);
            if (!s) throw UsageError("unknown scanner '" + part + "'");
            config.scanners.push_back(*s);
        }
    }
    if (config.scanners.empty()) throw UsageError("--scanners list is empty");
    if (args.run_power_flag && config.signal_shape.empty())
        throw UsageError("--power requires --shape");

    const std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    json summary{{"tool", "scanstat"},  {"version", "0.1.0"},
                 {"n", config.n},       {"d", config.d},
                 {"h_lo", config.h_lo}, {"h_hi", config.effective_h_hi()},
                 {"mu", config.mu},     {"reps", config.reps},
                 {"seed", config.seed}, {"scanners", args.scanners},
                 {"alphas", config.alpha_grid}};
    json outputs = json::array();

    std::optional<MCResult> null_result;
    std::optional<MCResult> power_result;
    if (args.run_null_flag) null_result = run_null(config);
    if (args.run_power_flag) power_result = run_power(config);

    const auto has_pvalues = [](Scanner s) { return s != Scanner::modified; };

    if (null_result) {
        auto size_csv = open_csv(dir / "size.csv");
        size_csv << "scanner,alpha,size\n";
        for (const Scanner s : config.scanners) {
            if (!has_pvalues(s)) continue;
            for (const double alpha : config.alpha_grid)
                size_csv << to_string(s) << ',' << alpha << ','
                         << null_result->rejection_rate(s, alpha) << "\n";
        }
        outputs.push_back((dir / "size.csv").string());

        auto qq_csv = open_csv(dir / "qq.csv");
        qq_csv << "scanner,u_quantile,p_quantile\n";
        for (const Scanner s : config.scanners) {
            if (!has_pvalues(s)) continue;
            for (const auto& [u, p] : qq_pvalues(null_result->of(s).pvalue))
                qq_csv << to_string(s) << ',' << u << ',' << p << "\n";
        }
        outputs.push_back((dir / "qq.csv").string());
    }
    if (power_result) {
        auto power_csv = open_csv(dir / "power.csv");
        power_csv << "scanner,alpha,power\n";
        for (const Scanner s : config.scanners) {
            if (!has_pvalues(s)) continue;
            for (const double alpha : config.alpha_grid)
                power_csv << to_string(s) << ',' << alpha << ','
                          << power_result->rejection_rate(s, alpha) << "\n";
        }
        outputs.push_back((dir / "power.csv").string());
    }
    if (null_result && power_result) {
        auto roc_csv = open_csv(dir / "roc.csv");
        roc_csv << "scanner,tau,fpr,tpr\n";
        json aucs;
        for (const Scanner s : config.scanners) {
            const auto& null_stats = null_result->of(s).stat;
            const auto& alt_stats = power_result->of(s).stat;
            for (const RocPoint& p : roc_curve(null_stats, alt_stats))
                roc_csv << to_string(s) << ',' << p.threshold << ',' << p.fpr << ',' << p.tpr
                        << "\n";
            aucs[to_string(s)] = roc_auc(null_stats, alt_stats);
        }
        outputs.push_back((dir / "roc.csv").string());
        summary["auc"] = std::move(aucs);
    }

    summary["outputs"] = std::move(outputs);
    std::cout << summary.dump() << "\n";
    return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    Index n = 256;
    int d = 2;
    Index h_lo = 0;
    Index h_hi = 0;
    std::string eps_list = "2.0,1.5,1.0";
    int reps = 5;
    std::uint64_t seed = 1;
    std::string out = "bench.csv";
};

int cmd_bench(const BenchArgs& args) {
    if (args.h_lo < 1) throw UsageError("--hlo is required");
    ExperimentConfig config;
    config.n = args.n;
    config.d = args.d;
    config.h_lo = args.h_lo;
    config.h_hi = args.h_hi;
    config.reps = args.reps;
    config.seed = args.seed;
    const auto eps_values = parse_double_list(args.eps_list, "--eps-list");

    const auto records = bench_epsilon(config, eps_values);
    auto csv = open_csv(args.out);
    csv << "eps,median_s,p5_s,p95_s,op_count\n";
    for (const TimingRecord& rec : records)
        csv << rec.eps << ',' << rec.median_s << ',' << rec.p5_s << ',' << rec.p95_s << ','
            << rec.op_count << "\n";

    json summary{{"tool", "scanstat"},
                 {"version", "0.1.0"},
                 {"n", config.n},
                 {"d", config.d},
                 {"h_lo", config.h_lo},
                 {"h_hi", config.effective_h_hi()},
                 {"reps", config.reps},
                 {"seed", config.seed},
                 {"out", args.out}};
    json rows = json::array();
    for (const TimingRecord& rec : records)
        rows.push_back(json{{"eps", rec.eps},
                            {"median_s", rec.median_s},
                            {"p5_s", rec.p5_s},
                            {"p95_s", rec.p95_s},
                            {"op_count", rec.op_count}});
    summary["records"] = std::move(rows);
    std::cout << summary.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scanstat: scan tests for rectangles of elevated mean in Gaussian grids"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a (optionally signal-bearing) grid");
    gen_cmd->add_option("--n", gen.n, "grid side length")->required();
    gen_cmd->add_option("--d", gen.d, "dimension (default 2)");
    gen_cmd->add_option("--seed", gen.seed, "master seed")->required();
    gen_cmd->add_option("--mu", gen.mu, "signal size (0 = pure noise)");
    gen_cmd->add_option("--shape", gen.shape, "active rectangle shape, e.g. 34x38");
    gen_cmd->add_option("--anchor", gen.anchor, "anchor, e.g. 12x70, or 'random'");
    gen_cmd->add_option("--out", gen.out, "output path (.csv for CSV, else GF01)")->required();

    ScanArgs scan;
    CLI::App* scan_cmd = app.add_subcommand("scan", "run a scan test on a grid file");
    scan_cmd->add_option("--in", scan.in, "input grid (GF01 or CSV)")->required();
    scan_cmd->add_option("--method", scan.method, "oracle|multi|adaptive|modified|eps")->required();
    scan_cmd->add_option("--hstar", scan.hstar, "oracle shape, e.g. 34x38");
    scan_cmd->add_option("--hlo", scan.h_lo, "smallest scanned extent");
    scan_cmd->add_option("--hhi", scan.h_hi, "largest scanned extent (default floor(n/e))");
    scan_cmd->add_option("--eps", scan.eps, "covering resolution for --method eps");
    scan_cmd->add_option("--alpha", scan.alpha, "test level (default 0.05)");
    scan_cmd->add_flag("--per-shape", scan.per_shape, "include per-shape records in the JSON");
    scan_cmd->add_option("--threads", scan.threads, "worker threads (0 = all cores)");

    CoverArgs cover;
    int cover_d = 2;
    CLI::App* cover_cmd = app.add_subcommand("cover", "emit or verify the epsilon covering");
    cover_cmd->add_option("--n", cover.n, "grid side (power of two)")->required();
    cover_cmd->add_option("--d", cover_d, "dimension (default 2)");
    cover_cmd->add_option("--hlo", cover.h_lo, "smallest shape extent")->required();
    cover_cmd->add_option("--hhi", cover.h_hi, "largest shape extent (default floor(n/e))");
    cover_cmd->add_option("--eps", cover.eps, "covering resolution")->required();
    cover_cmd->add_option("--out", cover.out, "CSV output path (default stdout)");
    cover_cmd->add_flag("--verify", cover.verify, "Monte Carlo covering verification");
    cover_cmd->add_option("--trials", cover.trials, "verification trials (default 10000)");
    cover_cmd->add_option("--seed", cover.seed, "verification seed");

    McArgs mc;
    CLI::App* mc_cmd = app.add_subcommand("mc", "Monte Carlo size/power/ROC/QQ experiments");
    mc_cmd->add_flag("--null", mc.run_null_flag, "simulate under H0");
    mc_cmd->add_flag("--power", mc.run_power_flag, "simulate under H1 (requires --mu, --shape)");
    mc_cmd->add_option("--n", mc.n, "grid side");
    mc_cmd->add_option("--d", mc.d, "dimension");
    mc_cmd->add_option("--hlo", mc.h_lo, "smallest scanned extent")->required();
    mc_cmd->add_option("--hhi", mc.h_hi, "largest scanned extent (default floor(n/e))");
    mc_cmd->add_option("--mu", mc.mu, "signal size under H1");
    mc_cmd->add_option("--shape", mc.shape, "signal shape, e.g. 34x38");
    mc_cmd->add_option("--reps", mc.reps, "replicates");
    mc_cmd->add_option("--seed", mc.seed, "master seed");
    mc_cmd->add_option("--scanners", mc.scanners, "comma list: oracle,multi,adaptive,modified,eps");
    mc_cmd->add_option("--alphas", mc.alphas, "comma list of levels");
    mc_cmd->add_option("--eps", mc.eps, "epsilon for the eps scanner");
    mc_cmd->add_option("--out-dir", mc.out_dir, "output directory (default .)");
    mc_cmd->add_option("--threads", mc.threads, "worker threads (0 = all cores)");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "time the epsilon scan per eps");
    bench_cmd->add_option("--n", bench.n, "grid side (power of two)");
    bench_cmd->add_option("--d", bench.d, "dimension");
    bench_cmd->add_option("--hlo", bench.h_lo, "smallest scanned extent")->required();
    bench_cmd->add_option("--hhi", bench.h_hi, "largest scanned extent (default floor(n/e))");
    bench_cmd->add_option("--eps-list", bench.eps_list, "comma list of eps values");
    bench_cmd->add_option("--reps", bench.reps, "replicates per eps");
    bench_cmd->add_option("--seed", bench.seed, "master seed");
    bench_cmd->add_option("--out", bench.out, "CSV output path (default bench.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (scan_cmd->parsed()) return cmd_scan(scan);
        if (cover_cmd->parsed()) return cmd_cover(cover, cover_d);
        if (mc_cmd->parsed()) return cmd_mc(mc);
        if (bench_cmd->parsed()) return cmd_bench(bench);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
