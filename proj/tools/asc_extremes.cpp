// asc-extremes: run weighted path averages of extreme order statistics,
// evaluate their limit laws, check weight sequences and probe the gap bounds.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid flags, 3 a diagnostic
// (check-weights or lemma) did not pass.

#include "asx/asclt.hpp"
#include "asx/limit_laws.hpp"
#include "asx/oracles.hpp"
#include "asx/series_csv.hpp"
#include "asx/text.hpp"
#include "asx/version.hpp"
#include "asx/weights.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiagnostic = 3;

// A bad flag value; the message is reported as "<flag>: <reason>".
struct UsageError : std::runtime_error {
    UsageError(const std::string& flag, const std::string& reason)
        : std::runtime_error(reason.starts_with(flag + ": ") ? reason : flag + ": " + reason) {}
};

// Runs `parse`, turning library validation errors into a UsageError that
// names the flag.
template <typename F>
auto for_flag(const std::string& flag, F&& parse) -> decltype(parse()) {
    try {
        return parse();
    } catch (const std::invalid_argument& e) {
        throw UsageError(flag, e.what());
    } catch (const std::out_of_range& e) {
        throw UsageError(flag, e.what());
    }
}

std::uint64_t positive_integer(const std::string& text, const std::string& flag) {
    const long long value = for_flag(flag, [&] { return asx::parse_integer(text, flag); });
    if (value < 1) throw UsageError(flag, "must be a positive integer, got " + text);
    return static_cast<std::uint64_t>(value);
}

std::vector<int> rank_list(const std::string& text, const std::string& flag) {
    std::vector<int> ranks;
    for (long long r : for_flag(flag, [&] { return asx::parse_integer_list(text, flag); })) {
        if (r < 1 || r > asx::kMaxTrackedRank) {
            throw UsageError(flag, "ranks must lie in 1.." + std::to_string(asx::kMaxTrackedRank));
        }
        ranks.push_back(static_cast<int>(r));
    }
    return ranks;
}

std::vector<std::uint64_t> seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (long long s : for_flag("--seed", [&] { return asx::parse_integer_list(text, "--seed"); })) {
        if (s < 0) throw UsageError("--seed", "seeds must be nonnegative");
        seeds.push_back(static_cast<std::uint64_t>(s));
    }
    return seeds;
}

std::vector<int> first_ranks(std::size_t count) {
    std::vector<int> ranks(count);
    std::iota(ranks.begin(), ranks.end(), 1);
    return ranks;
}

asx::LevelVector level_vector(const std::string& levels_text, const std::optional<std::string>& ranks_text) {
    const auto levels = for_flag("--levels", [&] { return asx::parse_number_list(levels_text, "--levels"); });
    const auto ranks = ranks_text ? rank_list(*ranks_text, "--ranks") : first_ranks(levels.size());
    if (ranks.size() != levels.size()) {
        throw UsageError("--ranks", "expected " + std::to_string(levels.size()) + " ranks, one per level");
    }
    return for_flag("--levels", [&] { return asx::LevelVector(levels, ranks); });
}

// Workers for replication and seed parallelism: ASC_EXTREMES_THREADS caps
// `wanted`.
std::size_t worker_cap(std::size_t wanted) {
    const char* env = std::getenv("ASC_EXTREMES_THREADS");
    if (env == nullptr || *env == '\0') return wanted;
    const long long cap = for_flag("ASC_EXTREMES_THREADS", [&] { return asx::parse_integer(env, "value"); });
    if (cap < 1) throw UsageError("ASC_EXTREMES_THREADS", "must be a positive integer");
    return std::min(wanted, static_cast<std::size_t>(cap));
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buffer;
}

void write_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << contents;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

// "runs/a.csv" with seed 7 -> "runs/a.seed7.csv".
fs::path per_seed_path(const fs::path& base, std::uint64_t seed) {
    fs::path out = base;
    out.replace_filename(base.stem().string() + ".seed" + std::to_string(seed) + base.extension().string());
    return out;
}

// ---------------------------------------------------------------- run

struct RunFlags {
    std::string model = "exp";
    std::string k = "1";
    std::optional<std::string> levels;
    std::optional<std::string> ranks;
    std::string weights = "log";
    std::string n = "1048576";
    std::string seeds = "1";
    std::string mode = "joint";
    std::optional<std::string> checkpoints;
    std::optional<std::string> out;
    std::optional<std::string> manifest;
    std::optional<std::string> gnuplot;
};

asx::ExperimentConfig build_config(const RunFlags& flags) {
    asx::ExperimentConfig config;
    config.model = for_flag("--model", [&] { return asx::SampleModel::parse(flags.model); });
    const std::uint64_t k = positive_integer(flags.k, "--k");
    if (k > static_cast<std::uint64_t>(asx::kMaxTrackedRank)) {
        throw UsageError("--k", "k must lie in 1.." + std::to_string(asx::kMaxTrackedRank));
    }
    config.k = static_cast<int>(k);
    config.scheme = for_flag("--weights", [&] { return asx::WeightScheme::parse(flags.weights); });
    config.n_max = positive_integer(flags.n, "--n");

    if (flags.mode == "joint") {
        config.mode = asx::PathMode::Joint;
    } else if (flags.mode == "subset") {
        config.mode = asx::PathMode::SubsetMarginal;
    } else if (flags.mode.starts_with("functional:")) {
        config.mode = asx::PathMode::Functional;
        config.functional = for_flag("--mode", [&] { return asx::FunctionalSpec::parse(flags.mode.substr(11)); });
    } else {
        throw UsageError("--mode", "expected joint, subset or functional:NAME, got '" + flags.mode + "'");
    }

    if (config.mode == asx::PathMode::Functional) {
        if (flags.levels || flags.ranks) throw UsageError("--levels", "functional mode takes no levels");
    } else {
        if (!flags.levels) throw UsageError("--levels", "required in " + flags.mode + " mode");
        config.levels = level_vector(*flags.levels, flags.ranks);
        if (config.mode == asx::PathMode::Joint) {
            if (config.levels->size() != k) {
                throw UsageError("--levels", "joint mode needs exactly k = " + std::to_string(k) + " levels");
            }
            if (!config.levels->is_joint()) throw UsageError("--ranks", "joint mode needs ranks 1..k");
        } else if (config.levels->max_rank() > config.k) {
            throw UsageError("--ranks", "ranks must not exceed k");
        }
    }

    if (flags.checkpoints) {
        for (long long c : for_flag("--checkpoints", [&] { return asx::parse_integer_list(*flags.checkpoints, "--checkpoints"); })) {
            if (c < 1) throw UsageError("--checkpoints", "checkpoints must be positive");
            config.checkpoints.push_back(static_cast<std::uint64_t>(c));
        }
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(flags.checkpoints ? "--checkpoints" : "--n", e.what());
    }
    return config;
}

json config_echo(const asx::ExperimentConfig& config, const RunFlags& flags) {
    json echo{{"model", config.model.name()},
              {"k", config.k},
              {"mode", flags.mode},
              {"weights", config.scheme.name()},
              {"weight_start", config.scheme.start()},
              {"n", config.n_max},
              {"checkpoints", config.resolved_checkpoints()},
              {"first_index", config.first_index()}};
    if (config.levels) {
        echo["levels"] = std::vector<double>(config.levels->levels().begin(), config.levels->levels().end());
        echo["ranks"] = std::vector<int>(config.levels->ranks().begin(), config.levels->ranks().end());
    }
    if (config.functional) echo["quadrature_grid"] = config.quadrature_grid;
    return echo;
}

std::string gnuplot_script(const std::vector<fs::path>& csvs) {
    std::string script =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale xy\n"
        "set xlabel 'N'\n"
        "set ylabel '|A_N - limit|'\n"
        "plot ";
    for (std::size_t i = 0; i < csvs.size(); ++i) {
        if (i > 0) script += ", \\\n     ";
        script += "'" + csvs[i].string() + "' using 1:5 with linespoints title '" + csvs[i].filename().string() + "'";
    }
    return script + "\n";
}

int cmd_run(const RunFlags& flags) {
    const asx::ExperimentConfig config = build_config(flags);
    const auto seeds = seed_list(flags.seeds);
    if (seeds.size() > 1 && !flags.out) throw UsageError("--out", "required when more than one seed is given");
    if (flags.gnuplot && !flags.out) throw UsageError("--gnuplot", "needs --out so the script can reference the CSV");

    const auto started = std::chrono::steady_clock::now();
    const std::string started_at = timestamp_utc();
    const auto results = asx::run_seed_sweep(config, seeds, worker_cap(seeds.size()));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::vector<fs::path> outputs;
    if (!flags.out) {
        asx::write_series_csv(std::cout, results.front());
        std::cout.flush();
        if (!std::cout) throw std::runtime_error("cannot write to standard output");
    } else {
        const fs::path base(*flags.out);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            outputs.push_back(seeds.size() == 1 ? base : per_seed_path(base, seeds[i]));
            write_file(outputs.back(), asx::series_csv(results[i]));
        }
    }
    if (flags.gnuplot) {
        write_file(*flags.gnuplot, gnuplot_script(outputs));
        outputs.emplace_back(*flags.gnuplot);
    }

    std::optional<fs::path> manifest_path;
    if (flags.manifest) {
        manifest_path = *flags.manifest;
    } else if (flags.out) {
        manifest_path = fs::path(*flags.out).replace_extension(".manifest.json");
    }
    if (manifest_path) {
        std::vector<std::string> paths;
        for (const auto& p : outputs) paths.push_back(p.string());
        const json manifest{{"tool", "asc-extremes"},
                            {"version", asx::kVersion},
                            {"command", "run"},
                            {"config", config_echo(config, flags)},
                            {"seeds", seeds},
                            {"outputs", paths},
                            {"started_at", started_at},
                            {"wall_clock_seconds", elapsed}};
        write_file(*manifest_path, manifest.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- limit

struct LimitFlags {
    std::string family = "gumbel";
    std::string levels;
    std::optional<std::string> ranks;
};

int cmd_limit(const LimitFlags& flags) {
    const auto family = for_flag("--family", [&] { return asx::LimitFamily::parse(flags.family); });
    const auto levels = level_vector(flags.levels, flags.ranks);
    std::cout << asx::format_sig12(asx::subset_marginal(family, levels)) << '\n';
    return 0;
}

// ---------------------------------------------------------------- check-weights

struct CheckFlags {
    std::string weights;
    std::string range = "10:1000000";
    std::string alpha = "0.5";
    std::optional<std::string> rho;
};

int cmd_check_weights(const CheckFlags& flags) {
    const auto scheme = for_flag("--weights", [&] { return asx::WeightScheme::parse(flags.weights); });
    const auto colon = flags.range.find(':');
    if (colon == std::string::npos) throw UsageError("--range", "expected LO:HI, got '" + flags.range + "'");
    const std::uint64_t lo = positive_integer(flags.range.substr(0, colon), "--range");
    const std::uint64_t hi = positive_integer(flags.range.substr(colon + 1), "--range");
    const double alpha = for_flag("--alpha", [&] { return asx::parse_number(flags.alpha, "--alpha"); });
    const double rho = flags.rho ? for_flag("--rho", [&] { return asx::parse_number(*flags.rho, "--rho"); })
                                 : scheme.default_rho();

    asx::ConditionReport report;
    try {
        report = asx::check_conditions(scheme, lo, hi, alpha, rho);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const std::string flag = what.find("alpha") != std::string::npos ? "--alpha"
                                 : what.find("rho") != std::string::npos ? "--rho"
                                                                           : "--range";
        throw UsageError(flag, what);
    }
    const auto yes_no = [](bool ok) { return ok ? "pass" : "fail"; };
    std::cout << "weights,n_lo,n_hi,alpha,rho,min_n_dn,monotone_violations,max_ratio,tail_growth,"
                 "liminf,monotone,growth,result\n"
              << scheme.name() << ',' << report.n_lo << ',' << report.n_hi << ','
              << asx::format_shortest(report.weight_alpha) << ',' << asx::format_shortest(report.rho) << ','
              << asx::format_sig12(report.min_n_dn) << ',' << report.monotone_violations << ','
              << asx::format_sig12(report.max_ratio) << ',' << asx::format_sig12(report.tail_growth) << ','
              << yes_no(report.liminf_ok()) << ',' << yes_no(report.monotone_ok()) << ','
              << yes_no(report.ratio_ok()) << ',' << yes_no(report.passed()) << '\n';
    return report.passed() ? 0 : kExitDiagnostic;
}

// ---------------------------------------------------------------- lemma

struct LemmaFlags {
    std::string which;
    std::string model = "exp";
    std::string m;
    std::string n;
    std::optional<std::string> j;
    std::optional<std::string> k;
    std::optional<std::string> levels;
    std::optional<std::string> ranks;
    std::string reps = "10000";
    std::string seed = "1";
};

// Levels at the limit-law quantiles (k/(k+1), ..., 1/(k+1)) when none are given.
asx::LevelVector default_levels(const asx::SampleModel& model, int k) {
    std::vector<double> xs;
    for (int i = k; i >= 1; --i) {
        xs.push_back(asx::gev_quantile(model.limit_family(), static_cast<double>(i) / (k + 1)));
    }
    return asx::LevelVector::joint(xs);
}

int cmd_lemma(const LemmaFlags& flags) {
    const auto model = for_flag("--model", [&] { return asx::SampleModel::parse(flags.model); });
    const std::uint64_t m = positive_integer(flags.m, "--m");
    const std::uint64_t n = positive_integer(flags.n, "--n");
    const std::uint64_t reps = positive_integer(flags.reps, "--reps");
    const std::uint64_t seed = seed_list(flags.seed).at(0);
    const std::optional<std::uint64_t> j = flags.j ? std::optional(positive_integer(*flags.j, "--j")) : std::nullopt;
    const std::optional<std::uint64_t> k = flags.k ? std::optional(positive_integer(*flags.k, "--k")) : std::nullopt;
    for (const auto& value : {j, k}) {
        if (value && *value > static_cast<std::uint64_t>(asx::kMaxTrackedRank)) {
            throw UsageError(value == j ? "--j" : "--k", "must not exceed " + std::to_string(asx::kMaxTrackedRank));
        }
    }
    const std::size_t threads = worker_cap(std::max(1u, std::thread::hardware_concurrency()));

    // Hypothesis violations are reported against --m.
    const auto checked = [](auto&& call) { return for_flag("--m", call); };

    asx::Estimate estimate;
    double bound = 0.0;
    if (flags.which == "1") {
        const int jj = static_cast<int>(j.value_or(1));
        const int kk = static_cast<int>(k.value_or(static_cast<std::uint64_t>(jj)));
        if (jj > kk) throw UsageError("--j", "j must not exceed k");
        std::optional<double> x;
        if (flags.levels) {
            const auto xs = for_flag("--levels", [&] { return asx::parse_number_list(*flags.levels, "--levels"); });
            if (xs.size() != 1) throw UsageError("--levels", "lemma 1 takes a single level");
            x = xs.front();
        }
        const auto result = checked([&] {
            return asx::lemma1_gap(model, n, m, jj, kk, x.value_or(0.0), reps, seed, threads);
        });
        // Without a level, report P(M_n^(j) > M_{m,n}^(j)), which bounds the
        // indicator gap at every level simultaneously.
        estimate = x ? result.indicator_gap : result.order_gap;
        bound = result.bound;
    } else if (flags.which == "2" || flags.which == "3") {
        if (flags.j) throw UsageError("--j", "lemmas 2 and 3 take --k or --levels");
        asx::LevelVector levels = flags.levels ? level_vector(*flags.levels, flags.ranks)
                                               : default_levels(model, static_cast<int>(k.value_or(1)));
        if (k && static_cast<std::uint64_t>(levels.max_rank()) != *k) {
            throw UsageError("--k", "k must equal the largest rank (" + std::to_string(levels.max_rank()) + ")");
        }
        if (flags.which == "2") {
            const auto result = checked([&] { return asx::lemma2_cov(model, m, n, levels, reps, seed, threads); });
            estimate = result.covariance;
            bound = result.bound;
        } else {
            const auto result = checked([&] { return asx::lemma3_gap(model, m, n, levels, reps, seed, threads); });
            estimate = result.mean_abs_gap;
            bound = result.bound;
        }
    } else {
        throw UsageError("--which", "expected 1, 2 or 3, got '" + flags.which + "'");
    }

    const bool pass = asx::within_bound(estimate, bound);
    std::cout << "estimate,se,bound,pass\n"
              << asx::format_sig12(estimate.estimate) << ',' << asx::format_sig12(estimate.se) << ','
              << asx::format_sig12(bound) << ',' << (pass ? "true" : "false") << '\n';
    return pass ? 0 : kExitDiagnostic;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted path averages of extreme order statistics and their limit laws"};
    app.set_version_flag("--version", std::string(asx::kVersion));
    app.require_subcommand(1);

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "Stream one seeded path per seed and write the convergence series");
    run_cmd->add_option("--model", run.model, "exp, pareto:ALPHA or uniform")->capture_default_str();
    run_cmd->add_option("--k", run.k, "Number of tracked order statistics")->capture_default_str();
    run_cmd->add_option("--levels", run.levels, "Comma-separated, strictly decreasing levels x_1,x_2,...");
    run_cmd->add_option("--ranks", run.ranks, "Ranks of the levels (subset mode); default 1,2,...");
    run_cmd->add_option("--weights", run.weights, "log, a:K, b:K, c:K or flat")->capture_default_str();
    run_cmd->add_option("--n", run.n, "Path length N_max")->capture_default_str();
    run_cmd->add_option("--seed", run.seeds, "Seed or comma-separated seeds")->capture_default_str();
    run_cmd->add_option("--mode", run.mode, "joint, subset or functional:{clip,clip:C,gev_cdf}")->capture_default_str();
    run_cmd->add_option("--checkpoints", run.checkpoints, "Comma-separated checkpoints ending at N_max");
    run_cmd->add_option("--out", run.out, "CSV path (per-seed files get .seed<S> before the extension)");
    run_cmd->add_option("--manifest", run.manifest, "Manifest path; default derived from --out");
    run_cmd->add_option("--gnuplot", run.gnuplot, "Also write a gnuplot script of abs_error against N");

    LimitFlags limit;
    auto* limit_cmd = app.add_subcommand("limit", "Print the limiting probability for the given levels and ranks");
    limit_cmd->add_option("--family", limit.family, "gumbel, frechet:ALPHA or weibull:ALPHA")->capture_default_str();
    limit_cmd->add_option("--levels", limit.levels, "Comma-separated, strictly decreasing levels")->required();
    limit_cmd->add_option("--ranks", limit.ranks, "Strictly increasing ranks; default 1,2,...");

    CheckFlags check;
    auto* check_cmd = app.add_subcommand("check-weights", "Check a weight sequence against the growth conditions");
    check_cmd->add_option("--weights", check.weights, "log, a:K, b:K, c:K or flat")->required();
    check_cmd->add_option("--range", check.range, "Index range LO:HI")->capture_default_str();
    check_cmd->add_option("--alpha", check.alpha, "Exponent alpha in (0, 1)")->capture_default_str();
    check_cmd->add_option("--rho", check.rho, "Exponent rho > 0; default depends on the scheme");

    LemmaFlags lemma;
    auto* lemma_cmd = app.add_subcommand("lemma", "Monte Carlo check of a prefix/segment gap bound");
    lemma_cmd->add_option("--which", lemma.which, "1, 2 or 3")->required();
    lemma_cmd->add_option("--model", lemma.model, "exp, pareto:ALPHA or uniform")->capture_default_str();
    lemma_cmd->add_option("--m", lemma.m, "Prefix length")->required();
    lemma_cmd->add_option("--n", lemma.n, "Path length")->required();
    lemma_cmd->add_option("--j", lemma.j, "Rank (lemma 1); default 1");
    lemma_cmd->add_option("--k", lemma.k, "Largest rank; default j (lemma 1) or the number of levels");
    lemma_cmd->add_option("--levels", lemma.levels,
                          "Levels; lemma 1 takes one, lemmas 2 and 3 default to limit-law quantiles");
    lemma_cmd->add_option("--ranks", lemma.ranks, "Ranks of the levels (lemmas 2 and 3)");
    lemma_cmd->add_option("--reps", lemma.reps, "Replications")->capture_default_str();
    lemma_cmd->add_option("--seed", lemma.seed, "Seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*limit_cmd) return cmd_limit(limit);
        if (*check_cmd) return cmd_check_weights(check);
        if (*lemma_cmd) return cmd_lemma(lemma);
    } catch (const UsageError& e) {
        std::cerr << "asc-extremes: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "asc-extremes: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
