#include "asx/asclt.hpp"

#include "asx/compensated_sum.hpp"
#include "asx/streaming.hpp"
#include "asx/text.hpp"
#include "asx/version.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace asx {

FunctionalSpec FunctionalSpec::parse(std::string_view text) {
    if (text == "clip") return {Kind::Clip, 0.0};
    if (text == "gev_cdf") return {Kind::GevCdf, 0.0};
    if (text.starts_with("clip:")) return {Kind::Clip, parse_number(text.substr(5), "clip shift")};
    throw std::invalid_argument("unknown test function '" + std::string(text) +
                                "' (expected clip, clip:C or gev_cdf)");
}

std::string FunctionalSpec::name() const {
    if (kind == Kind::GevCdf) return "gev_cdf";
    return shift == 0.0 ? "clip" : "clip:" + format_shortest(shift);
}

TestFunction make_test_function(const FunctionalSpec& spec, const LimitFamily& family) {
    if (spec.kind == FunctionalSpec::Kind::GevCdf) {
        return {spec.name(), [family](double x) { return gev_cdf(family, x); }, 1.0};
    }
    if (std::isnan(spec.shift)) throw std::invalid_argument("clip shift must be a number");
    const double shift = spec.shift;
    return {spec.name(), [shift](double x) { return std::clamp(x - shift, -1.0, 1.0); }, 1.0};
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t n_max) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 128; n < n_max; n *= 2) out.push_back(n);
    out.push_back(n_max);
    return out;
}

std::uint64_t ExperimentConfig::first_index() const {
    if (mode == PathMode::SubsetMarginal && levels) return static_cast<std::uint64_t>(levels->max_rank());
    return static_cast<std::uint64_t>(k);
}

std::vector<std::uint64_t> ExperimentConfig::resolved_checkpoints() const {
    return checkpoints.empty() ? default_checkpoints(n_max) : checkpoints;
}

void ExperimentConfig::validate() const {
    if (k < 1 || k > kMaxTrackedRank) {
        throw std::invalid_argument("k must lie in 1.." + std::to_string(kMaxTrackedRank));
    }
    switch (mode) {
        case PathMode::Joint:
            if (!levels) throw std::invalid_argument("joint mode needs levels");
            if (!levels->is_joint() || levels->size() != static_cast<std::size_t>(k)) {
                throw std::invalid_argument("joint mode needs exactly k levels with ranks 1..k");
            }
            break;
        case PathMode::SubsetMarginal:
            if (!levels) throw std::invalid_argument("subset mode needs levels");
            if (levels->max_rank() > k) throw std::invalid_argument("ranks must not exceed k");
            break;
        case PathMode::Functional:
            if (!functional) throw std::invalid_argument("functional mode needs a test function");
            break;
    }
    if (n_max < 1) throw std::invalid_argument("n must be positive");
    const auto points = resolved_checkpoints();
    const std::uint64_t lowest = std::max(scheme.start(), first_index());
    if (points.back() != n_max) throw std::invalid_argument("the last checkpoint must equal n");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] < lowest) {
            throw std::invalid_argument("checkpoints must be at least " + std::to_string(lowest));
        }
        if (i > 0 && points[i] <= points[i - 1]) {
            throw std::invalid_argument("checkpoints must be strictly increasing");
        }
    }
}

namespace {

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config) {
    std::vector<std::pair<std::string, std::string>> meta{
        {"version", std::string(kVersion)},
        {"model", config.model.name()},
        {"k", std::to_string(config.k)},
        {"weights", config.scheme.name()},
        {"weight_start", std::to_string(config.scheme.start())},
        {"n", std::to_string(config.n_max)},
        {"seed", std::to_string(config.seed)},
        {"first_index", std::to_string(config.first_index())},
    };
    if (config.levels) {
        std::string levels, ranks;
        for (std::size_t i = 0; i < config.levels->size(); ++i) {
            if (i > 0) {
                levels += ',';
                ranks += ',';
            }
            levels += format_shortest(config.levels->levels()[i]);
            ranks += std::to_string(config.levels->ranks()[i]);
        }
        meta.emplace_back("levels", levels);
        meta.emplace_back("ranks", ranks);
    }
    switch (config.mode) {
        case PathMode::Joint: meta.emplace_back("mode", "joint"); break;
        case PathMode::SubsetMarginal: meta.emplace_back("mode", "subset"); break;
        case PathMode::Functional: meta.emplace_back("mode", "functional:" + config.functional->name()); break;
    }
    // D_N starts at the weight start index while the sum starts at first_index;
    // the gap sum_{start <= n < first_index} d_n / D_N vanishes as N grows.
    meta.emplace_back("normalization", "D_N sums from weight_start; accumulation from max(first_index, weight_start)");
    return meta;
}

// Shared single-pass driver. `contribution(tracker, norming)` returns the
// value multiplied by d_n at step n.
template <typename Contribution>
ConvergenceSeries run_driver(const ExperimentConfig& config, std::size_t capacity, double limit,
                             Contribution&& contribution) {
    const auto checkpoints = config.resolved_checkpoints();
    const std::uint64_t first = config.first_index();
    const std::uint64_t start = config.scheme.start();

    ConvergenceSeries series;
    series.metadata = describe(config);
    series.rows.reserve(checkpoints.size());

    SeededStream stream(config.seed);
    TopKTracker tracker(capacity);
    CompensatedSum total_weight;
    CompensatedSum weighted;
    std::size_t next_checkpoint = 0;
    for (std::uint64_t n = 1; n <= config.n_max; ++n) {
        tracker.insert(sample(config.model, stream));
        if (n < start) continue;
        const double d = weight(config.scheme, n);
        total_weight.add(d);
        if (n >= first) {
            weighted.add(d * contribution(tracker, norming_constants(config.model, n)));
        }
        if (n == checkpoints[next_checkpoint]) {
            const double dn = total_weight.value();
            const double average = weighted.value() / dn;
            series.rows.push_back({n, dn, average, limit, std::abs(average - limit)});
            ++next_checkpoint;
        }
    }
    return series;
}

}  // namespace

double analytic_limit(const ExperimentConfig& config) {
    const LimitFamily family = config.model.limit_family();
    switch (config.mode) {
        case PathMode::Joint:
            return joint_limit(family, *config.levels);
        case PathMode::SubsetMarginal:
            return subset_marginal(family, *config.levels);
        case PathMode::Functional:
            return integral_against_hk(make_test_function(*config.functional, family), family, config.k,
                                       config.quadrature_grid)
                .value;
    }
    return 0.0;
}

ConvergenceSeries run_path(const ExperimentConfig& config) {
    config.validate();
    if (config.mode == PathMode::Functional) {
        throw std::invalid_argument("run_path handles indicator modes; use run_functional_path");
    }
    const LevelVector& levels = *config.levels;
    const std::vector<double> xs(levels.levels().begin(), levels.levels().end());
    const std::vector<int> ranks(levels.ranks().begin(), levels.ranks().end());
    std::vector<double> thresholds(xs.size());
    const double limit = analytic_limit(config);

    const bool joint = config.mode == PathMode::Joint;
    return run_driver(config, static_cast<std::size_t>(config.k), limit,
                      [&](const TopKTracker& tracker, const Norming& norming) {
                          for (std::size_t j = 0; j < xs.size(); ++j) thresholds[j] = norming.level(xs[j]);
                          const bool hit = joint ? tracker.joint_indicator(thresholds)
                                                 : tracker.rank_indicator(ranks, thresholds);
                          return hit ? 1.0 : 0.0;
                      });
}

ConvergenceSeries run_functional_path(const ExperimentConfig& config) {
    config.validate();
    if (config.mode != PathMode::Functional) {
        throw std::invalid_argument("run_functional_path needs functional mode");
    }
    const LimitFamily family = config.model.limit_family();
    const TestFunction f = make_test_function(*config.functional, family);
    const QuadratureResult integral = integral_against_hk(f, family, config.k, config.quadrature_grid);
    const auto rank = static_cast<std::size_t>(config.k);

    ConvergenceSeries series =
        run_driver(config, rank, integral.value, [&](const TopKTracker& tracker, const Norming& norming) {
            return f.eval(norming.normalize(tracker.top(rank)));
        });
    series.metadata.emplace_back("quadrature_error", format_shortest(integral.error_estimate));
    return series;
}

ConvergenceSeries run_experiment(const ExperimentConfig& config) {
    return config.mode == PathMode::Functional ? run_functional_path(config) : run_path(config);
}

std::vector<ConvergenceSeries> run_seed_sweep(const ExperimentConfig& config,
                                              const std::vector<std::uint64_t>& seeds, std::size_t threads) {
    config.validate();
    std::vector<ConvergenceSeries> results(seeds.size());
    if (threads == 0 || threads > seeds.size()) threads = seeds.size();
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                ExperimentConfig local = config;
                local.seed = seeds[i];
                results[i] = run_experiment(local);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace asx
