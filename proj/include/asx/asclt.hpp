#pragma once

// Weighted path averages of order-statistic functionals along one seeded
// sample path, reported at checkpoints next to their analytic limits.

#include "asx/limit_laws.hpp"
#include "asx/sample_models.hpp"
#include "asx/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asx {

inline constexpr int kMaxTrackedRank = 64;

enum class PathMode { Joint, SubsetMarginal, Functional };

/// Built-in bounded Lipschitz-1 test functions for the functional average.
///   Clip:   max(-1, min(1, x - shift))
///   GevCdf: G(x) of the model's limit family
struct FunctionalSpec {
    enum class Kind { Clip, GevCdf };
    Kind kind = Kind::Clip;
    double shift = 0.0;

    /// "clip", "clip:C" or "gev_cdf".
    static FunctionalSpec parse(std::string_view text);
    std::string name() const;
};

TestFunction make_test_function(const FunctionalSpec& spec, const LimitFamily& family);

struct ExperimentConfig {
    SampleModel model = SampleModel::exponential();
    int k = 1;
    PathMode mode = PathMode::Joint;
    std::optional<LevelVector> levels;          // Joint and SubsetMarginal
    std::optional<FunctionalSpec> functional;   // Functional
    WeightScheme scheme = WeightScheme::log_average();
    std::uint64_t n_max = 1 << 20;
    std::vector<std::uint64_t> checkpoints;     // empty: geometric default
    std::uint64_t seed = 1;
    std::size_t quadrature_grid = 1 << 14;

    /// First n that contributes to the weighted sum: k for Joint and
    /// Functional, the largest rank for SubsetMarginal.
    std::uint64_t first_index() const;
    std::vector<std::uint64_t> resolved_checkpoints() const;
    /// Throws std::invalid_argument describing the first inconsistency.
    void validate() const;
};

/// 2^7, 2^8, ... below n_max, then n_max.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t n_max);

struct SeriesRow {
    std::uint64_t n;
    double cumulative_weight;  // D_N
    double average;            // A_N
    double limit;
    double abs_error;
};

struct ConvergenceSeries {
    std::vector<SeriesRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// Indicator modes. Streams X_1..X_{n_max} once; accumulates d_n times the
/// indicator for n >= first_index() and divides by D_N = sum_{n >= start} d_n.
ConvergenceSeries run_path(const ExperimentConfig& config);

/// Functional mode: accumulates d_n f((M_n^(k) - b_n) / a_n); the limit
/// column is the integral of f against H_k.
ConvergenceSeries run_functional_path(const ExperimentConfig& config);

/// Dispatches on config.mode.
ConvergenceSeries run_experiment(const ExperimentConfig& config);

/// One run per seed, spread over at most `threads` workers (0: one per seed).
/// Results are returned in seed order and do not depend on the thread count.
std::vector<ConvergenceSeries> run_seed_sweep(const ExperimentConfig& config,
                                              const std::vector<std::uint64_t>& seeds,
                                              std::size_t threads = 0);

/// Analytic limit for the configured mode.
double analytic_limit(const ExperimentConfig& config);

}  // namespace asx
