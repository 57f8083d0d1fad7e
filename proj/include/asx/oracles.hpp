#pragma once

// Ground truth for the finite-n problem: the exact order-statistic CDF, Monte
// Carlo estimates of finite-n joint probabilities and shared-path estimates of
// the three gap/covariance bounds used to prove the path-average theorem.
//
// Every Monte Carlo routine draws replication r from
// SeededStream(seed).substream(r) and aggregates integer pattern counts, so
// results are identical for any thread count.

#include "asx/limit_laws.hpp"
#include "asx/sample_models.hpp"

#include <cstddef>
#include <cstdint>

namespace asx {

struct Estimate {
    double estimate = 0.0;
    double se = 0.0;
};

/// eta = indicator - probability.
inline double centered(bool indicator, double probability) {
    return (indicator ? 1.0 : 0.0) - probability;
}

/// P(M_n^(j) <= x) = sum_{i<j} C(n,i) p^(n-i) (1-p)^i with p = F(x).
/// Requires 1 <= j <= n and p in [0, 1].
double exact_order_stat_cdf(std::uint64_t n, std::uint64_t j, double p);

/// Same, with the survival q = 1 - F(x) supplied separately so that p close
/// to 1 keeps its precision.
double exact_order_stat_cdf(std::uint64_t n, std::uint64_t j, double p, double q);

/// Fraction of R length-n paths with M_n^(k_i) <= u_n(x_i) for all i.
/// Requires R >= 100 and n >= the largest rank.
Estimate mc_finite_n_joint(const SampleModel& model, std::uint64_t n, const LevelVector& levels,
                           std::uint64_t replications, std::uint64_t seed, std::size_t threads = 0);

struct Lemma1Result {
    Estimate indicator_gap;        // E|I{M_n^(j) <= u_n(x)} - I{M_{m,n}^(j) <= u_n(x)}|
    Estimate order_gap;            // P(M_n^(j) > M_{m,n}^(j)), dominates the above for every x
    double exact_indicator_gap;    // P(M_{m,n}^(j) <= u) - P(M_n^(j) <= u)
    double exact_order_gap;        // 1 - C(n-m, j) / C(n, j); m/n for j = 1
    double bound;                  // k m / n
    double rank_bound;             // j m / n
};

/// Shared-path estimate of the Lemma-1 gap. Requires m >= k, n - m >= k, 1 <= j <= k.
Lemma1Result lemma1_gap(const SampleModel& model, std::uint64_t n, std::uint64_t m, int j, int k, double x,
                        std::uint64_t replications, std::uint64_t seed, std::size_t threads = 0);

/// Probabilities used to center the joint indicators.
struct CenteringProbabilities {
    double prefix_m;   // P(joint event for X_1..X_m at levels u_m)
    double prefix_n;   // P(joint event for X_1..X_n at levels u_n)
    double segment;    // P(joint event for X_{m+1}..X_n at levels u_n)
    bool exact;
};

struct Lemma2Result {
    Estimate covariance;    // Cov(eta_m, eta_n)
    Estimate control;       // Cov(eta_m, eta_{m,n}); disjoint index sets, so 0
    CenteringProbabilities centering;
    double bound;           // 2 k^2 m / n
};

struct Lemma3Result {
    Estimate mean_abs_gap;  // E|eta_n - eta_{m,n}|
    CenteringProbabilities centering;
    double bound;           // 2 k^2 m / n
};

/// k is the largest rank in `levels`. Requires m >= k, n - m >= k and at least
/// 1000 replications. Single-level vectors are centred with the exact CDF;
/// otherwise a pre-pass with 10x the replications on separate streams.
Lemma2Result lemma2_cov(const SampleModel& model, std::uint64_t m, std::uint64_t n, const LevelVector& levels,
                        std::uint64_t replications, std::uint64_t seed, std::size_t threads = 0);

/// Requires m >= k and n - m >= k.
Lemma3Result lemma3_gap(const SampleModel& model, std::uint64_t m, std::uint64_t n, const LevelVector& levels,
                        std::uint64_t replications, std::uint64_t seed, std::size_t threads = 0);

/// estimate <= bound + 3 se (absolute value of the estimate for covariances).
bool within_bound(const Estimate& e, double bound, double se_multiple = 3.0);

}  // namespace asx
