#include "asx/oracles.hpp"

#include "asx/streaming.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace asx {

double exact_order_stat_cdf(std::uint64_t n, std::uint64_t j, double p, double q) {
    if (j < 1 || j > n) {
        throw std::out_of_range("order statistic rank j must satisfy 1 <= j <= n");
    }
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("probability must lie in [0, 1]");
    }
    if (q == 0.0 || p == 1.0) return 1.0;
    if (p == 0.0) return 0.0;

    const double dn = static_cast<double>(n);
    const double first = std::pow(p, dn);
    if (j == 1) return first;
    if (j == n) return -std::expm1(dn * std::log(q));
    if (first >= DBL_MIN) {
        // term_i = term_{i-1} * (n - i + 1) / i * q / p; every term is a
        // binomial probability, so nothing overflows once term_0 is normal.
        const double odds = q / p;
        double term = first;
        double sum = first;
        for (std::uint64_t i = 1; i < j; ++i) {
            term *= static_cast<double>(n - i + 1) / static_cast<double>(i) * odds;
            sum += term;
        }
        return std::min(sum, 1.0);
    }

    // p^n underflows: run the same recurrence on logarithms.
    const double log_odds = std::log(q) - std::log(p);
    std::vector<double> log_terms(j);
    log_terms[0] = dn * std::log(p);
    for (std::uint64_t i = 1; i < j; ++i) {
        log_terms[i] = log_terms[i - 1] + std::log(static_cast<double>(n - i + 1) / static_cast<double>(i)) + log_odds;
    }
    const double peak = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (double lt : log_terms) sum += std::exp(lt - peak);
    return std::min(std::exp(peak + std::log(sum)), 1.0);
}

double exact_order_stat_cdf(std::uint64_t n, std::uint64_t j, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
    return exact_order_stat_cdf(n, j, p, 1.0 - p);
}

bool within_bound(const Estimate& e, double bound, double se_multiple) {
    return std::abs(e.estimate) <= bound + se_multiple * e.se;
}

namespace {

constexpr std::uint64_t kPrePassStream = 0xC0FFEE5EEDULL;

std::size_t resolve_threads(std::size_t threads, std::uint64_t replications) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t useful = std::max<std::uint64_t>(1, replications / 256);
    return static_cast<std::size_t>(std::min<std::uint64_t>(threads, useful));
}

// Runs `replications` paths and histograms the pattern code each returns.
// Each worker owns a copy of `sampler` (its scratch trackers); replication r
// always uses root.substream(r).
template <std::size_t Bins, typename Sampler>
std::array<std::uint64_t, Bins> replicate(std::uint64_t replications, const SeededStream& root,
                                          std::size_t threads, const Sampler& sampler) {
    threads = resolve_threads(threads, replications);
    std::vector<std::array<std::uint64_t, Bins>> partial(threads, std::array<std::uint64_t, Bins>{});
    auto work = [&](std::size_t worker) {
        Sampler local = sampler;
        auto& counts = partial[worker];
        for (std::uint64_t r = worker; r < replications; r += threads) {
            SeededStream stream = root.substream(r);
            ++counts[local(stream)];
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    std::array<std::uint64_t, Bins> total{};
    for (const auto& counts : partial) {
        for (std::size_t b = 0; b < Bins; ++b) total[b] += counts[b];
    }
    return total;
}

// The trackers hold uniforms; because the quantile map is nondecreasing the
// j-th largest X is the quantile of the j-th largest U, so only the tracked
// values are ever transformed.
bool event_holds(const TopKTracker& uniforms, const SampleModel& model, std::span<const int> ranks,
                 std::span<const double> thresholds) {
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (model.quantile(uniforms.top(static_cast<std::size_t>(ranks[i]))) > thresholds[i]) return false;
    }
    return true;
}

std::vector<double> levels_at(const SampleModel& model, std::uint64_t n, const LevelVector& levels) {
    const Norming norming = model.norming(n);
    std::vector<double> out;
    out.reserve(levels.size());
    for (double x : levels.levels()) out.push_back(norming.level(x));
    return out;
}

Estimate proportion(std::uint64_t hits, std::uint64_t total) {
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

// Mean and standard error of a statistic that takes value[b] on pattern b.
template <std::size_t Bins>
Estimate pattern_mean(const std::array<std::uint64_t, Bins>& counts, const std::array<double, Bins>& value) {
    double total = 0.0;
    double mean = 0.0;
    for (std::size_t b = 0; b < Bins; ++b) {
        total += static_cast<double>(counts[b]);
        mean += static_cast<double>(counts[b]) * value[b];
    }
    mean /= total;
    double ss = 0.0;
    for (std::size_t b = 0; b < Bins; ++b) {
        ss += static_cast<double>(counts[b]) * (value[b] - mean) * (value[b] - mean);
    }
    const double variance = total > 1.0 ? ss / (total - 1.0) : 0.0;
    return {mean, std::sqrt(variance / total)};
}

void require_lemma_hypotheses(std::uint64_t m, std::uint64_t n, int k) {
    const auto kk = static_cast<std::uint64_t>(k);
    if (m < kk || n < m || n - m < kk) {
        throw std::invalid_argument("lemma hypotheses violated: requires m >= k and n - m >= k (m=" +
                                    std::to_string(m) + ", n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                                    ")");
    }
}

// One path X_1..X_n per replication; reports the joint events for the prefix
// of length m (levels u_m), the full prefix and the segment X_{m+1}..X_n (both
// at levels u_n) as bits 0, 1, 2.
struct PrefixSegmentSampler {
    const SampleModel* model;
    std::uint64_t m;
    std::uint64_t n;
    std::vector<int> ranks;
    std::vector<double> at_m;
    std::vector<double> at_n;
    TopKTracker prefix;
    TopKTracker segment;

    std::size_t operator()(SeededStream& stream) {
        prefix.clear();
        segment.clear();
        bool hit_m = false;
        for (std::uint64_t i = 1; i <= n; ++i) {
            const double u = stream.next_uniform();
            prefix.insert(u);
            if (i > m) segment.insert(u);
            if (i == m) hit_m = event_holds(prefix, *model, ranks, at_m);
        }
        const bool hit_n = event_holds(prefix, *model, ranks, at_n);
        const bool hit_seg = event_holds(segment, *model, ranks, at_n);
        return (hit_m ? 1u : 0u) | (hit_n ? 2u : 0u) | (hit_seg ? 4u : 0u);
    }
};

PrefixSegmentSampler make_prefix_segment_sampler(const SampleModel& model, std::uint64_t m, std::uint64_t n,
                                                 const LevelVector& levels) {
    const auto capacity = static_cast<std::size_t>(levels.max_rank());
    return PrefixSegmentSampler{&model,
                                m,
                                n,
                                std::vector<int>(levels.ranks().begin(), levels.ranks().end()),
                                levels_at(model, m, levels),
                                levels_at(model, n, levels),
                                TopKTracker(capacity),
                                TopKTracker(capacity)};
}

CenteringProbabilities centering_probabilities(const SampleModel& model, std::uint64_t m, std::uint64_t n,
                                               const LevelVector& levels, std::uint64_t replications,
                                               std::uint64_t seed, std::size_t threads) {
    if (levels.size() == 1) {
        const auto j = static_cast<std::uint64_t>(levels.ranks()[0]);
        const double x = levels.levels()[0];
        const double um = model.norming(m).level(x);
        const double un = model.norming(n).level(x);
        return {exact_order_stat_cdf(m, j, model.cdf(um), model.survival(um)),
                exact_order_stat_cdf(n, j, model.cdf(un), model.survival(un)),
                exact_order_stat_cdf(n - m, j, model.cdf(un), model.survival(un)), true};
    }
    const std::uint64_t prepass = 10 * replications;
    const auto counts = replicate<8>(prepass, SeededStream(seed).substream(kPrePassStream), threads,
                                     make_prefix_segment_sampler(model, m, n, levels));
    std::array<std::uint64_t, 3> hits{};
    for (std::size_t b = 0; b < 8; ++b) {
        for (std::size_t bit = 0; bit < 3; ++bit) {
            if (b & (1u << bit)) hits[bit] += counts[b];
        }
    }
    const auto total = static_cast<double>(prepass);
    return {static_cast<double>(hits[0]) / total, static_cast<double>(hits[1]) / total,
            static_cast<double>(hits[2]) / total, false};
}

}  // namespace

Estimate mc_finite_n_joint(const SampleModel& model, std::uint64_t n, const LevelVector& levels,
                           std::uint64_t replications, std::uint64_t seed, std::size_t threads) {
    if (replications < 100) throw std::invalid_argument("mc_finite_n_joint needs at least 100 replications");
    if (n < static_cast<std::uint64_t>(levels.max_rank())) {
        throw std::invalid_argument("mc_finite_n_joint needs n >= the largest rank");
    }
    struct Sampler {
        const SampleModel* model;
        std::uint64_t n;
        std::vector<int> ranks;
        std::vector<double> thresholds;
        TopKTracker tracker;

        std::size_t operator()(SeededStream& stream) {
            tracker.clear();
            for (std::uint64_t i = 0; i < n; ++i) tracker.insert(stream.next_uniform());
            return event_holds(tracker, *model, ranks, thresholds) ? 1 : 0;
        }
    };
    const Sampler sampler{&model, n, std::vector<int>(levels.ranks().begin(), levels.ranks().end()),
                          levels_at(model, n, levels), TopKTracker(static_cast<std::size_t>(levels.max_rank()))};
    const auto counts = replicate<2>(replications, SeededStream(seed), threads, sampler);
    return proportion(counts[1], replications);
}

Lemma1Result lemma1_gap(const SampleModel& model, std::uint64_t n, std::uint64_t m, int j, int k, double x,
                        std::uint64_t replications, std::uint64_t seed, std::size_t threads) {
    if (k < 1 || j < 1 || j > k) throw std::invalid_argument("lemma 1 needs 1 <= j <= k");
    require_lemma_hypotheses(m, n, k);
    if (replications < 100) throw std::invalid_argument("lemma 1 needs at least 100 replications");

    struct Sampler {
        const SampleModel* model;
        std::uint64_t m;
        std::uint64_t n;
        std::size_t rank;
        double threshold;
        TopKTracker prefix;
        TopKTracker segment;

        std::size_t operator()(SeededStream& stream) {
            prefix.clear();
            segment.clear();
            for (std::uint64_t i = 1; i <= n; ++i) {
                const double u = stream.next_uniform();
                prefix.insert(u);
                if (i > m) segment.insert(u);
            }
            const double whole = model->quantile(prefix.top(rank));
            const double tail = model->quantile(segment.top(rank));
            return (whole <= threshold ? 1u : 0u) | (tail <= threshold ? 2u : 0u) | (whole > tail ? 4u : 0u);
        }
    };
    const auto rank = static_cast<std::size_t>(j);
    const double threshold = model.norming(n).level(x);
    const Sampler sampler{&model, m, n, rank, threshold, TopKTracker(rank), TopKTracker(rank)};
    const auto counts = replicate<8>(replications, SeededStream(seed), threads, sampler);

    std::uint64_t differ = 0;
    std::uint64_t ordered = 0;
    for (std::size_t b = 0; b < 8; ++b) {
        if (((b & 1u) != 0) != ((b & 2u) != 0)) differ += counts[b];
        if (b & 4u) ordered += counts[b];
    }

    const auto jj = static_cast<std::uint64_t>(j);
    double none_from_head = 1.0;
    for (std::uint64_t i = 0; i < jj; ++i) {
        none_from_head *= static_cast<double>(n - m - i) / static_cast<double>(n - i);
    }
    const double p = model.cdf(threshold);
    const double q = model.survival(threshold);
    const double ratio = static_cast<double>(m) / static_cast<double>(n);

    Lemma1Result result;
    result.indicator_gap = proportion(differ, replications);
    result.order_gap = proportion(ordered, replications);
    result.exact_indicator_gap = exact_order_stat_cdf(n - m, jj, p, q) - exact_order_stat_cdf(n, jj, p, q);
    result.exact_order_gap = 1.0 - none_from_head;
    result.bound = k * ratio;
    result.rank_bound = j * ratio;
    return result;
}

Lemma2Result lemma2_cov(const SampleModel& model, std::uint64_t m, std::uint64_t n, const LevelVector& levels,
                        std::uint64_t replications, std::uint64_t seed, std::size_t threads) {
    const int k = levels.max_rank();
    require_lemma_hypotheses(m, n, k);
    if (replications < 1000) throw std::invalid_argument("lemma 2 needs at least 1000 replications");

    const CenteringProbabilities centering =
        centering_probabilities(model, m, n, levels, replications, seed, threads);
    const auto counts =
        replicate<8>(replications, SeededStream(seed), threads, make_prefix_segment_sampler(model, m, n, levels));

    std::array<double, 8> product{};
    std::array<double, 8> control{};
    for (std::size_t b = 0; b < 8; ++b) {
        const double eta_m = centered(b & 1u, centering.prefix_m);
        const double eta_n = centered(b & 2u, centering.prefix_n);
        const double eta_seg = centered(b & 4u, centering.segment);
        product[b] = eta_m * eta_n;
        control[b] = eta_m * eta_seg;
    }
    Lemma2Result result;
    result.covariance = pattern_mean(counts, product);
    result.control = pattern_mean(counts, control);
    result.centering = centering;
    result.bound = 2.0 * k * k * static_cast<double>(m) / static_cast<double>(n);
    return result;
}

Lemma3Result lemma3_gap(const SampleModel& model, std::uint64_t m, std::uint64_t n, const LevelVector& levels,
                        std::uint64_t replications, std::uint64_t seed, std::size_t threads) {
    const int k = levels.max_rank();
    require_lemma_hypotheses(m, n, k);
    if (replications < 100) throw std::invalid_argument("lemma 3 needs at least 100 replications");

    const CenteringProbabilities centering =
        centering_probabilities(model, m, n, levels, replications, seed, threads);
    const auto counts =
        replicate<8>(replications, SeededStream(seed), threads, make_prefix_segment_sampler(model, m, n, levels));

    std::array<double, 8> gap{};
    for (std::size_t b = 0; b < 8; ++b) {
        gap[b] = std::abs(centered(b & 2u, centering.prefix_n) - centered(b & 4u, centering.segment));
    }
    Lemma3Result result;
    result.mean_abs_gap = pattern_mean(counts, gap);
    result.centering = centering;
    result.bound = 2.0 * k * k * static_cast<double>(m) / static_cast<double>(n);
    return result;
}

}  // namespace asx
