#pragma once

// Extreme-value limit laws: the three max-stable CDFs G, exceedance
// intensities tau = -log G, the marginal laws H_k of the k-th maximum and the
// joint law of the top order statistics computed from Poisson exceedance counts.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asx {

enum class FamilyKind { Gumbel, Frechet, Weibull };

class LimitFamily {
public:
    static LimitFamily gumbel();
    static LimitFamily frechet(double alpha);
    static LimitFamily weibull(double alpha);

    /// Parses "gumbel", "frechet:A" or "weibull:A".
    static LimitFamily parse(std::string_view text);

    FamilyKind kind() const { return kind_; }
    /// Shape parameter; 1.0 for Gumbel where it is unused.
    double shape() const { return shape_; }
    std::string name() const;

    bool operator==(const LimitFamily&) const = default;

private:
    LimitFamily(FamilyKind kind, double shape) : kind_(kind), shape_(shape) {}

    FamilyKind kind_;
    double shape_;
};

/// Strictly decreasing levels x_1 > ... > x_l paired with strictly
/// increasing ranks k_1 < ... < k_l. The joint form uses ranks 1..l.
class LevelVector {
public:
    static LevelVector joint(std::vector<double> levels);
    LevelVector(std::vector<double> levels, std::vector<int> ranks);

    std::span<const double> levels() const { return levels_; }
    std::span<const int> ranks() const { return ranks_; }
    std::size_t size() const { return levels_.size(); }
    int max_rank() const { return ranks_.back(); }
    bool is_joint() const;

private:
    std::vector<double> levels_;
    std::vector<int> ranks_;
};

double gev_cdf(const LimitFamily& family, double x);

/// Inverse of gev_cdf on (0, 1). Throws std::domain_error outside.
double gev_quantile(const LimitFamily& family, double p);

/// -log G(x), evaluated directly from the family's closed form so that it
/// keeps full relative precision where G is close to 1. +inf where G(x) = 0.
double tau(const LimitFamily& family, double x);

/// H_k(x) = G(x) * sum_{i<k} tau^i / i!.
double marginal_limit(const LimitFamily& family, int k, double x);

/// P(S_i <= caps[i] for every i), where S_i = N_1 + ... + N_i and N_j are
/// independent Poisson(lambdas[j]). Exact dynamic program over the cumulative
/// count; an infinite intensity makes every finite cap fail, so the result is 0.
double constrained_poisson_prob(std::span<const double> lambdas, std::span<const int> caps);

/// Joint limit H(x_1, ..., x_k) of (M^(1), ..., M^(k)). Requires ranks 1..k.
double joint_limit(const LimitFamily& family, const LevelVector& xs);

/// Marginal H* of the joint law over the ranks carried by xs.
double subset_marginal(const LimitFamily& family, const LevelVector& xs);

/// A bounded test function with its declared sup-norm bound.
struct TestFunction {
    std::string name;
    std::function<double(double)> eval;
    double bound;
};

struct QuadratureResult {
    double value;
    double error_estimate;
};

/// Quantile of H_k: the x with H_k(x) = p, for p in (0, 1).
double marginal_limit_quantile(const LimitFamily& family, int k, double p);

/// Integral of f against dH_k. Midpoint rule on an equal-probability grid of
/// H_k (so the grid carries all of the mass); the value is the 2*grid_size
/// rule and the error estimate is its distance to the grid_size rule.
QuadratureResult integral_against_hk(const TestFunction& f, const LimitFamily& family, int k,
                                     std::size_t grid_size);

}  // namespace asx
