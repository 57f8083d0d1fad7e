#include "asx/limit_laws.hpp"

#include "asx/compensated_sum.hpp"
#include "asx/text.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shape(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("limit family shape must be a positive finite number");
    }
}

// Inverse of tau on (0, inf).
double tau_inverse(const LimitFamily& family, double t) {
    switch (family.kind()) {
        case FamilyKind::Gumbel:
            return -std::log(t);
        case FamilyKind::Frechet:
            return std::pow(t, -1.0 / family.shape());
        case FamilyKind::Weibull:
            return -std::pow(t, 1.0 / family.shape());
    }
    return 0.0;
}

}  // namespace

LimitFamily LimitFamily::gumbel() { return {FamilyKind::Gumbel, 1.0}; }

LimitFamily LimitFamily::frechet(double alpha) {
    require_shape(alpha);
    return {FamilyKind::Frechet, alpha};
}

LimitFamily LimitFamily::weibull(double alpha) {
    require_shape(alpha);
    return {FamilyKind::Weibull, alpha};
}

LimitFamily LimitFamily::parse(std::string_view text) {
    if (text == "gumbel") return gumbel();
    auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        auto head = text.substr(0, colon);
        double alpha = parse_number(text.substr(colon + 1), "family shape");
        if (head == "frechet") return frechet(alpha);
        if (head == "weibull") return weibull(alpha);
    }
    throw std::invalid_argument("unknown limit family '" + std::string(text) +
                                "' (expected gumbel, frechet:A or weibull:A)");
}

std::string LimitFamily::name() const {
    switch (kind_) {
        case FamilyKind::Gumbel:
            return "gumbel";
        case FamilyKind::Frechet:
            return "frechet:" + format_shortest(shape_);
        case FamilyKind::Weibull:
            return "weibull:" + format_shortest(shape_);
    }
    return "unknown";
}

LevelVector LevelVector::joint(std::vector<double> levels) {
    std::vector<int> ranks(levels.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = static_cast<int>(i) + 1;
    return LevelVector(std::move(levels), std::move(ranks));
}

LevelVector::LevelVector(std::vector<double> levels, std::vector<int> ranks)
    : levels_(std::move(levels)), ranks_(std::move(ranks)) {
    if (levels_.empty()) throw std::invalid_argument("at least one level is required");
    if (levels_.size() != ranks_.size()) {
        throw std::invalid_argument("levels and ranks must have the same length");
    }
    for (double x : levels_) {
        if (std::isnan(x)) throw std::invalid_argument("levels must not be NaN");
    }
    for (std::size_t i = 1; i < levels_.size(); ++i) {
        if (!(levels_[i] < levels_[i - 1])) {
            throw std::invalid_argument("levels must be strictly decreasing");
        }
    }
    if (ranks_.front() < 1) throw std::invalid_argument("ranks must be positive");
    for (std::size_t i = 1; i < ranks_.size(); ++i) {
        if (ranks_[i] <= ranks_[i - 1]) {
            throw std::invalid_argument("ranks must be strictly increasing");
        }
    }
}

bool LevelVector::is_joint() const {
    for (std::size_t i = 0; i < ranks_.size(); ++i) {
        if (ranks_[i] != static_cast<int>(i) + 1) return false;
    }
    return true;
}

double tau(const LimitFamily& family, double x) {
    switch (family.kind()) {
        case FamilyKind::Gumbel:
            return std::exp(-x);
        case FamilyKind::Frechet:
            return x > 0.0 ? std::pow(x, -family.shape()) : kInf;
        case FamilyKind::Weibull:
            return x < 0.0 ? std::pow(-x, family.shape()) : 0.0;
    }
    return kInf;
}

double gev_cdf(const LimitFamily& family, double x) { return std::exp(-tau(family, x)); }

double gev_quantile(const LimitFamily& family, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("gev_quantile: probability must lie in (0, 1)");
    }
    return tau_inverse(family, -std::log(p));
}

double marginal_limit(const LimitFamily& family, int k, double x) {
    if (k < 1) throw std::invalid_argument("marginal_limit: k must be at least 1");
    const double t = tau(family, x);
    if (std::isinf(t)) return 0.0;
    double term = std::exp(-t);
    double sum = term;
    for (int i = 1; i < k; ++i) {
        term *= t / i;
        sum += term;
    }
    return std::min(sum, 1.0);
}

double constrained_poisson_prob(std::span<const double> lambdas, std::span<const int> caps) {
    if (lambdas.size() != caps.size()) {
        throw std::invalid_argument("constrained_poisson_prob: lambdas and caps differ in length");
    }
    for (std::size_t i = 0; i < caps.size(); ++i) {
        if (caps[i] < 0) throw std::invalid_argument("constrained_poisson_prob: caps must be nonnegative");
        if (i > 0 && caps[i] < caps[i - 1]) {
            throw std::invalid_argument("constrained_poisson_prob: caps must be nondecreasing");
        }
        if (std::isnan(lambdas[i]) || lambdas[i] < 0.0) {
            throw std::invalid_argument("constrained_poisson_prob: intensities must be nonnegative");
        }
    }
    if (lambdas.empty()) return 1.0;
    for (double lambda : lambdas) {
        if (std::isinf(lambda)) return 0.0;
    }

    const int top = caps.back();
    // dp[s] = P(cumulative count after the blocks seen so far equals s, all caps met)
    std::vector<double> dp(static_cast<std::size_t>(top) + 1, 0.0);
    std::vector<double> next(dp.size());
    std::vector<double> pmf(dp.size());
    dp[0] = 1.0;
    int reach = 0;
    for (std::size_t block = 0; block < lambdas.size(); ++block) {
        const double lambda = lambdas[block];
        const int cap = caps[block];
        pmf[0] = std::exp(-lambda);
        for (int n = 1; n <= cap; ++n) pmf[n] = pmf[n - 1] * lambda / n;

        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s <= cap; ++s) {
            double acc = 0.0;
            for (int t = std::min(s, reach); t >= 0; --t) acc += dp[t] * pmf[s - t];
            next[s] = acc;
        }
        dp.swap(next);
        reach = cap;
    }
    double total = 0.0;
    for (int s = 0; s <= reach; ++s) total += dp[s];
    return total;
}

namespace {

double poisson_exceedance_limit(const LimitFamily& family, const LevelVector& xs) {
    const auto levels = xs.levels();
    const auto ranks = xs.ranks();
    std::vector<double> lambdas(levels.size());
    std::vector<int> caps(levels.size());
    double previous = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double t = tau(family, levels[j]);
        if (std::isinf(t)) return 0.0;
        // tau is nondecreasing along decreasing levels; clamp rounding residue
        lambdas[j] = std::max(t - previous, 0.0);
        previous = t;
        caps[j] = ranks[j] - 1;
    }
    return constrained_poisson_prob(lambdas, caps);
}

}  // namespace

double joint_limit(const LimitFamily& family, const LevelVector& xs) {
    if (!xs.is_joint()) throw std::invalid_argument("joint_limit: ranks must be 1..k");
    return poisson_exceedance_limit(family, xs);
}

double subset_marginal(const LimitFamily& family, const LevelVector& xs) {
    return poisson_exceedance_limit(family, xs);
}

double marginal_limit_quantile(const LimitFamily& family, int k, double p) {
    if (k < 1) throw std::invalid_argument("marginal_limit_quantile: k must be at least 1");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("marginal_limit_quantile: probability must lie in (0, 1)");
    }
    // H_k(x) = P(Poisson(tau(x)) <= k - 1) = Q(k, tau(x)), the regularized upper gamma.
    const double t = p < 0.5 ? boost::math::gamma_q_inv(static_cast<double>(k), p)
                             : boost::math::gamma_p_inv(static_cast<double>(k), 1.0 - p);
    return tau_inverse(family, t);
}

QuadratureResult integral_against_hk(const TestFunction& f, const LimitFamily& family, int k,
                                     std::size_t grid_size) {
    if (grid_size < 2) throw std::invalid_argument("integral_against_hk: grid_size must be at least 2");
    if (!f.eval) throw std::invalid_argument("integral_against_hk: test function is empty");
    if (!std::isfinite(f.bound) || f.bound < 0.0) {
        throw std::invalid_argument("integral_against_hk: test function '" + f.name +
                                    "' has no finite bound");
    }

    auto midpoint_rule = [&](std::size_t cells) {
        const double width = 1.0 / static_cast<double>(cells);
        CompensatedSum sum;
        for (std::size_t i = 0; i < cells; ++i) {
            const double u = (static_cast<double>(i) + 0.5) * width;
            const double value = f.eval(marginal_limit_quantile(family, k, u));
            if (!(std::abs(value) <= f.bound)) {
                throw std::invalid_argument("integral_against_hk: test function '" + f.name +
                                            "' exceeds its declared bound");
            }
            sum.add(value * width);
        }
        return sum.value();
    };

    const double coarse = midpoint_rule(grid_size);
    const double fine = midpoint_rule(2 * grid_size);
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, f.bound);
    return {fine, std::max(std::abs(fine - coarse), floor)};
}

}  // namespace asx
