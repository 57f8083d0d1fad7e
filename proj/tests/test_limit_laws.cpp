#include "asx/limit_laws.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

using namespace asx;

namespace {

const double kE = std::exp(1.0);
const double kInf = std::numeric_limits<double>::infinity();

std::vector<LimitFamily> all_families() {
    return {LimitFamily::gumbel(), LimitFamily::frechet(1.0), LimitFamily::frechet(2.5),
            LimitFamily::weibull(1.0), LimitFamily::weibull(0.7)};
}

// Independent route: enumerate every count vector with n_j <= cap_max and
// weight it by a pmf computed from pow/tgamma.
double brute_force_poisson(const std::vector<double>& lambdas, const std::vector<int>& caps) {
    const std::size_t l = lambdas.size();
    const int top = caps.back();
    std::vector<int> counts(l, 0);
    double total = 0.0;
    while (true) {
        int running = 0;
        bool ok = true;
        double prob = 1.0;
        for (std::size_t i = 0; i < l; ++i) {
            running += counts[i];
            if (running > caps[i]) ok = false;
            prob *= std::exp(-lambdas[i]) * std::pow(lambdas[i], counts[i]) / std::tgamma(counts[i] + 1.0);
        }
        if (ok) total += prob;
        std::size_t pos = 0;
        while (pos < l && ++counts[pos] > top) counts[pos++] = 0;
        if (pos == l) break;
    }
    return total;
}

}  // namespace

TEST_CASE("gev_cdf closed forms and support endpoints") {
    CHECK(gev_cdf(LimitFamily::gumbel(), 0.0) == doctest::Approx(0.3678794412).epsilon(1e-10));
    CHECK(gev_cdf(LimitFamily::frechet(1.0), 1.0) == doctest::Approx(1.0 / kE).epsilon(1e-14));
    CHECK(gev_cdf(LimitFamily::weibull(1.0), 0.0) == 1.0);
    CHECK(gev_cdf(LimitFamily::frechet(2.0), -3.0) == 0.0);
    CHECK(gev_cdf(LimitFamily::frechet(2.0), 0.0) == 0.0);
    CHECK(gev_cdf(LimitFamily::weibull(3.0), 5.0) == 1.0);
    CHECK(gev_cdf(LimitFamily::gumbel(), -1000.0) == 0.0);
}

TEST_CASE("gev_quantile inverts gev_cdf") {
    CHECK(gev_quantile(LimitFamily::gumbel(), 1.0 / kE) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(gev_quantile(LimitFamily::frechet(1.0), 1.0 / kE) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gev_quantile(LimitFamily::weibull(1.0), 1.0 / kE) == doctest::Approx(-1.0).epsilon(1e-14));
    for (const auto& family : all_families()) {
        for (double p = 0.005; p < 1.0; p += 0.01) {
            CHECK(std::abs(gev_cdf(family, gev_quantile(family, p)) - p) < 1e-12);
        }
    }
    CHECK_THROWS_AS(gev_quantile(LimitFamily::gumbel(), 0.0), std::domain_error);
    CHECK_THROWS_AS(gev_quantile(LimitFamily::gumbel(), 1.0), std::domain_error);
    CHECK_THROWS_AS(gev_quantile(LimitFamily::gumbel(), std::nan("")), std::domain_error);
}

TEST_CASE("tau examples") {
    CHECK(tau(LimitFamily::gumbel(), 0.0) == 1.0);
    CHECK(tau(LimitFamily::gumbel(), std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tau(LimitFamily::weibull(1.0), 0.0) == 0.0);
    CHECK(tau(LimitFamily::frechet(1.0), -1.0) == kInf);
    for (const auto& family : all_families()) {
        double previous = kInf;
        for (double p = 0.02; p < 1.0; p += 0.02) {
            const double x = gev_quantile(family, p);
            const double t = tau(family, x);
            CHECK(t < previous);
            CHECK(t == doctest::Approx(-std::log(gev_cdf(family, x))).epsilon(1e-12));
            previous = t;
        }
    }
}

TEST_CASE("family construction and parsing") {
    CHECK_THROWS_AS(LimitFamily::frechet(0.0), std::invalid_argument);
    CHECK_THROWS_AS(LimitFamily::weibull(-1.0), std::invalid_argument);
    CHECK(LimitFamily::parse("gumbel") == LimitFamily::gumbel());
    CHECK(LimitFamily::parse("frechet:2.5") == LimitFamily::frechet(2.5));
    CHECK(LimitFamily::parse("weibull:1") == LimitFamily::weibull(1.0));
    CHECK(LimitFamily::parse("weibull:1").name() == "weibull:1");
    CHECK_THROWS_AS(LimitFamily::parse("normal"), std::invalid_argument);
    CHECK_THROWS_AS(LimitFamily::parse("frechet:abc"), std::invalid_argument);
}

TEST_CASE("level vectors reject unordered input") {
    CHECK_THROWS_WITH_AS(LevelVector::joint({0.0, 0.0}), "levels must be strictly decreasing",
                         std::invalid_argument);
    CHECK_THROWS_AS(LevelVector::joint({0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(LevelVector({1.0, 0.0}, {2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(LevelVector({1.0, 0.0}, {0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(LevelVector({1.0}, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(LevelVector::joint({}), std::invalid_argument);
    CHECK(LevelVector({1.0, 0.0}, {1, 2}).is_joint());
    CHECK_FALSE(LevelVector({1.0, 0.0}, {1, 3}).is_joint());
}

TEST_CASE("marginal_limit matches the closed form") {
    const auto g = LimitFamily::gumbel();
    CHECK(marginal_limit(g, 1, 0.0) == doctest::Approx(1.0 / kE).epsilon(1e-15));
    CHECK(marginal_limit(g, 2, 0.0) == doctest::Approx(0.7357588823).epsilon(1e-10));
    CHECK(marginal_limit(g, 3, 0.0) == doctest::Approx(0.9196986029).epsilon(1e-10));
    CHECK(marginal_limit(LimitFamily::frechet(1.0), 4, -1.0) == 0.0);
    CHECK_THROWS_AS(marginal_limit(g, 0, 0.0), std::invalid_argument);

    // k = 50 is within 1e-10 of 1 whenever tau <= 5
    for (double t = 0.1; t <= 5.0; t += 0.1) {
        CHECK(1.0 - marginal_limit(g, 50, -std::log(t)) < 1e-10);
    }
}

TEST_CASE("constrained_poisson_prob examples") {
    CHECK(constrained_poisson_prob(std::vector<double>{1.0}, std::vector<int>{0}) ==
          doctest::Approx(1.0 / kE).epsilon(1e-15));
    CHECK(constrained_poisson_prob(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) ==
          doctest::Approx(0.5518191618).epsilon(1e-10));
    CHECK(constrained_poisson_prob(std::vector<double>{1.0, 0.0, 0.0}, std::vector<int>{0, 1, 2}) ==
          doctest::Approx(1.0 / kE).epsilon(1e-15));
    CHECK(constrained_poisson_prob(std::vector<double>{}, std::vector<int>{}) == 1.0);

    // the stated example, against the enumeration oracle
    CHECK(std::abs(constrained_poisson_prob(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) -
                   brute_force_poisson({0.5, 0.5}, {0, 1})) < 1e-15);
}

TEST_CASE("constrained_poisson_prob error handling and infinite intensity") {
    CHECK_THROWS_AS(constrained_poisson_prob(std::vector<double>{1.0, 1.0}, std::vector<int>{2, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(constrained_poisson_prob(std::vector<double>{-1.0}, std::vector<int>{1}), std::invalid_argument);
    CHECK_THROWS_AS(constrained_poisson_prob(std::vector<double>{1.0}, std::vector<int>{1, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(constrained_poisson_prob(std::vector<double>{std::nan("")}, std::vector<int>{1}),
                    std::invalid_argument);
    CHECK(constrained_poisson_prob(std::vector<double>{0.5, kInf}, std::vector<int>{0, 3}) == 0.0);
    CHECK(constrained_poisson_prob(std::vector<double>{kInf, 0.0}, std::vector<int>{5, 5}) == 0.0);
}

TEST_CASE("constrained_poisson_prob equals brute-force enumeration") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> lambda_dist(0.0, 3.0);
    std::uniform_int_distribution<int> len_dist(1, 4);
    std::uniform_int_distribution<int> step_dist(0, 2);
    for (int draw = 0; draw < 200; ++draw) {
        const int l = len_dist(rng);
        std::vector<double> lambdas(l);
        std::vector<int> caps(l);
        int cap = 0;
        for (int i = 0; i < l; ++i) {
            lambdas[i] = lambda_dist(rng);
            cap = std::min(5, cap + step_dist(rng));
            caps[i] = cap;
        }
        CHECK(std::abs(constrained_poisson_prob(lambdas, caps) - brute_force_poisson(lambdas, caps)) < 1e-12);
    }
}

TEST_CASE("merging blocks behind a non-binding intermediate cap") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lambda_dist(0.0, 2.0);
    for (int draw = 0; draw < 50; ++draw) {
        const double a = lambda_dist(rng), b = lambda_dist(rng), c = lambda_dist(rng);
        // caps (1, 3, 3): the middle cap equals the next one and cannot bind alone
        const double split = constrained_poisson_prob(std::vector<double>{a, b, c}, std::vector<int>{1, 3, 3});
        const double merged = constrained_poisson_prob(std::vector<double>{a, b + c}, std::vector<int>{1, 3});
        CHECK(std::abs(split - merged) < 1e-12);
    }
}

TEST_CASE("joint_limit examples") {
    const auto g = LimitFamily::gumbel();
    for (const auto& family : all_families()) {
        for (double p = 0.05; p < 1.0; p += 0.1) {
            const double x = gev_quantile(family, p);
            CHECK(std::abs(joint_limit(family, LevelVector::joint({x})) - gev_cdf(family, x)) < 1e-12);
        }
    }
    const double two_level = joint_limit(g, LevelVector::joint({std::log(2.0), 0.0}));
    CHECK(two_level == doctest::Approx(0.5518191618).epsilon(1e-10));
    // closed form exp(-tau_2)(1 + tau_2 - tau_1)
    for (double x1 = 0.2; x1 < 3.0; x1 += 0.35) {
        const double x2 = x1 - 0.8;
        const double t1 = std::exp(-x1), t2 = std::exp(-x2);
        CHECK(std::abs(joint_limit(g, LevelVector::joint({x1, x2})) - std::exp(-t2) * (1.0 + t2 - t1)) < 1e-12);
    }
    CHECK_THROWS_AS(joint_limit(g, LevelVector::joint({0.0, 0.0})), std::invalid_argument);
    CHECK_THROWS_AS(joint_limit(g, LevelVector({1.0, 0.0}, {1, 3})), std::invalid_argument);
    // levels below the Frechet support collapse to 0
    CHECK(joint_limit(LimitFamily::frechet(2.0), LevelVector::joint({1.0, -1.0})) == 0.0);
    // all levels at the top of the Weibull support
    CHECK(joint_limit(LimitFamily::weibull(1.0), LevelVector::joint({2.0, 1.0, 0.0})) == 1.0);
}

TEST_CASE("subset_marginal examples and consistency") {
    const auto g = LimitFamily::gumbel();
    CHECK(subset_marginal(g, LevelVector({0.0}, {2})) == doctest::Approx(2.0 / kE).epsilon(1e-14));
    const LevelVector pair({std::log(2.0), 0.0}, {1, 2});
    CHECK(subset_marginal(g, pair) == joint_limit(g, pair));
    CHECK(subset_marginal(g, LevelVector({std::log(2.0), 0.0}, {1, 3})) ==
          doctest::Approx(1.625 / kE).epsilon(1e-14));
    CHECK(std::abs(subset_marginal(g, LevelVector({std::log(2.0), 0.0}, {1, 3})) -
                   brute_force_poisson({0.5, 0.5}, {0, 2})) < 1e-15);

    for (const auto& family : all_families()) {
        for (int k = 1; k <= 8; ++k) {
            for (int i = 0; i < 50; ++i) {
                const double x = gev_quantile(family, (i + 0.5) / 50.0);
                CHECK(std::abs(subset_marginal(family, LevelVector({x}, {k})) - marginal_limit(family, k, x)) < 1e-12);
            }
        }
    }
}

TEST_CASE("joint_limit is nondecreasing in each level") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-2.0, 4.0);
    std::uniform_real_distribution<double> bump(0.0, 0.3);
    const auto g = LimitFamily::gumbel();
    for (int draw = 0; draw < 300; ++draw) {
        std::vector<double> xs{dist(rng), dist(rng), dist(rng)};
        std::sort(xs.begin(), xs.end(), std::greater<>());
        if (xs[0] - xs[1] < 1e-3 || xs[1] - xs[2] < 1e-3) continue;
        const double base = joint_limit(g, LevelVector::joint(xs));
        for (std::size_t j = 0; j < 3; ++j) {
            auto raised = xs;
            raised[j] += bump(rng);
            if (j > 0 && raised[j] >= raised[j - 1]) continue;
            CHECK(joint_limit(g, LevelVector::joint(raised)) >= base - 1e-15);
        }
    }
}

TEST_CASE("marginal_limit_quantile inverts H_k") {
    for (const auto& family : all_families()) {
        for (int k : {1, 2, 5}) {
            for (double p : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
                const double x = marginal_limit_quantile(family, k, p);
                CHECK(marginal_limit(family, k, x) == doctest::Approx(p).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("integral_against_hk") {
    const TestFunction one{"one", [](double) { return 1.0; }, 1.0};
    for (const auto& family : all_families()) {
        for (int k : {1, 2, 4}) {
            CHECK(std::abs(integral_against_hk(one, family, k, 256).value - 1.0) < 1e-9);
        }
        const TestFunction g{"gev_cdf", [family](double x) { return gev_cdf(family, x); }, 1.0};
        CHECK(std::abs(integral_against_hk(g, family, 1, 4096).value - 0.5) < 1e-6);
    }

    SUBCASE("clip against H_2 of the Gumbel law") {
        const auto g = LimitFamily::gumbel();
        const TestFunction clip{"clip", [](double x) { return std::clamp(x, -1.0, 1.0); }, 1.0};
        // Integrating by parts, the integral of clip against H equals
        // 1 - integral_{-1}^{1} H(x) dx; refine that with 10^7 midpoint steps.
        const int steps = 10'000'000;
        const double h = 2.0 / steps;
        long double area = 0.0L;
        for (int i = 0; i < steps; ++i) {
            const double t = std::exp(-(-1.0 + (i + 0.5) * h));
            area += std::exp(-t) * (1.0 + t);
        }
        const double oracle = 1.0 - static_cast<double>(area * h);
        CHECK(oracle == doctest::Approx(-0.366895918905).epsilon(1e-11));

        const QuadratureResult result = integral_against_hk(clip, g, 2, 1 << 14);
        CHECK(std::abs(result.value - oracle) < 1e-6);
        CHECK(std::abs(result.value - oracle) <= result.error_estimate + 1e-9);

        // doubling the grid moves the value by less than the reported error
        const QuadratureResult finer = integral_against_hk(clip, g, 2, 1 << 15);
        CHECK(std::abs(finer.value - result.value) < result.error_estimate);
    }

    const TestFunction unbounded{"x", [](double x) { return x; }, kInf};
    CHECK_THROWS_AS(integral_against_hk(unbounded, LimitFamily::gumbel(), 1, 16), std::invalid_argument);
    const TestFunction lying{"x", [](double x) { return x; }, 1.0};
    CHECK_THROWS_AS(integral_against_hk(lying, LimitFamily::gumbel(), 1, 16), std::invalid_argument);
    CHECK_THROWS_AS(integral_against_hk(one, LimitFamily::gumbel(), 1, 1), std::invalid_argument);
}
