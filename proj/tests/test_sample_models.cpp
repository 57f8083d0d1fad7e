#include "asx/sample_models.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace asx;

namespace {

std::vector<SampleModel> all_models() {
    return {SampleModel::exponential(), SampleModel::pareto(2.0), SampleModel::pareto(0.7), SampleModel::uniform01()};
}

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
double ks_distance(std::vector<double> xs, const SampleModel& model) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = model.cdf(xs[i]);
        worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return worst;
}

}  // namespace

TEST_CASE("seeded stream is a pure function of seed and position") {
    SeededStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_bits() == b.next_bits());
    CHECK(a.position() == 100);

    SeededStream skip(42, 57);
    SeededStream walk(42);
    for (int i = 0; i < 57; ++i) walk.next_uniform();
    CHECK(skip.next_uniform() == walk.next_uniform());

    // adjacent seeds are not shifted copies of each other
    SeededStream s1(1), s2(2);
    std::vector<std::uint64_t> first(64), second(64);
    for (auto& v : first) v = s1.next_bits();
    for (auto& v : second) v = s2.next_bits();
    for (std::size_t lag = 0; lag < 8; ++lag) CHECK(first[lag + 1] != second[lag]);
    CHECK(first != second);

    const SeededStream root(9);
    CHECK(root.substream(0).next_bits() != root.substream(1).next_bits());
    CHECK(root.substream(3).next_bits() == SeededStream(9).substream(3).next_bits());
}

TEST_CASE("uniforms lie strictly inside the unit interval") {
    SeededStream s(0);
    double lo = 1.0, hi = 0.0, mean = 0.0;
    const int n = 200'000;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        mean += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(mean / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("sample applies the quantile to the next uniform") {
    CHECK(SampleModel::uniform01().quantile(0.3) == 0.3);
    CHECK(SampleModel::exponential().quantile(1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(SampleModel::pareto(2.0).quantile(0.75) == doctest::Approx(2.0).epsilon(1e-14));

    for (const auto& model : all_models()) {
        SeededStream stream(11), shadow(11);
        for (int i = 0; i < 10; ++i) CHECK(sample(model, stream) == model.quantile(shadow.next_uniform()));
        CHECK(stream.position() == 10);
    }
}

TEST_CASE("quantile inverts the cdf and survival complements it") {
    for (const auto& model : all_models()) {
        CAPTURE(model.name());
        for (double u = 0.001; u < 1.0; u += 0.0123) {
            const double x = model.quantile(u);
            CHECK(model.cdf(x) == doctest::Approx(u).epsilon(1e-12));
            CHECK(std::abs(model.quantile(model.cdf(x)) - x) < 1e-10 * std::max(1.0, std::abs(x)));
            CHECK(model.cdf(x) + model.survival(x) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("norming constants satisfy the max-domain criterion") {
    CHECK(norming_constants(SampleModel::exponential(), 1000).location == doctest::Approx(std::log(1000.0)));
    CHECK(norming_constants(SampleModel::pareto(2.0), 10000).scale == doctest::Approx(100.0));
    CHECK(norming_constants(SampleModel::uniform01(), 8).scale == 0.125);
    CHECK_THROWS_AS(norming_constants(SampleModel::uniform01(), 0), std::invalid_argument);

    const std::uint64_t n = 1'000'000;
    for (const auto& model : all_models()) {
        CAPTURE(model.name());
        const auto family = model.limit_family();
        const Norming norming = norming_constants(model, n);
        for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double x = gev_quantile(family, p);
            const double intensity = static_cast<double>(n) * model.survival(norming.level(x));
            CHECK(intensity == doctest::Approx(tau(family, x)).epsilon(1e-9));
        }
    }
    CHECK(SampleModel::exponential().limit_family() == LimitFamily::gumbel());
    CHECK(SampleModel::pareto(3.0).limit_family() == LimitFamily::frechet(3.0));
    CHECK(SampleModel::uniform01().limit_family() == LimitFamily::weibull(1.0));
}

TEST_CASE("model parsing") {
    CHECK(SampleModel::parse("exp").kind() == ModelKind::Exponential);
    CHECK(SampleModel::parse("uniform").kind() == ModelKind::Uniform01);
    CHECK(SampleModel::parse("pareto:2.5").shape() == 2.5);
    CHECK(SampleModel::parse("pareto:2.5").name() == "pareto:2.5");
    CHECK_THROWS_AS(SampleModel::parse("normal"), std::invalid_argument);
    CHECK_THROWS_AS(SampleModel::parse("pareto:-1"), std::invalid_argument);
    CHECK_THROWS_AS(SampleModel::parse("pareto:x"), std::invalid_argument);
}

TEST_CASE("samples pass a Kolmogorov-Smirnov test") {
    const std::size_t n = 100'000;
    const double critical = 1.6276 / std::sqrt(static_cast<double>(n));  // 1% level
    for (const auto& model : all_models()) {
        for (std::uint64_t seed : {1u, 2u}) {
            CAPTURE(model.name());
            CAPTURE(seed);
            SeededStream stream(seed);
            std::vector<double> xs(n);
            for (auto& x : xs) x = sample(model, stream);
            CHECK(ks_distance(xs, model) < critical);
        }
    }
}

TEST_CASE("normalized maxima follow the limit law") {
    const std::uint64_t n = 10'000;
    const int replications = 10'000;
    for (const auto& model : {SampleModel::exponential(), SampleModel::pareto(2.0), SampleModel::uniform01()}) {
        CAPTURE(model.name());
        const auto family = model.limit_family();
        const Norming norming = norming_constants(model, n);
        const std::vector<double> probs{0.1, 0.5, 0.9};
        std::vector<double> xs;
        for (double p : probs) xs.push_back(gev_quantile(family, p));
        std::vector<int> hits(probs.size(), 0);
        const SeededStream root(2024);
        for (int r = 0; r < replications; ++r) {
            SeededStream stream = root.substream(static_cast<std::uint64_t>(r));
            double max = -INFINITY;
            for (std::uint64_t i = 0; i < n; ++i) max = std::max(max, sample(model, stream));
            const double z = norming.normalize(max);
            for (std::size_t i = 0; i < xs.size(); ++i) hits[i] += z <= xs[i];
        }
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const double estimate = static_cast<double>(hits[i]) / replications;
            const double se = std::sqrt(probs[i] * (1.0 - probs[i]) / replications);
            CHECK(std::abs(estimate - probs[i]) <= 4.0 * se);
        }
    }
}
