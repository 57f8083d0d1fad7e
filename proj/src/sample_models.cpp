#include "asx/sample_models.hpp"

#include "asx/text.hpp"

#include <cmath>
#include <stdexcept>

namespace asx {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t position)
    : seed_(seed), base_(mix64(seed ^ 0x6A09E667F3BCC909ULL)), position_(position) {}

std::uint64_t SeededStream::next_bits() {
    ++position_;
    return mix64(base_ + position_ * kGolden);
}

double SeededStream::next_uniform() {
    return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

SeededStream SeededStream::substream(std::uint64_t index) const {
    return SeededStream(mix64(base_ ^ mix64(index + kGolden)));
}

SampleModel SampleModel::exponential() { return {ModelKind::Exponential, 1.0}; }

SampleModel SampleModel::pareto(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("pareto shape must be a positive finite number");
    }
    return {ModelKind::Pareto, alpha};
}

SampleModel SampleModel::uniform01() { return {ModelKind::Uniform01, 1.0}; }

SampleModel SampleModel::parse(std::string_view text) {
    if (text == "exp") return exponential();
    if (text == "uniform") return uniform01();
    if (text.starts_with("pareto:")) return pareto(parse_number(text.substr(7), "pareto shape"));
    throw std::invalid_argument("unknown model '" + std::string(text) +
                                "' (expected exp, pareto:ALPHA or uniform)");
}

std::string SampleModel::name() const {
    switch (kind_) {
        case ModelKind::Exponential:
            return "exp";
        case ModelKind::Pareto:
            return "pareto:" + format_shortest(shape_);
        case ModelKind::Uniform01:
            return "uniform";
    }
    return "unknown";
}

double SampleModel::cdf(double x) const {
    switch (kind_) {
        case ModelKind::Exponential:
            return x > 0.0 ? -std::expm1(-x) : 0.0;
        case ModelKind::Pareto:
            return x > 1.0 ? -std::expm1(-shape_ * std::log(x)) : 0.0;
        case ModelKind::Uniform01:
            return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x);
    }
    return 0.0;
}

double SampleModel::survival(double x) const {
    switch (kind_) {
        case ModelKind::Exponential:
            return x > 0.0 ? std::exp(-x) : 1.0;
        case ModelKind::Pareto:
            return x > 1.0 ? std::pow(x, -shape_) : 1.0;
        case ModelKind::Uniform01:
            return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x);
    }
    return 1.0;
}

double SampleModel::quantile(double u) const {
    switch (kind_) {
        case ModelKind::Exponential:
            return -std::log1p(-u);
        case ModelKind::Pareto:
            return std::exp(-std::log1p(-u) / shape_);
        case ModelKind::Uniform01:
            return u;
    }
    return u;
}

LimitFamily SampleModel::limit_family() const {
    switch (kind_) {
        case ModelKind::Exponential:
            return LimitFamily::gumbel();
        case ModelKind::Pareto:
            return LimitFamily::frechet(shape_);
        case ModelKind::Uniform01:
            return LimitFamily::weibull(1.0);
    }
    return LimitFamily::gumbel();
}

Norming SampleModel::norming(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("norming constants need n >= 1");
    const double dn = static_cast<double>(n);
    switch (kind_) {
        case ModelKind::Exponential:
            return {1.0, std::log(dn)};
        case ModelKind::Pareto:
            return {std::pow(dn, 1.0 / shape_), 0.0};
        case ModelKind::Uniform01:
            return {1.0 / dn, 1.0};
    }
    return {1.0, 0.0};
}

double sample(const SampleModel& model, SeededStream& stream) {
    return model.quantile(stream.next_uniform());
}

Norming norming_constants(const SampleModel& model, std::uint64_t n) { return model.norming(n); }

}  // namespace asx
