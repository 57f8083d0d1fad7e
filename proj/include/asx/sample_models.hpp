#pragma once

#include "asx/limit_laws.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace asx {

/// Counter-based uniform stream. The variate at (seed, position) is a pure
/// function of both, so any stream can be replayed or skipped ahead.
///
/// Generator: SplitMix64 (Steele, Lea and Flood, 2014) run over the state
/// mix(seed) + (position + 1) * 0x9E3779B97F4A7C15; the seed is mixed first so
/// that nearby seeds do not produce shifted copies of one sequence. Uniforms
/// take the top 53 bits and are centred in their cell, so they lie strictly
/// inside (0, 1). Bit-exact agreement with other implementations is not a goal.
class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed, std::uint64_t position = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return position_; }

    std::uint64_t next_bits();
    double next_uniform();

    /// An independent stream keyed by (seed, index); used for replications.
    SeededStream substream(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::uint64_t base_;
    std::uint64_t position_;
};

enum class ModelKind { Exponential, Pareto, Uniform01 };

struct Norming {
    double scale;     // a_n
    double location;  // b_n

    double level(double x) const { return scale * x + location; }
    double normalize(double value) const { return (value - location) / scale; }
};

/// Parent distribution F with an exact quantile, its max-domain limit family
/// and the norming constants that make (M_n - b_n) / a_n converge.
///
/// Adding a parent (e.g. a Normal with its slowly converging constants) means
/// a new ModelKind plus cases in cdf/survival/quantile/norming and parse.
class SampleModel {
public:
    static SampleModel exponential();
    static SampleModel pareto(double alpha);
    static SampleModel uniform01();

    /// Parses "exp", "pareto:ALPHA" or "uniform".
    static SampleModel parse(std::string_view text);

    ModelKind kind() const { return kind_; }
    double shape() const { return shape_; }
    std::string name() const;

    double cdf(double x) const;
    /// 1 - F(x), computed without cancellation.
    double survival(double x) const;
    double quantile(double u) const;

    LimitFamily limit_family() const;
    Norming norming(std::uint64_t n) const;

private:
    SampleModel(ModelKind kind, double shape) : kind_(kind), shape_(shape) {}

    ModelKind kind_;
    double shape_;
};

/// quantile(U) for the stream's next uniform U.
double sample(const SampleModel& model, SeededStream& stream);

/// (a_n, b_n) for n >= 1.
Norming norming_constants(const SampleModel& model, std::uint64_t n);

}  // namespace asx
