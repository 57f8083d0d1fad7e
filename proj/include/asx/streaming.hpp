#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace asx {

/// Running top-k of a stream: values()[0] = M^(1) >= ... >= M^(min(count, k)).
/// An insertion-sorted buffer; k is small (at most a few dozen) in practice.
/// Equal values are kept as separate entries.
class TopKTracker {
public:
    explicit TopKTracker(std::size_t capacity);

    void insert(double x);
    void clear();

    std::size_t capacity() const { return capacity_; }
    std::uint64_t count() const { return count_; }
    std::span<const double> values() const { return values_; }

    /// j-th largest value seen, 1-based. Throws std::out_of_range when fewer
    /// than j values are held.
    double top(std::size_t j) const;

    /// 1 iff top(j) <= thresholds[j-1] for j = 1..k. Requires count >= k and
    /// nonincreasing thresholds of length k.
    bool joint_indicator(std::span<const double> thresholds) const;

    /// 1 iff top(ranks[i]) <= thresholds[i] for each i. Ranks strictly
    /// increasing and at most min(count, k); thresholds nonincreasing.
    bool rank_indicator(std::span<const int> ranks, std::span<const double> thresholds) const;

private:
    std::size_t capacity_;
    std::uint64_t count_ = 0;
    std::vector<double> values_;
};

}  // namespace asx
