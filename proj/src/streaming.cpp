#include "asx/streaming.hpp"

#include <stdexcept>
#include <string>

namespace asx {

namespace {

void require_nonincreasing(std::span<const double> thresholds) {
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (thresholds[i] > thresholds[i - 1]) {
            throw std::invalid_argument("thresholds must be nonincreasing");
        }
    }
}

}  // namespace

TopKTracker::TopKTracker(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("TopKTracker capacity must be positive");
    values_.reserve(capacity);
}

void TopKTracker::insert(double x) {
    ++count_;
    if (values_.size() == capacity_) {
        if (!(x > values_.back())) return;
        values_.pop_back();
    }
    // shift smaller entries down; equal entries stay ahead of x
    std::size_t pos = values_.size();
    values_.push_back(x);
    while (pos > 0 && values_[pos - 1] < x) {
        values_[pos] = values_[pos - 1];
        --pos;
    }
    values_[pos] = x;
}

void TopKTracker::clear() {
    count_ = 0;
    values_.clear();
}

double TopKTracker::top(std::size_t j) const {
    if (j == 0 || j > values_.size()) {
        throw std::out_of_range("order statistic " + std::to_string(j) + " is undefined with " +
                                std::to_string(values_.size()) + " values held");
    }
    return values_[j - 1];
}

bool TopKTracker::joint_indicator(std::span<const double> thresholds) const {
    if (count_ < capacity_) {
        throw std::out_of_range("joint indicator needs at least k observations");
    }
    if (thresholds.size() != capacity_) {
        throw std::invalid_argument("joint indicator needs exactly k thresholds");
    }
    require_nonincreasing(thresholds);
    for (std::size_t j = 0; j < capacity_; ++j) {
        if (values_[j] > thresholds[j]) return false;
    }
    return true;
}

bool TopKTracker::rank_indicator(std::span<const int> ranks, std::span<const double> thresholds) const {
    if (ranks.size() != thresholds.size()) {
        throw std::invalid_argument("rank indicator needs one threshold per rank");
    }
    require_nonincreasing(thresholds);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (i > 0 && ranks[i] <= ranks[i - 1]) {
            throw std::invalid_argument("ranks must be strictly increasing");
        }
    }
    if (!ranks.empty() && (ranks.front() < 1 || static_cast<std::size_t>(ranks.back()) > values_.size())) {
        throw std::out_of_range("rank indicator asks for an order statistic that is not held");
    }
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (values_[static_cast<std::size_t>(ranks[i]) - 1] > thresholds[i]) return false;
    }
    return true;
}

}  // namespace asx
