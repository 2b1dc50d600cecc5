#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace mribow {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o);
};

// Labels are {0,1} with 1 (mTBI) the positive class.
ConfusionCounts confusion(std::span<const int> pred, std::span<const int> truth);

// TP/(TP+FN), TN/(TN+FP), (TP+TN)/total; empty when the denominator is zero.
std::optional<double> sensitivity(const ConfusionCounts& c);
std::optional<double> specificity(const ConfusionCounts& c);
std::optional<double> accuracy(const ConfusionCounts& c);

}  // namespace mribow
