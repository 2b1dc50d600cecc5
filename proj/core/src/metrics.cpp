#include "mribow/metrics.hpp"

#include "mribow/error.hpp"

namespace mribow {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

ConfusionCounts confusion(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) throw DataError("confusion: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] != 0 && pred[i] != 1) throw DataError("confusion: label outside {0,1}");
        if (truth[i] != 0 && truth[i] != 1) throw DataError("confusion: label outside {0,1}");
        if (truth[i] == 1) {
            pred[i] == 1 ? ++c.tp : ++c.fn;
        } else {
            pred[i] == 1 ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

std::optional<double> sensitivity(const ConfusionCounts& c) {
    std::size_t d = c.tp + c.fn;
    if (d == 0) return std::nullopt;
    return static_cast<double>(c.tp) / static_cast<double>(d);
}

std::optional<double> specificity(const ConfusionCounts& c) {
    std::size_t d = c.tn + c.fp;
    if (d == 0) return std::nullopt;
    return static_cast<double>(c.tn) / static_cast<double>(d);
}

std::optional<double> accuracy(const ConfusionCounts& c) {
    std::size_t d = c.total();
    if (d == 0) return std::nullopt;
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(d);
}

}  // namespace mribow
