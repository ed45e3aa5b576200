#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentrade {

enum class SplitMode {
    Random,         // uniform over ids
    Chronological,  // ids taken in the given (time) order: train, validation, test
};

struct SplitOptions {
    double test_fraction = 0.2;
    double validation_fraction = 0.2;  // of what remains after the test carve-out
    SplitMode mode = SplitMode::Random;
};

struct DatasetSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> validation_ids;
    std::vector<std::string> test_ids;
    std::uint64_t seed = 0;
};

/// test = floor(test_fraction * n), validation = floor(validation_fraction * (n - test)),
/// train = the rest. Random mode is a function of the id set and seed only.
DatasetSplit split_dataset(std::span<const std::string> ids, std::uint64_t seed, const SplitOptions& options = {});

inline int classify_score(double score, double threshold = 0.5) { return score > threshold ? 1 : 0; }

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

/// Swaps the roles of the positive and negative classes.
inline ConfusionMatrix transpose(const ConfusionMatrix& cm) { return {cm.tn, cm.fn, cm.tp, cm.fp}; }

/// nullopt marks a metric whose denominator is zero.
struct MetricSuite {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> f1;
};

MetricSuite metric_suite(const ConfusionMatrix& cm);

}  // namespace sentrade
