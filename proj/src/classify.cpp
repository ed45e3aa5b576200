#include "sentrade/classify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sentrade/random.hpp"

namespace sentrade {

DatasetSplit split_dataset(std::span<const std::string> ids, std::uint64_t seed, const SplitOptions& options) {
    if (ids.size() < 5) {
        throw std::invalid_argument("split_dataset needs at least 5 ids, got " + std::to_string(ids.size()));
    }
    if (!(options.test_fraction >= 0.0 && options.test_fraction < 1.0) ||
        !(options.validation_fraction >= 0.0 && options.validation_fraction < 1.0)) {
        throw std::invalid_argument("split fractions must lie in [0, 1)");
    }
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
        throw std::invalid_argument("split_dataset: ids must be distinct");
    }

    std::vector<std::string> order(ids.begin(), ids.end());
    if (options.mode == SplitMode::Random) {
        std::sort(order.begin(), order.end());
        Rng rng(seed);
        rng.shuffle(order.begin(), order.end());
    }

    const std::size_t n = order.size();
    const auto n_test = static_cast<std::size_t>(std::floor(options.test_fraction * static_cast<double>(n)));
    const auto n_val =
        static_cast<std::size_t>(std::floor(options.validation_fraction * static_cast<double>(n - n_test)));
    const std::size_t n_train = n - n_test - n_val;

    DatasetSplit split;
    split.seed = seed;
    // Chronological mode keeps the latest ids for testing.
    auto it = order.begin();
    split.train_ids.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
    it += static_cast<std::ptrdiff_t>(n_train);
    split.validation_ids.assign(it, it + static_cast<std::ptrdiff_t>(n_val));
    it += static_cast<std::ptrdiff_t>(n_val);
    split.test_ids.assign(it, order.end());
    return split;
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                                    std::to_string(labels.size()) + " labels");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i];
        const int y = labels[i];
        if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
            throw std::invalid_argument("confusion: values must be 0 or 1");
        }
        if (p == 1) {
            (y == 1 ? cm.tp : cm.fp) += 1;
        } else {
            (y == 0 ? cm.tn : cm.fn) += 1;
        }
    }
    return cm;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricSuite metric_suite(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw std::invalid_argument("metric_suite: empty confusion matrix");
    }
    MetricSuite m;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.precision = ratio(cm.tp, cm.tp + cm.fp);
    m.recall = ratio(cm.tp, cm.tp + cm.fn);
    m.specificity = ratio(cm.tn, cm.tn + cm.fp);
    // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn); the count form avoids rounding in P and R.
    if (m.precision && m.recall && cm.tp > 0) {
        m.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    }
    return m;
}

}  // namespace sentrade
