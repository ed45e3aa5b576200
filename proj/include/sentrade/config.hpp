#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sentrade/backtest.hpp"
#include "sentrade/classify.hpp"
#include "sentrade/corpus.hpp"
#include "sentrade/marketdata.hpp"
#include "sentrade/panel.hpp"
#include "sentrade/time.hpp"

namespace sentrade {

struct RunConfig {
    // inputs and outputs
    std::filesystem::path news;
    std::filesystem::path bars;
    std::filesystem::path market;  // optional market series, overrides the value-weighted universe
    std::filesystem::path lexicon;
    std::filesystem::path scores;  // optional external model scores
    std::filesystem::path output_dir = "out";

    // corpus
    int novelty_window = 20;
    WindowUnit novelty_unit = WindowUnit::CalendarDays;
    NoveltyScope novelty_scope = NoveltyScope::SameTicker;
    double similarity_threshold = 0.8;
    ExchangeZone exchange_zone = ExchangeZone::AsWritten;

    // labeling
    int label_horizon = 3;
    Aggregation aggregation = Aggregation::Sum;

    // scoring and classification
    bool lexicon_scoring = true;
    double test_fraction = 0.2;
    double validation_fraction = 0.2;
    SplitMode split_mode = SplitMode::Random;
    std::uint64_t seed = 42;
    double classification_threshold = 0.5;

    // regression; each entry is one regression's model list, empty = automatic
    std::vector<std::vector<std::string>> regressions;
    ClusterMode cluster_mode = ClusterMode::TwoWay;
    bool cluster_small_sample = false;

    // backtest
    double quantile_fraction = 0.2;
    double cost_bps = 10.0;
    CostConvention cost_convention = CostConvention::RoundTrip;
    std::optional<Date> start_date;
    std::optional<Date> end_date;
    double annualization = 252.0;
    double risk_free = 0.0;
};

/// Every key accepted by apply_setting, in documentation order.
const std::vector<std::string_view>& config_keys();

/// Sets one field from its textual form. Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads "key = value" lines ('#' starts a comment). Relative paths resolve
/// against the file's directory.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// Throws ConfigError when a field is outside its allowed range.
void validate(const RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace sentrade
