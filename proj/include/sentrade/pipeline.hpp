#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sentrade/backtest.hpp"
#include "sentrade/classify.hpp"
#include "sentrade/config.hpp"
#include "sentrade/corpus.hpp"
#include "sentrade/errors.hpp"
#include "sentrade/marketdata.hpp"
#include "sentrade/panel.hpp"
#include "sentrade/scoring.hpp"

namespace sentrade {

/// Which downstream analyses to run. Filtering, labeling and scoring always run
/// when anything after them is requested.
struct StageSelection {
    bool label = true;
    bool score = true;
    bool evaluate = true;
    bool regress = true;
    bool backtest = true;

    static StageSelection all() { return {}; }
    static StageSelection filter_only() { return {false, false, false, false, false}; }
};

/// A failure tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message, int exit_code)
        : Error("stage '" + stage + "': " + message), stage_(std::move(stage)), exit_code_(exit_code) {}

    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

struct ModelMetrics {
    std::string model;
    ConfusionMatrix confusion;
    std::optional<MetricSuite> metrics;  // absent when no test example has this model's score
};

struct RegressionOutcome {
    std::vector<std::string> models;
    std::size_t n_firms = 0;
    std::size_t n_dates = 0;
    std::size_t dropped_no_next_day = 0;
    std::size_t dropped_missing_score = 0;
    Regression regression;
};

struct ModelStrategies {
    std::string model;
    StrategyReport long_report;
    StrategyReport short_report;      // stock view
    StrategyReport short_pnl_report;  // position P&L view
    StrategyReport long_short_report;
    std::size_t skipped_legs = 0;
    std::size_t dropped_caps = 0;
};

struct PipelineResult {
    CorpusFunnel funnel;
    std::size_t novelty_excluded = 0;
    std::vector<NewsArticle> unique_articles;
    std::vector<LabeledExample> labeled;
    std::size_t missing_returns = 0;
    ScoreTable scores;
    std::vector<std::string> unknown_score_ids;
    std::optional<DatasetSplit> split;
    std::vector<ModelMetrics> metrics;
    std::vector<RegressionOutcome> regressions;
    std::vector<ModelStrategies> strategies;
    std::optional<StrategyReport> benchmark_vw;
    std::optional<StrategyReport> benchmark_ew;
};

/// Runs corpus filtering, labeling, scoring, evaluation, regression and backtesting
/// as selected. Failures surface as StageError.
PipelineResult run_pipeline(const RunConfig& config, const StageSelection& stages = StageSelection::all());

/// Writes the report files for the selected stages plus manifest.json. Returns the
/// file names written, in order.
std::vector<std::string> emit_report(const PipelineResult& result, const RunConfig& config,
                                     const StageSelection& stages, const std::filesystem::path& output_dir);

/// Exit code for an exception escaping the pipeline: 1 input/config, 2 numerical.
int exit_code_for(const std::exception& e);

}  // namespace sentrade
