#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sentrade/backtest.hpp"
#include "sentrade/classify.hpp"
#include "sentrade/corpus.hpp"
#include "sentrade/marketdata.hpp"

namespace sentrade {

struct PipelineResult;
struct RunConfig;

using ojson = nlohmann::ordered_json;

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes text to path, throwing InputError when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view content);

ojson funnel_json(const PipelineResult& result, const RunConfig& config);
ojson metrics_json(const PipelineResult& result, const RunConfig& config);
ojson regression_json(const PipelineResult& result, const RunConfig& config);
ojson strategies_json(const PipelineResult& result, const RunConfig& config);
ojson strategy_report_json(const StrategyReport& report);

std::string labels_csv(std::span<const LabeledExample> labeled);
/// Long-format growth paths: date,strategy,value.
std::string cumulative_csv(const PipelineResult& result);

}  // namespace sentrade
