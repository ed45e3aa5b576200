#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sentrade/corpus.hpp"
#include "sentrade/marketdata.hpp"
#include "sentrade/scoring.hpp"
#include "sentrade/time.hpp"

namespace sentrade {

struct SyntheticSpec {
    std::size_t n_firms = 50;
    std::size_t n_dates = 500;        // trading days
    double articles_per_day = 10.0;   // Poisson rate per trading day
    double gamma = 0.25;              // planted next-day effect, percent per unit score
    double sigma = 0.1;               // idiosyncratic noise, percent
    double duplicate_rate = 0.0;      // chance an article is re-published verbatim within days
    double multi_ticker_rate = 0.05;  // chance an article also mentions another ticker
    std::uint64_t seed = 7;
    Date start = Date{std::chrono::year{2021} / 1 / 4};
    std::string model_name = "planted";

    void validate() const;
};

struct SyntheticData {
    std::vector<NewsArticle> news;  // chronological
    std::vector<DailyBar> bars;
    std::vector<ScoreRecord> scores;
    std::vector<std::string> positive_words;
    std::vector<std::string> negative_words;
    std::vector<std::string> duplicate_ids;     // verbatim re-publications
    std::vector<std::string> multi_ticker_ids;  // fail the single-stock filter
};

/// Bars follow r = a_firm + b_date (+ gamma * mean score of the firm's news on the
/// previous event day) + sigma * noise, in percent. Fully determined by the seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes news.jsonl, bars.csv, scores.csv, lexicon.csv and synth.json into dir.
void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace sentrade
