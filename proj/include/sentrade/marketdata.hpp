#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentrade/corpus.hpp"
#include "sentrade/time.hpp"

namespace sentrade {

struct DailyBar {
    std::string ticker;
    Date date;
    double open_price = 0.0;
    double close_price = 0.0;
    double total_return = 0.0;  // close-to-close, decimal
    double market_cap = 0.0;
};

/// CSV with header date,ticker,open,close,ret,market_cap.
std::vector<DailyBar> load_bars_csv(const std::filesystem::path& path);
/// CSV with header date,market_ret.
std::map<Date, double> load_market_csv(const std::filesystem::path& path);

class TradingCalendar {
public:
    TradingCalendar() = default;
    /// Requires strictly increasing dates.
    explicit TradingCalendar(std::vector<Date> dates);

    const std::vector<Date>& dates() const { return dates_; }
    std::size_t size() const { return dates_.size(); }
    bool empty() const { return dates_.empty(); }
    Date at(std::size_t i) const { return dates_.at(i); }
    bool contains(Date d) const;
    std::optional<std::size_t> index_of(Date d) const;
    /// First trading date strictly after d.
    std::optional<Date> next(Date d) const;
    /// Last trading date strictly before d.
    std::optional<Date> prev(Date d) const;

private:
    std::vector<Date> dates_;
};

/// Sorted distinct dates present in the bars. Throws InputError when empty.
TradingCalendar build_calendar(std::span<const DailyBar> bars);

/// Validated, indexed bar store.
class MarketData {
public:
    explicit MarketData(std::vector<DailyBar> bars);

    const TradingCalendar& calendar() const { return calendar_; }
    const std::vector<DailyBar>& bars() const { return bars_; }
    const DailyBar* find(const std::string& ticker, Date date) const;
    /// Bars on one date, ordered by ticker.
    std::span<const DailyBar> bars_on(Date date) const;
    /// Market caps at the close of the trading day before `date`.
    std::map<std::string, double> prior_caps(Date date) const;
    std::optional<double> prior_cap(const std::string& ticker, Date date) const;

private:
    std::vector<DailyBar> bars_;  // sorted by (date, ticker)
    TradingCalendar calendar_;
    std::map<Date, std::pair<std::size_t, std::size_t>> by_date_;
    std::unordered_map<std::string, std::map<Date, std::size_t>> by_ticker_;
};

/// Value-weighted mean of total_return over constituents with a positive prior cap.
double market_return(std::span<const DailyBar> bars, const std::map<std::string, double>& prior_caps);

/// Market return for every calendar date that has a prior date with caps.
std::map<Date, double> market_return_series(const MarketData& market);

/// Trading day on which a news item becomes actionable: the publication date when it
/// is a trading day and the local time is before 16:00, otherwise the next trading day.
std::optional<Date> event_day(const Timestamp& local, const TradingCalendar& calendar);

enum class Aggregation { Sum, Compound };

/// Sum (or compounded difference) of stock minus market returns.
double aggregate_excess(std::span<const double> stock, std::span<const double> market,
                        Aggregation aggregation = Aggregation::Sum);

/// Excess return over the event day and the following horizon-1 trading days.
/// Throws MissingReturns if any stock bar or market return is absent.
double excess_return_window(const std::string& ticker, Date event_date, const MarketData& market,
                            const std::map<Date, double>& market_returns, int horizon = 3,
                            Aggregation aggregation = Aggregation::Sum);

inline int assign_label(double aggregated_excess) { return aggregated_excess > 0.0 ? 1 : 0; }

struct LabeledExample {
    std::string article_id;
    std::string ticker;
    Timestamp timestamp;  // exchange-local
    Date publication_date;
    Date event_date;
    double aggregated_excess_return = 0.0;
    int label = 0;
};

struct LabelingOptions {
    int horizon = 3;
    Aggregation aggregation = Aggregation::Sum;
    ExchangeZone zone = ExchangeZone::AsWritten;
};

struct LabelingResult {
    std::vector<LabeledExample> examples;
    std::size_t missing_returns = 0;
};

LabelingResult label_articles(std::span<const NewsArticle> articles, const MarketData& market,
                              const std::map<Date, double>& market_returns,
                              const LabelingOptions& options = {});

}  // namespace sentrade
