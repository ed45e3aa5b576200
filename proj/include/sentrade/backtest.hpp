#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentrade/marketdata.hpp"
#include "sentrade/time.hpp"

namespace sentrade {

enum class TimingBucket { PreOpen, Intraday, PostClose };
enum class PriceKind { Open, Close };
enum class Side { Long, Short };
enum class CostConvention { RoundTrip, PerSide };

std::string_view to_string(TimingBucket bucket);
std::string_view to_string(CostConvention convention);
CostConvention parse_cost_convention(std::string_view name);

/// PreOpen before 06:00 on a trading day, Intraday 06:00-16:00 on a trading day,
/// PostClose otherwise (including any time on a non-trading day).
TimingBucket timing_bucket(const Timestamp& local, const TradingCalendar& calendar);

struct TradeSchedule {
    TimingBucket bucket = TimingBucket::PreOpen;
    Date entry_date;
    PriceKind entry_kind = PriceKind::Open;
    Date exit_date;
    PriceKind exit_kind = PriceKind::Close;
};

/// Entry and exit for a news item; nullopt when the calendar ends first.
std::optional<TradeSchedule> trade_schedule(const Timestamp& local, const TradingCalendar& calendar);

struct QuantileSelection {
    std::vector<std::string> long_set;   // best score first
    std::vector<std::string> short_set;  // worst score first
};

/// Top and bottom ceil(fraction * n) tickers, ties broken by ticker. A ticker that
/// lands in both sets is removed from both. Throws std::invalid_argument on empty input.
QuantileSelection select_quantiles(std::span<const std::pair<std::string, double>> scores, double fraction = 0.2);

struct WeightResult {
    std::map<std::string, double> weights;
    std::vector<std::string> dropped;  // missing or non-positive cap
};

/// Cap-proportional weights. Throws InputError when every ticker is dropped.
WeightResult value_weights(std::span<const std::string> tickers, const std::map<std::string, double>& caps);

struct PositionLeg {
    std::string ticker;
    Side side = Side::Long;
    Date entry_date;
    PriceKind entry_kind = PriceKind::Open;
    Date exit_date;
    PriceKind exit_kind = PriceKind::Close;
    double weight = 0.0;
    double cost_applied = 0.001;  // decimal, charged once per leg
};

/// Net decimal return of one leg: side-signed gross minus cost. Close-to-next-close
/// legs use the exit bar's total return. nullopt when a required bar is missing.
std::optional<double> leg_return(const PositionLeg& leg, const MarketData& market);

/// Decimal cost charged per leg: bps once for a round trip, twice when charged per side.
double leg_cost(double cost_bps, CostConvention convention);

struct StrategySeries {
    std::string name;
    std::map<Date, double> daily_returns;  // decimal

    std::vector<double> values() const;
};

struct Signal {
    std::string ticker;
    Timestamp timestamp;  // exchange-local
    double score = 0.0;
};

struct BacktestOptions {
    double fraction = 0.2;
    double cost_bps = 10.0;
    CostConvention convention = CostConvention::RoundTrip;
    std::optional<Date> start;
    std::optional<Date> end;
};

struct PortfolioDay {
    Date date;  // entry date
    std::map<std::string, double> long_weights;   // over legs that were computed
    std::map<std::string, double> short_weights;
    std::optional<double> long_return;
    std::optional<double> short_return;  // stock view: -(short P&L)
    std::optional<double> long_short;
};

struct PortfolioResult {
    StrategySeries long_series;
    StrategySeries short_series;      // stock view, positive when the shorted stocks rose
    StrategySeries short_pnl_series;  // P&L of the short positions
    StrategySeries long_short_series;
    std::vector<PortfolioDay> days;
    std::size_t skipped_legs = 0;
    std::size_t dropped_caps = 0;
};

/// Daily value-weighted long, short and long-short portfolios keyed by entry date.
PortfolioResult portfolio_series(std::span<const Signal> signals, const MarketData& market,
                                 const BacktestOptions& options, const std::string& name = "strategy");

/// Value- and equal-weighted market portfolios without costs. Dates without any
/// prior-day caps (the first calendar date) are skipped.
std::pair<StrategySeries, StrategySeries> benchmark_series(const MarketData& market,
                                                           std::optional<Date> start = std::nullopt,
                                                           std::optional<Date> end = std::nullopt);

/// Annualized Sharpe ratio; risk_free is an annual rate. Throws std::invalid_argument
/// with fewer than two observations or zero dispersion.
double sharpe(std::span<const double> returns, double periods_per_year = 252.0, double risk_free = 0.0);

/// Largest peak-to-trough decline of the growth path starting at 1, as a decimal <= 0.
double max_drawdown(std::span<const double> returns);

/// Value after each date of $1 invested before the first one. Throws
/// std::invalid_argument on a return <= -1.
std::vector<std::pair<Date, double>> cumulative_growth(const StrategySeries& series);

struct StrategyReport {
    std::string name;
    std::size_t days = 0;
    std::optional<double> sharpe;
    std::optional<double> mean_daily_return_pct;
    std::optional<double> std_daily_pct;
    double max_drawdown_pct = 0.0;
    std::vector<std::pair<Date, double>> cumulative_path;
};

StrategyReport summarize(const StrategySeries& series, double periods_per_year = 252.0, double risk_free = 0.0);

}  // namespace sentrade
