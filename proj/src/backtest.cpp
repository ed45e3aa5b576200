#include "sentrade/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sentrade/errors.hpp"

namespace sentrade {

using namespace std::chrono;

std::string_view to_string(TimingBucket bucket) {
    switch (bucket) {
        case TimingBucket::PreOpen:
            return "pre_open";
        case TimingBucket::Intraday:
            return "intraday";
        case TimingBucket::PostClose:
            return "post_close";
    }
    return "?";
}

std::string_view to_string(CostConvention convention) {
    return convention == CostConvention::PerSide ? "per_side" : "round_trip";
}

CostConvention parse_cost_convention(std::string_view name) {
    if (name == "round_trip") {
        return CostConvention::RoundTrip;
    }
    if (name == "per_side") {
        return CostConvention::PerSide;
    }
    throw ConfigError("unknown cost convention '" + std::string(name) + "' (round_trip|per_side)");
}

TimingBucket timing_bucket(const Timestamp& local, const TradingCalendar& calendar) {
    if (!calendar.contains(local.local_date())) {
        return TimingBucket::PostClose;
    }
    const auto tod = local.local_time_of_day();
    if (tod < hours{6}) {
        return TimingBucket::PreOpen;
    }
    if (tod < hours{16}) {
        return TimingBucket::Intraday;
    }
    return TimingBucket::PostClose;
}

std::optional<TradeSchedule> trade_schedule(const Timestamp& local, const TradingCalendar& calendar) {
    const Date d = local.local_date();
    TradeSchedule s;
    s.bucket = timing_bucket(local, calendar);
    switch (s.bucket) {
        case TimingBucket::PreOpen:
            s.entry_date = d;
            s.entry_kind = PriceKind::Open;
            s.exit_date = d;
            s.exit_kind = PriceKind::Close;
            return s;
        case TimingBucket::Intraday: {
            const auto next = calendar.next(d);
            if (!next) {
                return std::nullopt;
            }
            s.entry_date = d;
            s.entry_kind = PriceKind::Close;
            s.exit_date = *next;
            s.exit_kind = PriceKind::Close;
            return s;
        }
        case TimingBucket::PostClose: {
            const auto next = calendar.next(d);
            if (!next) {
                return std::nullopt;
            }
            s.entry_date = *next;
            s.entry_kind = PriceKind::Open;
            s.exit_date = *next;
            s.exit_kind = PriceKind::Close;
            return s;
        }
    }
    return std::nullopt;
}

QuantileSelection select_quantiles(std::span<const std::pair<std::string, double>> scores, double fraction) {
    if (scores.empty()) {
        throw std::invalid_argument("select_quantiles: no scores");
    }
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("select_quantiles: fraction must lie in (0, 1]");
    }
    const std::size_t n = scores.size();
    // The epsilon keeps products such as 0.2 * 15 from rounding up past an integer.
    const auto m = std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));

    // One ranking, best first; ties go to the lexicographically smaller ticker.
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    std::vector<std::string> top;
    std::vector<std::string> bottom;
    for (std::size_t i = 0; i < m; ++i) {
        top.push_back(ranked[i].first);
        bottom.push_back(ranked[n - 1 - i].first);
    }
    QuantileSelection out;
    for (const auto& t : top) {
        if (std::find(bottom.begin(), bottom.end(), t) == bottom.end()) {
            out.long_set.push_back(t);
        }
    }
    for (const auto& t : bottom) {
        if (std::find(top.begin(), top.end(), t) == top.end()) {
            out.short_set.push_back(t);
        }
    }
    return out;
}

WeightResult value_weights(std::span<const std::string> tickers, const std::map<std::string, double>& caps) {
    WeightResult out;
    double total = 0.0;
    for (const auto& t : tickers) {
        auto it = caps.find(t);
        if (it == caps.end() || !(it->second > 0.0)) {
            out.dropped.push_back(t);
            continue;
        }
        out.weights[t] = it->second;
        total += it->second;
    }
    if (out.weights.empty()) {
        throw InputError("value_weights: no ticker has a positive market cap");
    }
    for (auto& [t, w] : out.weights) {
        w /= total;
    }
    return out;
}

double leg_cost(double cost_bps, CostConvention convention) {
    const double one_side = cost_bps / 10000.0;
    return convention == CostConvention::PerSide ? 2.0 * one_side : one_side;
}

std::optional<double> leg_return(const PositionLeg& leg, const MarketData& market) {
    const DailyBar* entry = market.find(leg.ticker, leg.entry_date);
    const DailyBar* exit = market.find(leg.ticker, leg.exit_date);
    if (entry == nullptr || exit == nullptr) {
        return std::nullopt;
    }
    double gross = 0.0;
    const bool close_to_next_close = leg.entry_kind == PriceKind::Close && leg.exit_kind == PriceKind::Close &&
                                     market.calendar().next(leg.entry_date) == leg.exit_date;
    if (close_to_next_close) {
        gross = exit->total_return;
    } else {
        const double p0 = leg.entry_kind == PriceKind::Open ? entry->open_price : entry->close_price;
        const double p1 = leg.exit_kind == PriceKind::Open ? exit->open_price : exit->close_price;
        gross = p1 / p0 - 1.0;
    }
    const double signed_gross = leg.side == Side::Long ? gross : -gross;
    return signed_gross - leg.cost_applied;
}

std::vector<double> StrategySeries::values() const {
    std::vector<double> out;
    out.reserve(daily_returns.size());
    for (const auto& [d, r] : daily_returns) {
        out.push_back(r);
    }
    return out;
}

namespace {

struct PooledSignal {
    double sum = 0.0;
    std::size_t count = 0;
    TradeSchedule schedule;
};

bool enters_earlier(const TradeSchedule& a, const TradeSchedule& b) {
    if (a.entry_date != b.entry_date) {
        return a.entry_date < b.entry_date;
    }
    return a.entry_kind == PriceKind::Open && b.entry_kind == PriceKind::Close;
}

struct SideOutcome {
    std::map<std::string, double> weights;
    std::optional<double> ret;
};

SideOutcome run_side(const std::vector<std::string>& tickers, Side side, const Date day,
                     const std::map<std::string, PooledSignal>& pool, const std::map<std::string, double>& caps,
                     const MarketData& market, double cost, PortfolioResult& result) {
    SideOutcome out;
    if (tickers.empty()) {
        return out;
    }
    WeightResult w;
    try {
        w = value_weights(tickers, caps);
    } catch (const InputError&) {
        result.dropped_caps += tickers.size();
        return out;
    }
    result.dropped_caps += w.dropped.size();

    std::vector<std::pair<std::string, std::pair<double, double>>> legs;  // ticker, (weight, net)
    double kept = 0.0;
    for (const auto& [ticker, weight] : w.weights) {
        const auto& sched = pool.at(ticker).schedule;
        PositionLeg leg{ticker, side, day, sched.entry_kind, sched.exit_date, sched.exit_kind, weight, cost};
        if (auto r = leg_return(leg, market)) {
            legs.push_back({ticker, {weight, *r}});
            kept += weight;
        } else {
            ++result.skipped_legs;
        }
    }
    if (legs.empty()) {
        return out;
    }
    double total = 0.0;
    for (const auto& [ticker, wr] : legs) {
        const double wn = wr.first / kept;
        out.weights[ticker] = wn;
        total += wn * wr.second;
    }
    out.ret = total;
    return out;
}

}  // namespace

PortfolioResult portfolio_series(std::span<const Signal> signals, const MarketData& market,
                                 const BacktestOptions& options, const std::string& name) {
    PortfolioResult result;
    result.long_series.name = name + "/L";
    result.short_series.name = name + "/S";
    result.short_pnl_series.name = name + "/S_pnl";
    result.long_short_series.name = name + "/L-S";

    std::map<Date, std::map<std::string, PooledSignal>> pools;
    for (const auto& s : signals) {
        const auto sched = trade_schedule(s.timestamp, market.calendar());
        if (!sched) {
            continue;
        }
        if ((options.start && sched->entry_date < *options.start) || (options.end && sched->entry_date > *options.end)) {
            continue;
        }
        auto& p = pools[sched->entry_date][s.ticker];
        if (p.count == 0 || enters_earlier(*sched, p.schedule)) {
            p.schedule = *sched;
        }
        p.sum += s.score;
        ++p.count;
    }

    const double cost = leg_cost(options.cost_bps, options.convention);
    for (const auto& [day, pool] : pools) {
        std::vector<std::pair<std::string, double>> scores;
        for (const auto& [ticker, p] : pool) {
            scores.emplace_back(ticker, p.sum / static_cast<double>(p.count));
        }
        const auto sel = select_quantiles(scores, options.fraction);
        if (sel.long_set.empty() && sel.short_set.empty()) {
            continue;
        }
        const auto caps = market.prior_caps(day);
        const auto lo = run_side(sel.long_set, Side::Long, day, pool, caps, market, cost, result);
        const auto so = run_side(sel.short_set, Side::Short, day, pool, caps, market, cost, result);
        if (!lo.ret && !so.ret) {
            continue;
        }
        PortfolioDay pd;
        pd.date = day;
        pd.long_weights = lo.weights;
        pd.short_weights = so.weights;
        pd.long_return = lo.ret;
        if (so.ret) {
            pd.short_return = -*so.ret;
            result.short_pnl_series.daily_returns[day] = *so.ret;
            result.short_series.daily_returns[day] = *pd.short_return;
        }
        if (lo.ret) {
            result.long_series.daily_returns[day] = *lo.ret;
        }
        if (lo.ret && so.ret) {
            pd.long_short = *pd.long_return - *pd.short_return;
            result.long_short_series.daily_returns[day] = *pd.long_short;
        }
        result.days.push_back(std::move(pd));
    }
    return result;
}

std::pair<StrategySeries, StrategySeries> benchmark_series(const MarketData& market, std::optional<Date> start,
                                                           std::optional<Date> end) {
    StrategySeries vw{"VW", {}};
    StrategySeries ew{"EW", {}};
    for (const Date d : market.calendar().dates()) {
        if ((start && d < *start) || (end && d > *end)) {
            continue;
        }
        const auto bars = market.bars_on(d);
        if (bars.empty()) {
            throw InputError("benchmark: no bars on " + format_date(d));
        }
        const auto caps = market.prior_caps(d);
        if (caps.empty()) {
            continue;
        }
        double v = 0.0;
        try {
            v = market_return(bars, caps);
        } catch (const InputError&) {
            continue;
        }
        double sum = 0.0;
        for (const auto& b : bars) {
            sum += b.total_return;
        }
        vw.daily_returns[d] = v;
        ew.daily_returns[d] = sum / static_cast<double>(bars.size());
    }
    return {vw, ew};
}

namespace {

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x, double mean) {
    double ss = 0.0;
    for (const double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

double sharpe(std::span<const double> returns, double periods_per_year, double risk_free) {
    if (returns.size() < 2) {
        throw std::invalid_argument("sharpe: need at least two observations");
    }
    const double m = mean_of(returns);
    const double sd = sample_sd(returns, m);
    if (!(sd > 0.0)) {
        throw std::invalid_argument("sharpe: zero standard deviation");
    }
    return (m - risk_free / periods_per_year) / sd * std::sqrt(periods_per_year);
}

double max_drawdown(std::span<const double> returns) {
    double value = 1.0;
    double peak = 1.0;
    double worst = 0.0;
    for (const double r : returns) {
        value *= 1.0 + r;
        peak = std::max(peak, value);
        worst = std::min(worst, value / peak - 1.0);
    }
    return worst;
}

std::vector<std::pair<Date, double>> cumulative_growth(const StrategySeries& series) {
    std::vector<std::pair<Date, double>> path;
    path.reserve(series.daily_returns.size());
    double value = 1.0;
    for (const auto& [d, r] : series.daily_returns) {
        if (!(r > -1.0)) {
            throw std::invalid_argument("cumulative_growth: return <= -1 on " + format_date(d));
        }
        value *= 1.0 + r;
        path.emplace_back(d, value);
    }
    return path;
}

StrategyReport summarize(const StrategySeries& series, double periods_per_year, double risk_free) {
    StrategyReport rep;
    rep.name = series.name;
    const auto v = series.values();
    rep.days = v.size();
    if (!v.empty()) {
        const double m = mean_of(v);
        rep.mean_daily_return_pct = 100.0 * m;
        if (v.size() >= 2) {
            const double sd = sample_sd(v, m);
            rep.std_daily_pct = 100.0 * sd;
            if (sd > 0.0) {
                rep.sharpe = sharpe(v, periods_per_year, risk_free);
            }
        }
    }
    rep.max_drawdown_pct = 100.0 * max_drawdown(v);
    rep.cumulative_path = cumulative_growth(series);
    return rep;
}

}  // namespace sentrade
