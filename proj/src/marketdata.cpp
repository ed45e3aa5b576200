#include "sentrade/marketdata.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentrade/csv.hpp"
#include "sentrade/errors.hpp"

namespace sentrade {

using namespace std::chrono;

std::vector<DailyBar> load_bars_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    const auto c_date = reader.require_column("date");
    const auto c_ticker = reader.require_column("ticker");
    const auto c_open = reader.require_column("open");
    const auto c_close = reader.require_column("close");
    const auto c_ret = reader.require_column("ret");
    const auto c_cap = reader.require_column("market_cap");

    std::vector<DailyBar> bars;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::string where = path.string() + ":" + std::to_string(reader.line_number());
        DailyBar b;
        try {
            b.date = parse_date(trim(f[c_date]));
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }
        b.ticker = std::string(trim(f[c_ticker]));
        b.open_price = parse_number(f[c_open], where);
        b.close_price = parse_number(f[c_close], where);
        b.total_return = parse_number(f[c_ret], where);
        b.market_cap = parse_number(f[c_cap], where);
        if (b.ticker.empty()) {
            throw FormatError(where + ": empty ticker");
        }
        if (!(b.open_price > 0.0) || !(b.close_price > 0.0)) {
            throw RangeError(where + ": prices must be positive");
        }
        if (!(b.total_return > -1.0) || !std::isfinite(b.total_return)) {
            throw RangeError(where + ": return must exceed -1");
        }
        if (!(b.market_cap >= 0.0)) {
            throw RangeError(where + ": market cap must be nonnegative");
        }
        bars.push_back(std::move(b));
    }
    return bars;
}

std::map<Date, double> load_market_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    const auto c_date = reader.require_column("date");
    const auto c_ret = reader.require_column("market_ret");
    std::map<Date, double> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::string where = path.string() + ":" + std::to_string(reader.line_number());
        Date d;
        try {
            d = parse_date(trim(f[c_date]));
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }
        const double r = parse_number(f[c_ret], where);
        if (!(r > -1.0)) {
            throw RangeError(where + ": market return must exceed -1");
        }
        if (!out.emplace(d, r).second) {
            throw DuplicateError(where + ": duplicate date " + format_date(d));
        }
    }
    return out;
}

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw std::invalid_argument("trading calendar dates must be strictly increasing");
        }
    }
}

bool TradingCalendar::contains(Date d) const { return std::binary_search(dates_.begin(), dates_.end(), d); }

std::optional<std::size_t> TradingCalendar::index_of(Date d) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end() || *it != d) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - dates_.begin());
}

std::optional<Date> TradingCalendar::next(Date d) const {
    auto it = std::upper_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end()) {
        return std::nullopt;
    }
    return *it;
}

std::optional<Date> TradingCalendar::prev(Date d) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.begin()) {
        return std::nullopt;
    }
    return *std::prev(it);
}

TradingCalendar build_calendar(std::span<const DailyBar> bars) {
    if (bars.empty()) {
        throw InputError("cannot build a trading calendar from zero bars");
    }
    std::vector<Date> dates;
    dates.reserve(bars.size());
    for (const auto& b : bars) {
        dates.push_back(b.date);
    }
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    return TradingCalendar(std::move(dates));
}

MarketData::MarketData(std::vector<DailyBar> bars) : bars_(std::move(bars)) {
    calendar_ = build_calendar(bars_);
    std::sort(bars_.begin(), bars_.end(), [](const DailyBar& a, const DailyBar& b) {
        return a.date != b.date ? a.date < b.date : a.ticker < b.ticker;
    });
    for (std::size_t i = 0; i < bars_.size(); ++i) {
        const auto& b = bars_[i];
        if (i > 0 && bars_[i - 1].date == b.date && bars_[i - 1].ticker == b.ticker) {
            throw DuplicateError("duplicate bar for " + b.ticker + " on " + format_date(b.date));
        }
        auto [it, inserted] = by_date_.try_emplace(b.date, i, i + 1);
        if (!inserted) {
            it->second.second = i + 1;
        }
        by_ticker_[b.ticker].emplace(b.date, i);
    }
}

const DailyBar* MarketData::find(const std::string& ticker, Date date) const {
    auto t = by_ticker_.find(ticker);
    if (t == by_ticker_.end()) {
        return nullptr;
    }
    auto d = t->second.find(date);
    return d == t->second.end() ? nullptr : &bars_[d->second];
}

std::span<const DailyBar> MarketData::bars_on(Date date) const {
    auto it = by_date_.find(date);
    if (it == by_date_.end()) {
        return {};
    }
    return std::span<const DailyBar>(bars_).subspan(it->second.first, it->second.second - it->second.first);
}

std::map<std::string, double> MarketData::prior_caps(Date date) const {
    std::map<std::string, double> caps;
    if (auto p = calendar_.prev(date)) {
        for (const auto& b : bars_on(*p)) {
            caps.emplace(b.ticker, b.market_cap);
        }
    }
    return caps;
}

std::optional<double> MarketData::prior_cap(const std::string& ticker, Date date) const {
    auto p = calendar_.prev(date);
    if (!p) {
        return std::nullopt;
    }
    const DailyBar* b = find(ticker, *p);
    if (b == nullptr) {
        return std::nullopt;
    }
    return b->market_cap;
}

double market_return(std::span<const DailyBar> bars, const std::map<std::string, double>& prior_caps) {
    double cap_sum = 0.0;
    double weighted = 0.0;
    for (const auto& b : bars) {
        auto it = prior_caps.find(b.ticker);
        if (it == prior_caps.end() || !(it->second > 0.0)) {
            continue;
        }
        cap_sum += it->second;
        weighted += it->second * b.total_return;
    }
    if (!(cap_sum > 0.0)) {
        throw InputError("market return: no constituent with a positive prior market cap");
    }
    return weighted / cap_sum;
}

std::map<Date, double> market_return_series(const MarketData& market) {
    std::map<Date, double> out;
    const auto& dates = market.calendar().dates();
    for (std::size_t i = 1; i < dates.size(); ++i) {
        const auto caps = market.prior_caps(dates[i]);
        try {
            out.emplace(dates[i], market_return(market.bars_on(dates[i]), caps));
        } catch (const InputError&) {
            // no eligible constituents: the date has no market return
        }
    }
    return out;
}

std::optional<Date> event_day(const Timestamp& local, const TradingCalendar& calendar) {
    const Date d = local.local_date();
    if (calendar.contains(d) && local.local_time_of_day() < hours{16}) {
        return d;
    }
    return calendar.next(d);
}

double aggregate_excess(std::span<const double> stock, std::span<const double> market, Aggregation aggregation) {
    if (stock.size() != market.size()) {
        throw std::invalid_argument("aggregate_excess: series lengths differ");
    }
    if (aggregation == Aggregation::Sum) {
        double total = 0.0;
        for (std::size_t k = 0; k < stock.size(); ++k) {
            total += stock[k] - market[k];
        }
        return total;
    }
    double gs = 1.0;
    double gm = 1.0;
    for (std::size_t k = 0; k < stock.size(); ++k) {
        gs *= 1.0 + stock[k];
        gm *= 1.0 + market[k];
    }
    return (gs - 1.0) - (gm - 1.0);
}

double excess_return_window(const std::string& ticker, Date event_date, const MarketData& market,
                            const std::map<Date, double>& market_returns, int horizon, Aggregation aggregation) {
    const auto start = market.calendar().index_of(event_date);
    if (!start) {
        throw MissingReturns(ticker + ": event date " + format_date(event_date) + " is not a trading day");
    }
    std::vector<double> stock;
    std::vector<double> mkt;
    for (int k = 0; k < horizon; ++k) {
        const std::size_t idx = *start + static_cast<std::size_t>(k);
        if (idx >= market.calendar().size()) {
            throw MissingReturns(ticker + ": calendar ends before day " + std::to_string(k) + " of the window from " +
                                 format_date(event_date));
        }
        const Date d = market.calendar().at(idx);
        const DailyBar* bar = market.find(ticker, d);
        if (bar == nullptr) {
            throw MissingReturns(ticker + ": no bar on " + format_date(d));
        }
        auto m = market_returns.find(d);
        if (m == market_returns.end()) {
            throw MissingReturns(ticker + ": no market return on " + format_date(d));
        }
        stock.push_back(bar->total_return);
        mkt.push_back(m->second);
    }
    return aggregate_excess(stock, mkt, aggregation);
}

LabelingResult label_articles(std::span<const NewsArticle> articles, const MarketData& market,
                              const std::map<Date, double>& market_returns, const LabelingOptions& options) {
    LabelingResult result;
    for (const auto& a : articles) {
        const Timestamp local = to_exchange_local(a.timestamp, options.zone);
        const auto d0 = event_day(local, market.calendar());
        if (!d0) {
            ++result.missing_returns;
            continue;
        }
        try {
            const double excess =
                excess_return_window(a.ticker, *d0, market, market_returns, options.horizon, options.aggregation);
            result.examples.push_back(LabeledExample{a.article_id, a.ticker, local, local.local_date(), *d0, excess,
                                                     assign_label(excess)});
        } catch (const MissingReturns&) {
            ++result.missing_returns;
        }
    }
    return result;
}

}  // namespace sentrade
