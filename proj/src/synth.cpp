#include "sentrade/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "sentrade/csv.hpp"
#include "sentrade/errors.hpp"
#include "sentrade/random.hpp"

namespace sentrade {

using namespace std::chrono;

namespace {

constexpr const char* kPositive[] = {"gain",    "growth",   "profit",     "strong",    "beat",    "upgrade",
                                     "record",  "surge",    "improve",    "exceed",    "rebound", "outperform",
                                     "success", "innovative", "favorable", "expand",   "robust",  "achieve"};
constexpr const char* kNegative[] = {"loss",     "decline",  "weak",    "miss",     "downgrade", "lawsuit",
                                     "fall",     "cut",      "impair",  "drop",     "default",   "recall",
                                     "shortfall", "investigation", "penalty", "adverse", "abandon", "layoff"};

std::string syllable_word(std::size_t i) {
    static const char* onset[] = {"b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
    static const char* nucleus[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
    std::string w;
    std::size_t x = i + 16;  // at least two syllables
    while (x > 0) {
        w += onset[x % 16];
        x /= 16;
        w += nucleus[x % 8];
        x /= 8;
    }
    return w;
}

std::string ticker_symbol(std::size_t i) {
    std::string s(3, 'A');
    s[2] = static_cast<char>('A' + i % 26);
    s[1] = static_cast<char>('A' + (i / 26) % 26);
    s[0] = static_cast<char>('A' + (i / 676) % 26);
    return s;
}

std::string make_text(Rng& rng, const std::string& ticker, double tone, std::size_t vocab) {
    const std::size_t n_words = 40 + rng.index(41);
    std::string text = ticker + " reports:";
    for (std::size_t w = 0; w < n_words; ++w) {
        text += ' ';
        if (rng.bernoulli(0.12)) {
            if (rng.bernoulli(tone)) {
                text += kPositive[rng.index(std::size(kPositive))];
            } else {
                text += kNegative[rng.index(std::size(kNegative))];
            }
        } else {
            text += syllable_word(rng.index(vocab));
        }
    }
    text += '.';
    return text;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_firms < 1 || n_dates < 1) {
        throw ConfigError("synthetic spec: n_firms and n_dates must be at least 1");
    }
    if (!(articles_per_day > 0.0) || !(sigma >= 0.0)) {
        throw ConfigError("synthetic spec: articles_per_day must be positive and sigma nonnegative");
    }
    if (!(duplicate_rate >= 0.0 && duplicate_rate < 1.0) || !(multi_ticker_rate >= 0.0 && multi_ticker_rate < 1.0)) {
        throw ConfigError("synthetic spec: rates must lie in [0, 1)");
    }
    if (multi_ticker_rate > 0.0 && n_firms < 2) {
        throw ConfigError("synthetic spec: multi-ticker articles need at least 2 firms");
    }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SyntheticData data;
    for (const char* w : kPositive) {
        data.positive_words.emplace_back(w);
    }
    for (const char* w : kNegative) {
        data.negative_words.emplace_back(w);
    }

    std::vector<Date> trading;
    for (Date d = spec.start; trading.size() < spec.n_dates; d += days{1}) {
        if (is_weekday(d)) {
            trading.push_back(d);
        }
    }
    const TradingCalendar calendar(trading);
    std::vector<std::string> tickers;
    for (std::size_t i = 0; i < spec.n_firms; ++i) {
        tickers.push_back(ticker_symbol(i));
    }

    // Firm and date effects, percent.
    std::vector<double> firm_effect(spec.n_firms);
    std::vector<double> shares(spec.n_firms);
    std::vector<double> price(spec.n_firms);
    for (std::size_t i = 0; i < spec.n_firms; ++i) {
        firm_effect[i] = rng.normal(0.02, 0.05);
        shares[i] = std::exp(rng.normal(17.0, 1.0));
        price[i] = 20.0 + 180.0 * rng.uniform();
    }
    std::vector<double> date_effect(spec.n_dates);
    for (auto& b : date_effect) {
        b = rng.normal(0.04, 1.0);
    }

    // News over every calendar day spanned by the trading dates, lighter on weekends.
    const std::size_t vocab = 4000;
    const minutes offset{-300};
    std::size_t next_id = 0;
    auto new_id = [&] {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "n%07zu", next_id++);
        return std::string(buf);
    };
    struct Planted {
        std::size_t firm;
        Date event;
        double score;
    };
    std::vector<Planted> planted;
    std::vector<std::pair<NewsArticle, double>> originals;
    for (Date d = trading.front(); d <= trading.back(); d += days{1}) {
        const double rate = calendar.contains(d) ? spec.articles_per_day : 0.1 * spec.articles_per_day;
        const auto count = rng.poisson(rate);
        for (std::uint64_t a = 0; a < count; ++a) {
            const std::size_t firm = rng.index(spec.n_firms);
            const double score = rng.uniform();
            const auto second = static_cast<long long>(rng.index(86400));
            NewsArticle art;
            art.article_id = new_id();
            art.ticker = tickers[firm];
            art.timestamp = Timestamp{sys_seconds{d} + seconds{second} - offset, offset};
            art.text = make_text(rng, art.ticker, 0.3 + 0.4 * score, vocab);
            art.tickers_mentioned = {art.ticker};
            if (rng.bernoulli(spec.multi_ticker_rate)) {
                std::size_t other = rng.index(spec.n_firms - 1);
                if (other >= firm) {
                    ++other;
                }
                art.tickers_mentioned.push_back(tickers[other]);
                std::sort(art.tickers_mentioned.begin(), art.tickers_mentioned.end());
                data.multi_ticker_ids.push_back(art.article_id);
            } else if (auto ev = event_day(art.timestamp, calendar)) {
                planted.push_back({firm, *ev, score});
            }
            originals.emplace_back(std::move(art), score);
        }
    }

    // Verbatim re-publications between one hour and five days later.
    std::vector<std::pair<NewsArticle, double>> dups;
    for (const auto& [art, score] : originals) {
        if (art.tickers_mentioned.size() != 1 || !rng.bernoulli(spec.duplicate_rate)) {
            continue;
        }
        NewsArticle copy = art;
        copy.article_id = new_id();
        copy.timestamp.utc += seconds{3600 + static_cast<long long>(rng.index(5 * 86400 - 3600))};
        data.duplicate_ids.push_back(copy.article_id);
        dups.emplace_back(std::move(copy), score);
    }
    for (auto& d : dups) {
        originals.push_back(std::move(d));
    }
    std::stable_sort(originals.begin(), originals.end(), [](const auto& a, const auto& b) {
        return a.first.timestamp.utc < b.first.timestamp.utc;
    });
    for (auto& [art, score] : originals) {
        data.scores.push_back({art.article_id, spec.model_name, score});
        data.news.push_back(std::move(art));
    }
    std::sort(data.scores.begin(), data.scores.end(),
              [](const ScoreRecord& a, const ScoreRecord& b) { return a.article_id < b.article_id; });

    // Mean planted score per (firm, event day) moves the next trading day's return.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> signal;
    for (const auto& p : planted) {
        const auto idx = *calendar.index_of(p.event);
        if (idx + 1 < trading.size()) {
            auto& s = signal[{p.firm, idx + 1}];
            s.first += p.score;
            ++s.second;
        }
    }

    for (std::size_t t = 0; t < spec.n_dates; ++t) {
        for (std::size_t i = 0; i < spec.n_firms; ++i) {
            double r_pct = firm_effect[i] + date_effect[t] + spec.sigma * rng.normal();
            if (auto it = signal.find({i, t}); it != signal.end()) {
                r_pct += spec.gamma * it->second.first / static_cast<double>(it->second.second);
            }
            const double r = r_pct / 100.0;
            // Split the day into overnight and intraday legs.
            const double overnight = 0.3 * r + 0.002 * rng.normal();
            const double open = price[i] * (1.0 + overnight);
            const double close = price[i] * (1.0 + r);
            price[i] = close;
            data.bars.push_back({tickers[i], trading[t], open, close, r, close * shares[i]});
        }
    }
    return data;
}

void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw InputError("cannot write " + (dir / name).string());
        }
        return out;
    };
    {
        auto out = open("news.jsonl");
        write_news_jsonl(out, data.news);
    }
    {
        auto out = open("bars.csv");
        out << "date,ticker,open,close,ret,market_cap\n";
        for (const auto& b : data.bars) {
            out << format_date(b.date) << ',' << b.ticker << ',' << format_number(b.open_price) << ','
                << format_number(b.close_price) << ',' << format_number(b.total_return) << ','
                << format_number(b.market_cap) << '\n';
        }
    }
    {
        auto out = open("scores.csv");
        out << "article_id,model_name,score\n";
        for (const auto& s : data.scores) {
            out << s.article_id << ',' << s.model_name << ',' << format_number(s.score) << '\n';
        }
    }
    {
        auto out = open("lexicon.csv");
        out << "Word,Negative,Positive,Uncertainty\n";
        for (const auto& w : data.positive_words) {
            out << to_upper_ascii(w) << ",0,2009,0\n";
        }
        for (const auto& w : data.negative_words) {
            out << to_upper_ascii(w) << ",2009,0,0\n";
        }
        out << "REPORTS,0,0,0\n";
    }
    {
        auto out = open("synth.json");
        nlohmann::ordered_json j;
        j["n_firms"] = spec.n_firms;
        j["n_dates"] = spec.n_dates;
        j["articles_per_day"] = spec.articles_per_day;
        j["gamma"] = spec.gamma;
        j["sigma"] = spec.sigma;
        j["duplicate_rate"] = spec.duplicate_rate;
        j["multi_ticker_rate"] = spec.multi_ticker_rate;
        j["seed"] = spec.seed;
        j["start"] = format_date(spec.start);
        j["model_name"] = spec.model_name;
        j["articles"] = data.news.size();
        j["duplicate_ids"] = data.duplicate_ids;
        j["multi_ticker_ids"] = data.multi_ticker_ids;
        out << j.dump(2) << '\n';
    }
}

}  // namespace sentrade
