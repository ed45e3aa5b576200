#include "sentrade/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "sentrade/errors.hpp"

namespace sentrade {

namespace {

using nlohmann::json;

std::string require_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw FormatError(where + ": missing string field '" + key + "'");
    }
    return it->get<std::string>();
}

// Weekdays d with from < d <= to.
long business_days_between(Date from, Date to) {
    long count = 0;
    for (Date d = from + std::chrono::days{1}; d <= to; d += std::chrono::days{1}) {
        if (is_weekday(d)) {
            ++count;
        }
    }
    return count;
}

}  // namespace

std::vector<NewsArticle> load_news_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::vector<NewsArticle> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(where + ": " + e.what());
        }
        if (!obj.is_object()) {
            throw FormatError(where + ": expected a JSON object");
        }
        NewsArticle a;
        a.article_id = require_string(obj, "article_id", where);
        a.ticker = require_string(obj, "ticker", where);
        a.text = require_string(obj, "text", where);
        try {
            a.timestamp = parse_timestamp(require_string(obj, "timestamp", where));
        } catch (const FormatError& e) {
            throw FormatError(where + ": " + e.what());
        }
        auto mentioned = obj.find("tickers_mentioned");
        if (mentioned == obj.end() || !mentioned->is_array()) {
            throw FormatError(where + ": missing array field 'tickers_mentioned'");
        }
        std::set<std::string> symbols;
        for (const auto& s : *mentioned) {
            if (!s.is_string()) {
                throw FormatError(where + ": tickers_mentioned must hold strings");
            }
            symbols.insert(s.get<std::string>());
        }
        a.tickers_mentioned.assign(symbols.begin(), symbols.end());
        if (!seen.insert(a.article_id).second) {
            throw DuplicateError(where + ": duplicate article_id '" + a.article_id + "'");
        }
        out.push_back(std::move(a));
    }
    return out;
}

void write_news_jsonl(std::ostream& out, std::span<const NewsArticle> articles) {
    for (const auto& a : articles) {
        nlohmann::ordered_json obj;
        obj["article_id"] = a.article_id;
        obj["ticker"] = a.ticker;
        obj["tickers_mentioned"] = a.tickers_mentioned;
        obj["timestamp"] = format_timestamp(a.timestamp);
        obj["text"] = a.text;
        out << obj.dump() << '\n';
    }
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isalpha(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

TermVector::TermVector(std::map<std::string, int> counts) : entries_(std::move(counts)) {
    double sum_sq = 0.0;
    for (const auto& [term, count] : entries_) {
        if (count < 1) {
            throw std::invalid_argument("term count must be positive for '" + term + "'");
        }
        sum_sq += static_cast<double>(count) * count;
    }
    norm_ = std::sqrt(sum_sq);
}

TermVector term_frequency(std::span<const std::string> tokens) {
    std::map<std::string, int> counts;
    for (const auto& t : tokens) {
        ++counts[t];
    }
    return TermVector(std::move(counts));
}

double cosine_similarity(const TermVector& a, const TermVector& b) {
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    // Merge over the two sorted maps.
    double dot = 0.0;
    auto ia = a.entries().begin();
    auto ib = b.entries().begin();
    while (ia != a.entries().end() && ib != b.entries().end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += static_cast<double>(ia->second) * ib->second;
            ++ia;
            ++ib;
        }
    }
    const double c = dot / (a.norm() * b.norm());
    return std::clamp(c, 0.0, 1.0);
}

SingleStockResult single_stock_filter(std::span<const NewsArticle> articles) {
    SingleStockResult result;
    for (const auto& a : articles) {
        if (a.tickers_mentioned.size() == 1) {
            result.kept.push_back(a);
        }
    }
    result.funnel.all_news = articles.size();
    result.funnel.single_stock_news = result.kept.size();
    result.funnel.unique_news = result.kept.size();
    return result;
}

NoveltyPartition novelty_filter(std::span<const NewsArticle> articles, const NoveltyOptions& options) {
    if (!(options.threshold > 0.0)) {
        throw std::invalid_argument("novelty threshold must be positive");
    }
    if (options.window < 0) {
        throw std::invalid_argument("novelty window must be nonnegative");
    }
    for (std::size_t i = 1; i < articles.size(); ++i) {
        if (articles[i].timestamp.utc < articles[i - 1].timestamp.utc) {
            throw std::invalid_argument("novelty_filter: articles not sorted by timestamp (index " +
                                        std::to_string(i) + ", id " + articles[i].article_id + ")");
        }
    }

    struct Prior {
        std::size_t index;
        TermVector vec;
    };
    const std::chrono::seconds window_span = std::chrono::days{options.window};
    // Calendar horizon past which a business-day window can never reach.
    const std::chrono::days business_horizon{7 * (options.window / 5 + 2)};

    auto in_window = [&](const NewsArticle& earlier, const NewsArticle& now) {
        if (options.unit == WindowUnit::CalendarDays) {
            return now.timestamp.utc - earlier.timestamp.utc <= window_span;
        }
        return business_days_between(earlier.timestamp.local_date(), now.timestamp.local_date()) <=
               options.window;
    };
    auto prunable = [&](const NewsArticle& earlier, const NewsArticle& now) {
        if (options.unit == WindowUnit::CalendarDays) {
            return now.timestamp.utc - earlier.timestamp.utc > window_span;
        }
        return now.timestamp.utc - earlier.timestamp.utc > business_horizon;
    };

    NoveltyPartition out;
    std::unordered_map<std::string, std::deque<Prior>> history;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        const auto& now = articles[i];
        const std::string key = options.scope == NoveltyScope::SameTicker ? now.ticker : std::string{};
        auto& priors = history[key];
        while (!priors.empty() && prunable(articles[priors.front().index], now)) {
            priors.pop_front();
        }
        const auto tokens = tokenize(now.text);
        TermVector vec = term_frequency(tokens);
        bool duplicate = false;
        for (const auto& p : priors) {
            if (in_window(articles[p.index], now) && cosine_similarity(p.vec, vec) >= options.threshold) {
                duplicate = true;
                break;
            }
        }
        (duplicate ? out.excluded : out.kept).push_back(i);
        priors.push_back(Prior{i, std::move(vec)});
    }
    return out;
}

void sort_chronologically(std::vector<NewsArticle>& articles) {
    std::stable_sort(articles.begin(), articles.end(), [](const NewsArticle& a, const NewsArticle& b) {
        return a.timestamp.utc < b.timestamp.utc;
    });
}

}  // namespace sentrade
