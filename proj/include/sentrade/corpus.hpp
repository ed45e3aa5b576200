#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentrade/time.hpp"

namespace sentrade {

struct NewsArticle {
    std::string article_id;
    std::string ticker;
    Timestamp timestamp;
    std::string text;
    std::vector<std::string> tickers_mentioned;  // sorted, distinct
};

/// Reads one JSON object per line. Rejects duplicate article ids.
std::vector<NewsArticle> load_news_jsonl(const std::filesystem::path& path);
void write_news_jsonl(std::ostream& out, std::span<const NewsArticle> articles);

/// Lowercases and splits on every non-alphabetic byte.
std::vector<std::string> tokenize(std::string_view text);

/// Sparse term counts with a cached Euclidean norm.
class TermVector {
public:
    TermVector() = default;
    explicit TermVector(std::map<std::string, int> counts);

    const std::map<std::string, int>& entries() const { return entries_; }
    double norm() const { return norm_; }
    bool empty() const { return entries_.empty(); }

private:
    std::map<std::string, int> entries_;
    double norm_ = 0.0;
};

TermVector term_frequency(std::span<const std::string> tokens);

/// dot(a, b) / (|a| |b|), clamped to [0, 1]; 0 when either vector is empty.
double cosine_similarity(const TermVector& a, const TermVector& b);

struct CorpusFunnel {
    std::size_t all_news = 0;
    std::size_t single_stock_news = 0;
    std::size_t unique_news = 0;
};

struct SingleStockResult {
    std::vector<NewsArticle> kept;
    CorpusFunnel funnel;  // unique_news mirrors single_stock_news until novelty runs
};

SingleStockResult single_stock_filter(std::span<const NewsArticle> articles);

enum class WindowUnit { CalendarDays, BusinessDays };
enum class NoveltyScope { SameTicker, Corpus };

struct NoveltyOptions {
    int window = 20;
    WindowUnit unit = WindowUnit::CalendarDays;
    NoveltyScope scope = NoveltyScope::SameTicker;
    double threshold = 0.8;
};

/// Indices into the input, each ascending. Together they cover the input exactly once.
struct NoveltyPartition {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> excluded;
};

/// Excludes an article when its cosine similarity to any earlier in-window article
/// (kept or not) reaches the threshold. Input must be sorted by timestamp;
/// std::invalid_argument otherwise.
NoveltyPartition novelty_filter(std::span<const NewsArticle> articles, const NoveltyOptions& options);

/// Stable sort by UTC instant.
void sort_chronologically(std::vector<NewsArticle>& articles);

}  // namespace sentrade
