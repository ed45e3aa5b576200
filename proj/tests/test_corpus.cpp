#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sentrade/corpus.hpp"
#include "sentrade/errors.hpp"
#include "sentrade/random.hpp"
#include "support.hpp"

using namespace sentrade;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<std::string> oracle_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
            cur += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// cosine over a dense count array built from the raw words
double oracle_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::string, std::pair<double, double>> counts;
    for (const auto& w : a) counts[w].first += 1;
    for (const auto& w : b) counts[w].second += 1;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [w, c] : counts) {
        dot += c.first * c.second;
        na += c.first * c.first;
        nb += c.second * c.second;
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(na * nb);
}

std::vector<std::string> random_words(Rng& rng, std::size_t vocab, std::size_t max_len) {
    std::vector<std::string> words;
    const auto len = rng.index(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        words.push_back(std::string(1, static_cast<char>('a' + rng.index(vocab))));
    }
    return words;
}

std::string join(const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
        if (!s.empty()) s += ' ';
        s += w;
    }
    return s;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-letters", "[corpus]") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("Profit up, LOSS down") == std::vector<std::string>{"profit", "up", "loss", "down"});
    CHECK(tokenize("U.S.-based firm") == std::vector<std::string>{"u", "s", "based", "firm"});
    CHECK(tokenize("  42 -- 7 ").empty());
    CHECK(tokenize("caf\xc3\xa9 ok") == std::vector<std::string>{"caf", "ok"});
}

TEST_CASE("tokenize agrees with a character scan on random byte strings", "[corpus][property]") {
    Rng rng(11);
    const std::string alphabet = "abcXYZ .,-'0913\t\n\xe2";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const auto len = rng.index(40);
        for (std::size_t i = 0; i < len; ++i) text += alphabet[rng.index(alphabet.size())];
        REQUIRE(tokenize(text) == oracle_tokens(text));
    }
}

TEST_CASE("term_frequency counts terms and caches the norm", "[corpus]") {
    const std::vector<std::string> none;
    const auto empty = term_frequency(none);
    CHECK(empty.empty());
    CHECK(empty.norm() == 0.0);

    const std::vector<std::string> aba{"a", "b", "a"};
    const auto v = term_frequency(aba);
    CHECK(v.entries() == std::map<std::string, int>{{"a", 2}, {"b", 1}});
    CHECK_THAT(v.norm(), WithinAbs(std::sqrt(5.0), 1e-15));

    const std::vector<std::string> x{"x"};
    CHECK(term_frequency(x).norm() == 1.0);
}

TEST_CASE("cosine similarity examples", "[corpus]") {
    auto vec = [](std::vector<std::string> words) { return term_frequency(words); };
    CHECK_THAT(cosine_similarity(vec({"a", "b", "b"}), vec({"a", "b", "b"})), WithinAbs(1.0, 1e-12));
    CHECK(cosine_similarity(vec({"a"}), vec({"b"})) == 0.0);
    CHECK_THAT(cosine_similarity(vec({"a", "b"}), vec({"a", "c"})), WithinAbs(0.5, 1e-15));
    CHECK(cosine_similarity(vec({}), vec({"a"})) == 0.0);
    CHECK(cosine_similarity(vec({}), vec({})) == 0.0);
}

TEST_CASE("cosine similarity is symmetric, bounded and matches a dense oracle", "[corpus][property]") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_words(rng, 6, 12);
        const auto b = random_words(rng, 6, 12);
        const auto va = term_frequency(a);
        const auto vb = term_frequency(b);
        const double ab = cosine_similarity(va, vb);
        REQUIRE(ab == cosine_similarity(vb, va));
        REQUIRE(ab >= 0.0);
        REQUIRE(ab <= 1.0);
        REQUIRE_THAT(ab, WithinAbs(oracle_cosine(a, b), 1e-12));
        if (!a.empty()) {
            REQUIRE_THAT(cosine_similarity(va, va), WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("single-stock filter keeps exclusively single-ticker news", "[corpus]") {
    const std::vector<NewsArticle> batch{
        testing::article("a1", "AAPL", "2023-01-03T10:00:00Z", "one", {"AAPL"}),
        testing::article("a2", "AAPL", "2023-01-03T11:00:00Z", "two", {"AAPL", "MSFT"}),
        testing::article("a3", "MSFT", "2023-01-03T12:00:00Z", "three", {"AAPL", "GOOG", "MSFT"}),
    };
    const auto res = single_stock_filter(batch);
    REQUIRE(res.kept.size() == 1);
    CHECK(res.kept[0].article_id == "a1");
    CHECK(res.funnel.all_news == 3);
    CHECK(res.funnel.single_stock_news == 1);
    CHECK(res.funnel.unique_news == 1);
}

TEST_CASE("novelty filter examples", "[corpus]") {
    const std::string text = "Shares of the company rose after strong quarterly earnings";
    NoveltyOptions opts;

    SECTION("identical article one day later is excluded") {
        const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-02T10:00:00Z", text),
                                         testing::article("b", "X", "2023-01-03T10:00:00Z", text)};
        const auto part = novelty_filter(v, opts);
        CHECK(part.kept == std::vector<std::size_t>{0});
        CHECK(part.excluded == std::vector<std::size_t>{1});
    }
    SECTION("identical article thirty days later is kept") {
        const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-02T10:00:00Z", text),
                                         testing::article("b", "X", "2023-02-01T10:00:00Z", text)};
        CHECK(novelty_filter(v, opts).kept.size() == 2);
    }
    SECTION("cosine one half stays below 0.8") {
        const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-02T10:00:00Z", "alpha beta"),
                                         testing::article("b", "X", "2023-01-03T10:00:00Z", "alpha gamma")};
        CHECK(novelty_filter(v, opts).kept.size() == 2);
    }
    SECTION("other tickers are not compared by default") {
        const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-02T10:00:00Z", text),
                                         testing::article("b", "Y", "2023-01-03T10:00:00Z", text)};
        CHECK(novelty_filter(v, opts).kept.size() == 2);
        opts.scope = NoveltyScope::Corpus;
        CHECK(novelty_filter(v, opts).kept.size() == 1);
    }
    SECTION("excluded articles still count as earlier articles") {
        // b duplicates a, c duplicates b but is 25 days after a
        const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-01T10:00:00Z", text),
                                         testing::article("b", "X", "2023-01-10T10:00:00Z", text),
                                         testing::article("c", "X", "2023-01-26T10:00:00Z", text)};
        const auto part = novelty_filter(v, opts);
        CHECK(part.kept == std::vector<std::size_t>{0});
        CHECK(part.excluded == std::vector<std::size_t>{1, 2});
    }
    SECTION("business-day window") {
        // Friday to the Friday three weeks later is 15 business days
        const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-06T10:00:00Z", text),
                                         testing::article("b", "X", "2023-01-27T10:00:00Z", text)};
        opts.unit = WindowUnit::BusinessDays;
        opts.window = 5;
        CHECK(novelty_filter(v, opts).kept.size() == 2);
        opts.window = 15;
        CHECK(novelty_filter(v, opts).kept.size() == 1);
        opts.window = 14;
        CHECK(novelty_filter(v, opts).kept.size() == 2);
    }
}

TEST_CASE("novelty filter rejects unsorted input", "[corpus]") {
    const std::vector<NewsArticle> v{testing::article("a", "X", "2023-01-03T10:00:00Z", "x"),
                                     testing::article("b", "X", "2023-01-02T10:00:00Z", "y")};
    CHECK_THROWS_AS(novelty_filter(v, NoveltyOptions{}), std::invalid_argument);
}

TEST_CASE("novelty filter matches a brute-force pairwise oracle", "[corpus][property]") {
    Rng rng(99);
    const std::vector<std::string> tickers{"A", "B", "C"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<NewsArticle> v;
        std::vector<std::vector<std::string>> words;
        auto t = parse_timestamp("2023-01-01T00:00:00Z");
        const auto n = 2 + rng.index(30);
        for (std::size_t i = 0; i < n; ++i) {
            t.utc += std::chrono::seconds{static_cast<long long>(rng.index(6 * 86400))};
            words.push_back(random_words(rng, 4, 6));
            NewsArticle a;
            a.article_id = "n" + std::to_string(i);
            a.ticker = tickers[rng.index(tickers.size())];
            a.tickers_mentioned = {a.ticker};
            a.timestamp = t;
            a.text = join(words.back());
            v.push_back(a);
        }
        NoveltyOptions opts;
        opts.window = 1 + static_cast<int>(rng.index(20));
        opts.threshold = 0.3 + 0.7 * rng.uniform();

        std::vector<std::size_t> expect_kept;
        for (std::size_t i = 0; i < n; ++i) {
            bool dup = false;
            for (std::size_t j = 0; j < i; ++j) {
                const bool same = v[j].ticker == v[i].ticker;
                const bool near = v[i].timestamp.utc - v[j].timestamp.utc <= std::chrono::days{opts.window};
                if (same && near && oracle_cosine(words[j], words[i]) >= opts.threshold) dup = true;
            }
            if (!dup) expect_kept.push_back(i);
        }
        const auto part = novelty_filter(v, opts);
        REQUIRE(part.kept == expect_kept);
        REQUIRE(part.kept.size() + part.excluded.size() == n);
    }
}

TEST_CASE("novelty filter invariants", "[corpus][property]") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<NewsArticle> v;
        auto t = parse_timestamp("2023-03-01T09:00:00-05:00");
        const auto n = 1 + rng.index(40);
        for (std::size_t i = 0; i < n; ++i) {
            t.utc += std::chrono::seconds{static_cast<long long>(rng.index(86400))};
            NewsArticle a;
            a.article_id = "n" + std::to_string(i);
            a.ticker = std::string(1, static_cast<char>('P' + rng.index(4)));
            a.tickers_mentioned = {a.ticker};
            a.timestamp = t;
            a.text = join(random_words(rng, 3, 5));
            v.push_back(a);
        }
        std::size_t previous_kept = 0;
        for (double threshold : {0.1, 0.5, 0.8, 0.95, 1.0, 1.01}) {
            NoveltyOptions opts;
            opts.threshold = threshold;
            const auto part = novelty_filter(v, opts);
            REQUIRE(part.kept.size() >= previous_kept);
            previous_kept = part.kept.size();
            // the first article of each ticker is always kept
            std::map<std::string, std::size_t> first;
            for (std::size_t i = 0; i < n; ++i) first.try_emplace(v[i].ticker, i);
            for (const auto& [ticker, idx] : first) {
                REQUIRE(std::find(part.kept.begin(), part.kept.end(), idx) != part.kept.end());
            }
            if (threshold > 1.0) {
                REQUIRE(part.kept.size() == n);
            }
        }
    }
}

TEST_CASE("news JSON lines round trip and validation", "[corpus]") {
    testing::TempDir dir;
    const std::vector<NewsArticle> v{
        testing::article("a1", "AAPL", "2023-01-03T10:00:00-05:00", "Quote \"inside\"\nnew line"),
        testing::article("a2", "MSFT", "2023-01-04T21:15:30Z", "Second", {"AAPL", "MSFT"}),
    };
    {
        std::ofstream out(dir / "news.jsonl", std::ios::binary);
        write_news_jsonl(out, v);
    }
    const auto back = load_news_jsonl(dir / "news.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].text == v[0].text);
    CHECK(back[0].timestamp == v[0].timestamp);
    CHECK(back[1].tickers_mentioned == v[1].tickers_mentioned);

    testing::write_text(dir / "dup.jsonl",
                        R"({"article_id":"x","ticker":"A","tickers_mentioned":["A"],"timestamp":"2023-01-03T10:00:00Z","text":"t"})"
                        "\n"
                        R"({"article_id":"x","ticker":"A","tickers_mentioned":["A"],"timestamp":"2023-01-04T10:00:00Z","text":"t"})"
                        "\n");
    CHECK_THROWS_AS(load_news_jsonl(dir / "dup.jsonl"), DuplicateError);

    testing::write_text(dir / "naive.jsonl",
                        R"({"article_id":"x","ticker":"A","tickers_mentioned":["A"],"timestamp":"2023-01-03T10:00:00","text":"t"})"
                        "\n");
    CHECK_THROWS_AS(load_news_jsonl(dir / "naive.jsonl"), FormatError);

    testing::write_text(dir / "broken.jsonl", "{not json\n");
    CHECK_THROWS_AS(load_news_jsonl(dir / "broken.jsonl"), FormatError);
}
