#include <catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "sentrade/errors.hpp"
#include "sentrade/random.hpp"
#include "sentrade/scoring.hpp"
#include "support.hpp"

using namespace sentrade;
using Catch::Matchers::WithinAbs;

namespace {

SentimentLexicon small_lexicon() {
    SentimentLexicon lex;
    lex.positive_terms = {"gain", "beat", "strong"};
    lex.negative_terms = {"loss", "miss", "weak"};
    return lex;
}

}  // namespace

TEST_CASE("lexicon loading applies the positive-number membership rule", "[scoring]") {
    testing::TempDir dir;
    testing::write_text(dir / "lm.csv",
                        "Word,Seq_num,Negative,Positive,Uncertainty\n"
                        "ACHIEVE,1,0,2009,0\n"
                        "ABANDON,2,2009,0,0\n"
                        "TABLE,3,0,0,0\n"
                        "Doubt,4,-2020,0,2009\n");
    const auto lex = load_lexicon(dir / "lm.csv");
    CHECK(lex.positive_terms.count("achieve") == 1);
    CHECK(lex.negative_terms.count("abandon") == 1);
    CHECK(lex.positive_terms.count("table") == 0);
    CHECK(lex.negative_terms.count("table") == 0);
    CHECK(lex.negative_terms.count("doubt") == 0);
    CHECK(lex.positive_terms.size() == 1);
    CHECK(lex.negative_terms.size() == 1);
}

TEST_CASE("lexicon loading errors", "[scoring]") {
    testing::TempDir dir;
    testing::write_text(dir / "both.csv", "Word,Positive,Negative\nMIXED,2009,2011\n");
    CHECK_THROWS_AS(load_lexicon(dir / "both.csv"), ConflictError);
    testing::write_text(dir / "cols.csv", "Word,Positive\nGOOD,2009\n");
    CHECK_THROWS_AS(load_lexicon(dir / "cols.csv"), FormatError);
    CHECK_THROWS_AS(load_lexicon(dir / "absent.csv"), InputError);
}

TEST_CASE("lexicon score examples", "[scoring]") {
    const auto lex = small_lexicon();
    const std::vector<std::string> two_one{"gain", "the", "beat", "loss"};
    CHECK_THAT(lexicon_score(two_one, lex), WithinAbs(2.0 / 3.0, 1e-15));
    const std::vector<std::string> none{"the", "table"};
    CHECK(lexicon_score(none, lex) == 0.5);
    const std::vector<std::string> negative{"loss", "weak"};
    CHECK(lexicon_score(negative, lex) == 0.0);
    const std::vector<std::string> positive{"strong"};
    CHECK(lexicon_score(positive, lex) == 1.0);
    const std::vector<std::string> even{"gain", "miss"};
    CHECK(lexicon_score(even, lex) == 0.5);
}

TEST_CASE("lexicon score properties", "[scoring][property]") {
    const auto lex = small_lexicon();
    const std::vector<std::string> vocab{"gain", "beat", "strong", "loss", "miss", "weak", "the", "firm", "table"};
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::string> tokens;
        const auto n = rng.index(20);
        int p = 0, q = 0;
        for (std::size_t i = 0; i < n; ++i) {
            tokens.push_back(vocab[rng.index(vocab.size())]);
            p += lex.positive_terms.count(tokens.back()) ? 1 : 0;
            q += lex.negative_terms.count(tokens.back()) ? 1 : 0;
        }
        const double s = lexicon_score(tokens, lex);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);
        REQUIRE((s == 1.0) == (q == 0 && p > 0));
        REQUIRE((s == 0.0) == (p == 0 && q > 0));
        if (p == q) REQUIRE(s == 0.5);

        auto shuffled = tokens;
        rng.shuffle(shuffled.begin(), shuffled.end());
        REQUIRE(lexicon_score(shuffled, lex) == s);

        auto padded = tokens;
        padded.insert(padded.begin() + static_cast<long>(rng.index(padded.size() + 1)), "unrelated");
        REQUIRE(lexicon_score(padded, lex) == s);

        auto doubled = tokens;
        doubled.insert(doubled.end(), tokens.begin(), tokens.end());
        REQUIRE(lexicon_score(doubled, lex) == s);
    }
}

TEST_CASE("external score ingestion", "[scoring]") {
    testing::TempDir dir;
    testing::write_text(dir / "ok.csv", "article_id,model_name,score\na1,OPT,0.93\na1,BERT,0\nzz,OPT,1\n");
    const std::unordered_set<std::string> known{"a1"};
    const auto res = ingest_external_scores(dir / "ok.csv", &known);
    REQUIRE(res.records.size() == 3);
    CHECK(res.records[0].score == 0.93);
    CHECK(res.unknown_ids == std::vector<std::string>{"zz"});

    testing::write_text(dir / "range.csv", "article_id,model_name,score\na1,OPT,0.2\na2,BERT,1.7\n");
    try {
        ingest_external_scores(dir / "range.csv");
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }

    testing::write_text(dir / "dup.csv", "article_id,model_name,score\na1,OPT,0.2\na1,OPT,0.3\n");
    CHECK_THROWS_AS(ingest_external_scores(dir / "dup.csv"), DuplicateError);

    testing::write_text(dir / "neg.csv", "article_id,model_name,score\na1,OPT,-0.01\n");
    CHECK_THROWS_AS(ingest_external_scores(dir / "neg.csv"), RangeError);

    testing::write_text(dir / "nan.csv", "article_id,model_name,score\na1,OPT,abc\n");
    CHECK_THROWS_AS(ingest_external_scores(dir / "nan.csv"), InputError);
}

TEST_CASE("score table ordering and CSV output", "[scoring]") {
    ScoreTable t;
    t.add({"b", "OPT", 0.25});
    t.add({"a", "OPT", 0.5});
    t.add({"a", "BERT", 0.75});
    CHECK_THROWS_AS(t.add({"a", "BERT", 0.1}), DuplicateError);
    CHECK_THROWS_AS(t.add({"c", "BERT", 1.5}), RangeError);
    CHECK(t.models() == std::vector<std::string>{"BERT", "OPT"});
    CHECK(t.find("a", "OPT") == 0.5);
    CHECK_FALSE(t.find("b", "BERT").has_value());
    std::ostringstream out;
    write_score_csv(out, t);
    CHECK(out.str() == "article_id,model_name,score\na,BERT,0.75\na,OPT,0.5\nb,OPT,0.25\n");
}
