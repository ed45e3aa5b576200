#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentrade/config.hpp"
#include "sentrade/errors.hpp"
#include "sentrade/pipeline.hpp"
#include "sentrade/synth.hpp"
#include "support.hpp"

using namespace sentrade;
namespace fs = std::filesystem;

namespace {

SyntheticSpec small_spec() {
    SyntheticSpec s;
    s.n_firms = 12;
    s.n_dates = 80;
    s.articles_per_day = 6;
    s.duplicate_rate = 0.05;
    s.seed = 3;
    return s;
}

RunConfig config_for(const fs::path& data, const fs::path& out) {
    RunConfig c;
    c.news = data / "news.jsonl";
    c.bars = data / "bars.csv";
    c.lexicon = data / "lexicon.csv";
    c.scores = data / "scores.csv";
    c.output_dir = out;
    return c;
}

std::string cli() { return SENTRADE_CLI; }

}  // namespace

TEST_CASE("synthetic generation is a function of the seed", "[pipeline]") {
    const auto spec = small_spec();
    testing::TempDir a, b;
    write_synthetic(generate_synthetic(spec), spec, a.path());
    write_synthetic(generate_synthetic(spec), spec, b.path());
    for (const char* f : {"news.jsonl", "bars.csv", "scores.csv", "lexicon.csv", "synth.json"}) {
        INFO(f);
        CHECK(testing::read_text(a / f) == testing::read_text(b / f));
    }
    auto other = spec;
    other.seed = 4;
    testing::TempDir c;
    write_synthetic(generate_synthetic(other), other, c.path());
    CHECK(testing::read_text(a / "bars.csv") != testing::read_text(c / "bars.csv"));
}

TEST_CASE("synthetic spec validation", "[pipeline]") {
    auto s = small_spec();
    s.n_firms = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_spec();
    s.sigma = -1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("novelty filter removes exactly the injected verbatim copies", "[pipeline]") {
    auto spec = small_spec();
    spec.duplicate_rate = 0.1;
    spec.n_dates = 150;
    const auto data = generate_synthetic(spec);
    REQUIRE(data.news.size() >= 1000);
    REQUIRE(!data.duplicate_ids.empty());
    const auto single = single_stock_filter(data.news);
    const auto part = novelty_filter(single.kept, NoveltyOptions{});
    std::set<std::string> excluded;
    for (auto i : part.excluded) excluded.insert(single.kept[i].article_id);
    CHECK(excluded == std::set<std::string>(data.duplicate_ids.begin(), data.duplicate_ids.end()));
    CHECK(single.funnel.all_news - single.funnel.single_stock_news == data.multi_ticker_ids.size());
}

TEST_CASE("a null planted effect is not detected", "[pipeline]") {
    auto spec = small_spec();
    spec.gamma = 0.0;
    spec.n_firms = 30;
    spec.n_dates = 120;
    testing::TempDir dir;
    write_synthetic(generate_synthetic(spec), spec, dir.path());
    auto c = config_for(dir.path(), dir / "out");
    c.lexicon_scoring = false;
    c.regressions = {{"planted"}};
    StageSelection stages;
    stages.backtest = false;
    const auto res = run_pipeline(c, stages);
    REQUIRE(res.regressions.size() == 1);
    const auto& reg = res.regressions[0].regression;
    CHECK(std::abs(reg.fit.gamma(0)) <= 3.0 * reg.se(0));
}

TEST_CASE("full run writes every report and is reproducible", "[pipeline]") {
    const auto spec = small_spec();
    testing::TempDir dir;
    write_synthetic(generate_synthetic(spec), spec, dir / "data");
    const auto c1 = config_for(dir / "data", dir / "out1");
    const auto c2 = config_for(dir / "data", dir / "out2");
    const auto r1 = run_pipeline(c1);
    const auto files = emit_report(r1, c1, StageSelection::all(), c1.output_dir);
    emit_report(run_pipeline(c2), c2, StageSelection::all(), c2.output_dir);

    const std::vector<std::string> expected{"funnel.json",   "labels.csv",      "scores.csv",     "metrics.json",
                                            "regression.json", "strategies.json", "cumulative.csv", "manifest.json"};
    CHECK(files == expected);
    for (const auto& f : expected) {
        INFO(f);
        REQUIRE(fs::exists(dir / "out1" / f));
        CHECK(testing::read_text(dir / "out1" / f) == testing::read_text(dir / "out2" / f));
    }

    const auto funnel = nlohmann::json::parse(testing::read_text(dir / "out1" / "funnel.json"));
    CHECK(funnel["all_news"] >= funnel["single_stock_news"]);
    CHECK(funnel["single_stock_news"] >= funnel["unique_news"]);

    const auto metrics = nlohmann::json::parse(testing::read_text(dir / "out1" / "metrics.json"));
    REQUIRE(metrics["models"].size() == 2);
    CHECK(metrics["models"][0]["model"] == "lexicon");
    CHECK(metrics["models"][1]["model"] == "planted");
    const auto& cm = metrics["models"][0]["confusion"];
    CHECK(cm["tp"].get<int>() + cm["fp"].get<int>() + cm["tn"].get<int>() + cm["fn"].get<int>() ==
          metrics["split"]["test"].get<int>());

    // automatic regression set: both models together, then each alone
    const auto reg = nlohmann::json::parse(testing::read_text(dir / "out1" / "regression.json"));
    CHECK(reg["regressions"].size() == 3);
}

TEST_CASE("manifest hashes track input bytes", "[pipeline]") {
    const auto spec = small_spec();
    testing::TempDir dir;
    write_synthetic(generate_synthetic(spec), spec, dir / "data");
    auto c = config_for(dir / "data", dir / "out");
    const auto stages = StageSelection::filter_only();
    auto manifest = [&] {
        emit_report(run_pipeline(c, stages), c, stages, c.output_dir);
        return nlohmann::json::parse(testing::read_text(dir / "out" / "manifest.json"));
    };
    const auto m1 = manifest();
    const auto m2 = manifest();
    CHECK(m1 == m2);
    REQUIRE(m1["inputs"][0]["role"] == "news");

    auto news = testing::read_text(dir / "data" / "news.jsonl");
    const auto pos = news.find("\"text\":\"") + 8;
    news[pos] = news[pos] == 'x' ? 'y' : 'x';
    testing::write_text(dir / "data" / "news.jsonl", news);
    const auto m3 = manifest();
    CHECK(m3["inputs"][0]["sha256"] != m1["inputs"][0]["sha256"]);
    CHECK(m3["config"] == m1["config"]);
}

TEST_CASE("a result without strategies still yields a valid strategies file", "[pipeline]") {
    testing::TempDir dir;
    testing::write_text(dir / "news.jsonl", "");
    RunConfig c;
    c.news = dir / "news.jsonl";
    PipelineResult empty;
    emit_report(empty, c, StageSelection::all(), dir / "out");
    const auto j = nlohmann::json::parse(testing::read_text(dir / "out" / "strategies.json"));
    CHECK(j["strategies"].is_array());
    CHECK(j["strategies"].empty());
}

TEST_CASE("config files and validation", "[pipeline]") {
    testing::TempDir dir;
    testing::write_text(dir / "run.conf",
                        "# comment line\n"
                        "news = data/news.jsonl\n"
                        "bars = /abs/bars.csv   # trailing comment\n"
                        "similarity_threshold = 0.9\n"
                        "novelty_unit = business\n"
                        "regressions = planted+lexicon, planted\n"
                        "cost_convention = per_side\n"
                        "start_date = 2021-02-01\n");
    RunConfig c;
    load_config_file(c, dir / "run.conf");
    CHECK(c.news == dir / "data/news.jsonl");
    CHECK(c.bars == "/abs/bars.csv");
    CHECK(c.similarity_threshold == 0.9);
    CHECK(c.novelty_unit == WindowUnit::BusinessDays);
    CHECK(c.regressions == std::vector<std::vector<std::string>>{{"planted", "lexicon"}, {"planted"}});
    CHECK(c.cost_convention == CostConvention::PerSide);
    CHECK(c.start_date == parse_date("2021-02-01"));
    CHECK(c.output_dir == "out");

    RunConfig d;
    CHECK(d.similarity_threshold == 0.8);
    CHECK(d.novelty_window == 20);
    CHECK(d.quantile_fraction == 0.2);
    CHECK(d.cost_bps == 10.0);

    CHECK_THROWS_AS(apply_setting(d, "no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(d, "seed", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_setting(d, "cluster", "three_way"), ConfigError);

    auto valid = config_for("/d", "/o");
    CHECK_NOTHROW(validate(valid));
    auto bad = valid;
    bad.similarity_threshold = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = valid;
    bad.similarity_threshold = 1.01;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = valid;
    bad.quantile_fraction = 0.6;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = valid;
    bad.cost_bps = -1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = valid;
    bad.lexicon.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);

    for (auto key : config_keys()) {
        CHECK(to_json(valid).contains(std::string(key)) == (key != "output_dir"));
    }
}

TEST_CASE("command line exit codes", "[pipeline][cli]") {
    const auto spec = small_spec();
    testing::TempDir dir;
    write_synthetic(generate_synthetic(spec), spec, dir / "data");
    const std::string data = (dir / "data").string();
    const std::string quiet = " > " + (dir / "log.txt").string() + " 2>&1";

    const std::string good = cli() + " run --news " + data + "/news.jsonl --bars " + data + "/bars.csv --lexicon " +
                             data + "/lexicon.csv --scores " + data + "/scores.csv --output-dir " +
                             (dir / "out").string();
    CHECK(testing::run_command(good + quiet) == 0);
    CHECK(fs::exists(dir / "out" / "strategies.json"));

    const std::string no_lexicon = cli() + " run --news " + data + "/news.jsonl --bars " + data +
                                   "/bars.csv --scores " + data + "/scores.csv --output-dir " +
                                   (dir / "out2").string();
    CHECK(testing::run_command(no_lexicon + quiet) == 1);
    CHECK(testing::read_text(dir / "log.txt").find("lexicon") != std::string::npos);

    const std::string missing = cli() + " filter --news " + data + "/absent.jsonl --bars " + data +
                                "/bars.csv --lexicon-scoring false --scores " + data + "/scores.csv";
    CHECK(testing::run_command(missing + quiet) == 1);

    CHECK(testing::run_command(cli() + " run --similarity-threshold 2" + quiet) == 1);

    const std::string env_run = "SENTRADE_OUTPUT_DIR=" + (dir / "env_out").string() + " " + cli() + " filter --news " +
                                data + "/news.jsonl --bars " + data + "/bars.csv --lexicon " + data + "/lexicon.csv";
    CHECK(testing::run_command(env_run + quiet) == 0);
    CHECK(fs::exists(dir / "env_out" / "funnel.json"));
}

TEST_CASE("numerical failures exit with code 2", "[pipeline][cli]") {
    auto spec = small_spec();
    testing::TempDir dir;
    write_synthetic(generate_synthetic(spec), spec, dir / "data");
    // a constant score carries no within variation
    std::string scores = "article_id,model_name,score\n";
    for (const auto& a : generate_synthetic(spec).news) scores += a.article_id + ",flat,0.5\n";
    testing::write_text(dir / "flat.csv", scores);
    const std::string data = (dir / "data").string();
    const std::string cmd = cli() + " regress --news " + data + "/news.jsonl --bars " + data +
                            "/bars.csv --lexicon-scoring false --scores " + (dir / "flat.csv").string() +
                            " --output-dir " + (dir / "out").string() + " > " + (dir / "log.txt").string() + " 2>&1";
    CHECK(testing::run_command(cmd) == 2);
    CHECK(testing::read_text(dir / "log.txt").find("regress") != std::string::npos);
}
