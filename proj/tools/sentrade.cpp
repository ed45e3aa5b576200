// sentrade: news-sentiment research pipeline command line.
//
//   sentrade run --config run.conf
//   sentrade synth --out data/golden --seed 7
//
// Exit codes: 0 success, 1 input or configuration error, 2 numerical failure.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sentrade/config.hpp"
#include "sentrade/pipeline.hpp"
#include "sentrade/synth.hpp"

namespace {

using namespace sentrade;

std::string flag_name(std::string_view key) {
    std::string s(key);
    for (auto& c : s) {
        if (c == '_') {
            c = '-';
        }
    }
    return "--" + s;
}

struct PipelineCommand {
    CLI::App* app = nullptr;
    StageSelection stages;
    std::string config_path;
    std::map<std::string, std::string> overrides;
};

void add_pipeline_options(PipelineCommand& cmd) {
    cmd.app->add_option("-c,--config", cmd.config_path, "key = value config file");
    for (const auto key : config_keys()) {
        const std::string k(key);
        cmd.app->add_option_function<std::string>(
            flag_name(key), [&cmd, k](const std::string& v) { cmd.overrides[k] = v; }, "override '" + k + "'");
    }
}

int run_command(const PipelineCommand& cmd) {
    RunConfig config;
    try {
        if (!cmd.config_path.empty()) {
            load_config_file(config, cmd.config_path);
        }
        if (const char* env = std::getenv("SENTRADE_OUTPUT_DIR"); env != nullptr && *env != '\0') {
            config.output_dir = env;
        }
        for (const auto& [k, v] : cmd.overrides) {
            apply_setting(config, k, v);
        }
    } catch (const std::exception& e) {
        std::cerr << "sentrade: config: " << e.what() << '\n';
        return 1;
    }
    try {
        const auto result = run_pipeline(config, cmd.stages);
        const auto files = emit_report(result, config, cmd.stages, config.output_dir);
        std::cout << "news: " << result.funnel.all_news << " all, " << result.funnel.single_stock_news
                  << " single-stock, " << result.funnel.unique_news << " unique";
        if (cmd.stages.label) {
            std::cout << ", " << result.labeled.size() << " labeled";
        }
        std::cout << '\n';
        for (const auto& f : files) {
            std::cout << "wrote " << (config.output_dir / f).string() << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "sentrade: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"News-sentiment research pipeline: filtering, labeling, scoring, evaluation, "
                 "panel regression and long-short backtesting."};
    app.require_subcommand(1);

    std::vector<PipelineCommand> commands;
    commands.reserve(7);
    auto add = [&](const char* name, const char* help, StageSelection stages) {
        PipelineCommand cmd;
        cmd.app = app.add_subcommand(name, help);
        cmd.stages = stages;
        commands.push_back(std::move(cmd));
        add_pipeline_options(commands.back());
    };
    add("filter", "single-stock and novelty filters; writes funnel.json", StageSelection::filter_only());
    add("label", "three-day excess-return labels; writes labels.csv", {true, false, false, false, false});
    add("score", "lexicon and external scores; writes scores.csv", {true, true, false, false, false});
    add("evaluate", "classification metrics; writes metrics.json", {true, true, true, false, false});
    add("regress", "two-way fixed-effects regressions; writes regression.json", {true, true, false, true, false});
    add("backtest", "sentiment portfolios; writes strategies.json and cumulative.csv",
        {true, true, false, false, true});
    add("run", "every stage", StageSelection::all());

    SyntheticSpec spec;
    std::string synth_out = "synthetic";
    std::string start_date;
    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    synth->add_option("-o,--out", synth_out, "output directory")->capture_default_str();
    synth->add_option("--firms", spec.n_firms)->capture_default_str();
    synth->add_option("--dates", spec.n_dates, "trading days")->capture_default_str();
    synth->add_option("--rate", spec.articles_per_day, "articles per trading day")->capture_default_str();
    synth->add_option("--gamma", spec.gamma, "planted next-day effect (percent per unit score)")->capture_default_str();
    synth->add_option("--sigma", spec.sigma, "noise (percent)")->capture_default_str();
    synth->add_option("--duplicate-rate", spec.duplicate_rate)->capture_default_str();
    synth->add_option("--multi-ticker-rate", spec.multi_ticker_rate)->capture_default_str();
    synth->add_option("--seed", spec.seed)->capture_default_str();
    synth->add_option("--model-name", spec.model_name)->capture_default_str();
    synth->add_option("--start", start_date, "first calendar date (YYYY-MM-DD)");

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        try {
            if (!start_date.empty()) {
                spec.start = parse_date(start_date);
            }
            const auto data = generate_synthetic(spec);
            write_synthetic(data, spec, synth_out);
            std::cout << "wrote " << data.news.size() << " articles, " << data.bars.size() << " bars to " << synth_out
                      << '\n';
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "sentrade: synth: " << e.what() << '\n';
            return 1;
        }
    }
    for (const auto& cmd : commands) {
        if (cmd.app->parsed()) {
            return run_command(cmd);
        }
    }
    return 1;
}
