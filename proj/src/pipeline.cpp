#include "sentrade/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "sentrade/report.hpp"

namespace sentrade {

namespace {

template <class F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what(), exit_code_for(e));
    }
}

std::vector<std::vector<std::string>> automatic_regressions(const std::vector<std::string>& models) {
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            out.push_back({models[i], models[j]});
        }
    }
    for (const auto& m : models) {
        out.push_back({m});
    }
    return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (const auto* s = dynamic_cast<const StageError*>(&e)) {
        return s->exit_code();
    }
    if (dynamic_cast<const NumericalError*>(&e) != nullptr) {
        return 2;
    }
    return 1;
}

PipelineResult run_pipeline(const RunConfig& config, const StageSelection& stages) {
    in_stage("config", [&] { validate(config); });
    PipelineResult result;

    in_stage("filter", [&] {
        auto all = load_news_jsonl(config.news);
        auto single = single_stock_filter(all);
        sort_chronologically(single.kept);
        NoveltyOptions nopt;
        nopt.window = config.novelty_window;
        nopt.unit = config.novelty_unit;
        nopt.scope = config.novelty_scope;
        nopt.threshold = config.similarity_threshold;
        const auto part = novelty_filter(single.kept, nopt);
        result.funnel = single.funnel;
        result.funnel.unique_news = part.kept.size();
        result.novelty_excluded = part.excluded.size();
        for (auto i : part.kept) {
            result.unique_articles.push_back(std::move(single.kept[i]));
        }
    });
    if (!stages.label) {
        return result;
    }

    std::optional<MarketData> market;
    in_stage("label", [&] {
        market.emplace(load_bars_csv(config.bars));
        auto mret = market_return_series(*market);
        if (!config.market.empty()) {
            for (const auto& [d, r] : load_market_csv(config.market)) {
                mret[d] = r;
            }
        }
        LabelingOptions lopt;
        lopt.horizon = config.label_horizon;
        lopt.aggregation = config.aggregation;
        lopt.zone = config.exchange_zone;
        auto labels = label_articles(result.unique_articles, *market, mret, lopt);
        result.labeled = std::move(labels.examples);
        result.missing_returns = labels.missing_returns;
    });
    if (!stages.score) {
        return result;
    }

    in_stage("score", [&] {
        std::unordered_set<std::string> labeled_ids;
        for (const auto& e : result.labeled) {
            labeled_ids.insert(e.article_id);
        }
        if (config.lexicon_scoring) {
            const auto lex = load_lexicon(config.lexicon);
            for (const auto& a : result.unique_articles) {
                if (labeled_ids.count(a.article_id) != 0) {
                    result.scores.add(ScoreRecord{a.article_id, "lexicon", lexicon_score(tokenize(a.text), lex)});
                }
            }
        }
        if (!config.scores.empty()) {
            auto ext = ingest_external_scores(config.scores, &labeled_ids);
            result.unknown_score_ids = std::move(ext.unknown_ids);
            for (const auto& r : ext.records) {
                if (labeled_ids.count(r.article_id) != 0) {
                    result.scores.add(r);
                }
            }
        }
    });
    const auto models = result.scores.models();

    if (stages.evaluate) {
        in_stage("evaluate", [&] {
            std::vector<std::string> ids;
            std::map<std::string, int> label_of;
            for (const auto& e : result.labeled) {
                ids.push_back(e.article_id);
                label_of[e.article_id] = e.label;
            }
            SplitOptions sopt;
            sopt.test_fraction = config.test_fraction;
            sopt.validation_fraction = config.validation_fraction;
            sopt.mode = config.split_mode;
            result.split = split_dataset(ids, config.seed, sopt);
            for (const auto& model : models) {
                std::vector<int> preds;
                std::vector<int> labels;
                for (const auto& id : result.split->test_ids) {
                    if (auto s = result.scores.find(id, model)) {
                        preds.push_back(classify_score(*s, config.classification_threshold));
                        labels.push_back(label_of.at(id));
                    }
                }
                ModelMetrics mm;
                mm.model = model;
                mm.confusion = confusion(preds, labels);
                if (mm.confusion.total() > 0) {
                    mm.metrics = metric_suite(mm.confusion);
                }
                result.metrics.push_back(std::move(mm));
            }
        });
    }

    if (stages.regress) {
        in_stage("regress", [&] {
            const auto specs = config.regressions.empty() ? automatic_regressions(models) : config.regressions;
            const std::set<std::string> known(models.begin(), models.end());
            DemeanOptions dopt;
            ClusterOptions copt;
            copt.mode = config.cluster_mode;
            copt.small_sample = config.cluster_small_sample;
            for (const auto& spec : specs) {
                for (const auto& m : spec) {
                    if (known.count(m) == 0) {
                        throw ConfigError("regression references unknown model '" + m + "'");
                    }
                }
                const Panel panel = assemble_panel(result.labeled, result.scores, *market, spec);
                RegressionOutcome o;
                o.models = spec;
                o.n_firms = panel.n_firms;
                o.n_dates = panel.n_dates;
                o.dropped_no_next_day = panel.dropped_no_next_day;
                o.dropped_missing_score = panel.dropped_missing_score;
                o.regression = run_regression(panel, {}, dopt, copt);
                result.regressions.push_back(std::move(o));
            }
        });
    }

    if (stages.backtest) {
        in_stage("backtest", [&] {
            BacktestOptions bopt;
            bopt.fraction = config.quantile_fraction;
            bopt.cost_bps = config.cost_bps;
            bopt.convention = config.cost_convention;
            bopt.start = config.start_date;
            bopt.end = config.end_date;
            for (const auto& model : models) {
                std::vector<Signal> signals;
                for (const auto& e : result.labeled) {
                    if (auto s = result.scores.find(e.article_id, model)) {
                        signals.push_back({e.ticker, e.timestamp, *s});
                    }
                }
                const auto pf = portfolio_series(signals, *market, bopt, model);
                ModelStrategies ms;
                ms.model = model;
                ms.long_report = summarize(pf.long_series, config.annualization, config.risk_free);
                ms.short_report = summarize(pf.short_series, config.annualization, config.risk_free);
                ms.short_pnl_report = summarize(pf.short_pnl_series, config.annualization, config.risk_free);
                ms.long_short_report = summarize(pf.long_short_series, config.annualization, config.risk_free);
                ms.skipped_legs = pf.skipped_legs;
                ms.dropped_caps = pf.dropped_caps;
                result.strategies.push_back(std::move(ms));
            }
            auto [vw, ew] = benchmark_series(*market, config.start_date, config.end_date);
            result.benchmark_vw = summarize(vw, config.annualization, config.risk_free);
            result.benchmark_ew = summarize(ew, config.annualization, config.risk_free);
        });
    }
    return result;
}

std::vector<std::string> emit_report(const PipelineResult& result, const RunConfig& config,
                                     const StageSelection& stages, const std::filesystem::path& output_dir) {
    return in_stage("report", [&] {
        std::error_code ec;
        std::filesystem::create_directories(output_dir, ec);
        if (ec) {
            throw InputError("cannot create output directory " + output_dir.string() + ": " + ec.message());
        }
        std::vector<std::string> written;
        auto put = [&](const std::string& name, const std::string& content) {
            write_file(output_dir / name, content);
            written.push_back(name);
        };
        put("funnel.json", funnel_json(result, config).dump(2) + "\n");
        if (stages.label) {
            put("labels.csv", labels_csv(result.labeled));
        }
        if (stages.score) {
            std::ostringstream s;
            write_score_csv(s, result.scores);
            put("scores.csv", s.str());
        }
        if (stages.score && stages.evaluate) {
            put("metrics.json", metrics_json(result, config).dump(2) + "\n");
        }
        if (stages.score && stages.regress) {
            put("regression.json", regression_json(result, config).dump(2) + "\n");
        }
        if (stages.score && stages.backtest) {
            put("strategies.json", strategies_json(result, config).dump(2) + "\n");
            put("cumulative.csv", cumulative_csv(result));
        }

        ojson manifest;
        manifest["config"] = to_json(config);
        manifest["seed"] = config.seed;
        ojson inputs = ojson::array();
        auto add_input = [&](const char* role, const std::filesystem::path& p, bool used) {
            if (used && !p.empty()) {
                inputs.push_back({{"role", role}, {"path", p.generic_string()}, {"sha256", sha256_file(p)}});
            }
        };
        add_input("news", config.news, true);
        add_input("bars", config.bars, stages.label);
        add_input("market", config.market, stages.label);
        add_input("lexicon", config.lexicon, stages.score && config.lexicon_scoring);
        add_input("scores", config.scores, stages.score);
        manifest["inputs"] = std::move(inputs);
        manifest["unknown_score_ids"] = result.unknown_score_ids.size();
        manifest["outputs"] = written;
        put("manifest.json", manifest.dump(2) + "\n");
        return written;
    });
}

}  // namespace sentrade
