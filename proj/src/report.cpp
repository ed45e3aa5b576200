#include "sentrade/report.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "sentrade/config.hpp"
#include "sentrade/csv.hpp"
#include "sentrade/errors.hpp"
#include "sentrade/pipeline.hpp"

namespace sentrade {

namespace {

ojson opt(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) {
        return nullptr;
    }
    return *v;
}

ojson num(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string() + " for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw InputError("failed writing " + path.string());
    }
}

ojson funnel_json(const PipelineResult& r, const RunConfig& c) {
    ojson j;
    j["all_news"] = r.funnel.all_news;
    j["single_stock_news"] = r.funnel.single_stock_news;
    j["unique_news"] = r.funnel.unique_news;
    j["novelty_excluded"] = r.novelty_excluded;
    j["labeled_news"] = r.labeled.size();
    j["missing_returns"] = r.missing_returns;
    j["novelty_filter"] = {
        {"window", c.novelty_window},
        {"unit", c.novelty_unit == WindowUnit::CalendarDays ? "calendar_days" : "business_days"},
        {"threshold", c.similarity_threshold},
        {"comparison", ">="},
        {"scope", c.novelty_scope == NoveltyScope::SameTicker ? "ticker" : "corpus"},
    };
    return j;
}

ojson metrics_json(const PipelineResult& r, const RunConfig& c) {
    ojson j;
    j["threshold"] = c.classification_threshold;
    j["prediction_rule"] = "score > threshold";
    if (r.split) {
        j["split"] = {{"seed", r.split->seed},
                      {"train", r.split->train_ids.size()},
                      {"validation", r.split->validation_ids.size()},
                      {"test", r.split->test_ids.size()}};
    }
    ojson models = ojson::array();
    for (const auto& m : r.metrics) {
        ojson e;
        e["model"] = m.model;
        e["n"] = m.confusion.total();
        if (m.metrics) {
            e["accuracy"] = opt(m.metrics->accuracy);
            e["precision"] = opt(m.metrics->precision);
            e["recall"] = opt(m.metrics->recall);
            e["specificity"] = opt(m.metrics->specificity);
            e["f1"] = opt(m.metrics->f1);
        } else {
            for (const char* k : {"accuracy", "precision", "recall", "specificity", "f1"}) {
                e[k] = nullptr;
            }
        }
        e["confusion"] = {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}};
        models.push_back(std::move(e));
    }
    j["models"] = std::move(models);
    return j;
}

ojson regression_json(const PipelineResult& r, const RunConfig& c) {
    ojson j;
    j["response"] = "next_day_return_pct";
    j["cluster"] = to_json(c)["cluster"];
    j["cluster_small_sample"] = c.cluster_small_sample;
    ojson regs = ojson::array();
    int id = 1;
    for (const auto& o : r.regressions) {
        const auto& reg = o.regression;
        ojson e;
        e["regression"] = id++;
        ojson coefs = ojson::array();
        for (Eigen::Index k = 0; k < reg.fit.gamma.size(); ++k) {
            coefs.push_back({{"regressor", reg.fit.names[static_cast<std::size_t>(k)]},
                             {"coefficient", num(reg.fit.gamma(k))},
                             {"std_error", num(reg.se(k))},
                             {"t_stat", num(reg.t_stats(k))}});
        }
        e["coefficients"] = std::move(coefs);
        e["observations"] = reg.stats.observations;
        e["firms"] = o.n_firms;
        e["dates"] = o.n_dates;
        e["parameters"] = reg.stats.parameters;
        e["r2"] = num(reg.stats.r2);
        e["r2_adjusted"] = num(reg.stats.r2_adjusted);
        e["r2_within"] = num(reg.stats.r2_within);
        e["r2_within_adjusted"] = num(reg.stats.r2_within_adjusted);
        e["aic"] = num(reg.stats.aic);
        e["bic"] = num(reg.stats.bic);
        e["rmse"] = num(reg.stats.rmse);
        e["fe_date"] = true;
        e["fe_firm"] = true;
        e["dropped_no_next_day"] = o.dropped_no_next_day;
        e["dropped_missing_score"] = o.dropped_missing_score;
        e["demeaning_sweeps"] = reg.fit.sweeps;
        regs.push_back(std::move(e));
    }
    j["regressions"] = std::move(regs);
    return j;
}

ojson strategy_report_json(const StrategyReport& s) {
    ojson j;
    j["days"] = s.days;
    j["sharpe"] = opt(s.sharpe);
    j["mdr_pct"] = opt(s.mean_daily_return_pct);
    j["std_pct"] = opt(s.std_daily_pct);
    j["mdd_pct"] = num(s.max_drawdown_pct);
    j["final_value"] = s.cumulative_path.empty() ? 1.0 : s.cumulative_path.back().second;
    return j;
}

ojson strategies_json(const PipelineResult& r, const RunConfig& c) {
    ojson j;
    j["cost_bps"] = c.cost_bps;
    j["cost_convention"] = to_string(c.cost_convention);
    j["quantile_fraction"] = c.quantile_fraction;
    j["weighting"] = "value_prior_close_cap";
    j["annualization"] = c.annualization;
    j["risk_free"] = c.risk_free;
    j["drawdown"] = "peak_to_trough";
    j["short_view"] = "short: minus the P&L of the short positions, so L-S = L - S; short_pnl: P&L of the short positions";
    ojson list = ojson::array();
    for (const auto& m : r.strategies) {
        ojson e;
        e["model"] = m.model;
        e["long"] = strategy_report_json(m.long_report);
        e["short"] = strategy_report_json(m.short_report);
        e["short_pnl"] = strategy_report_json(m.short_pnl_report);
        e["long_short"] = strategy_report_json(m.long_short_report);
        e["skipped_legs"] = m.skipped_legs;
        e["dropped_caps"] = m.dropped_caps;
        list.push_back(std::move(e));
    }
    j["strategies"] = std::move(list);
    ojson bench = ojson::object();
    if (r.benchmark_vw) {
        bench["VW"] = strategy_report_json(*r.benchmark_vw);
    }
    if (r.benchmark_ew) {
        bench["EW"] = strategy_report_json(*r.benchmark_ew);
    }
    j["benchmarks"] = std::move(bench);
    return j;
}

std::string labels_csv(std::span<const LabeledExample> labeled) {
    std::ostringstream out;
    out << "article_id,ticker,event_date,excess_return,label\n";
    for (const auto& e : labeled) {
        out << e.article_id << ',' << e.ticker << ',' << format_date(e.event_date) << ','
            << format_number(e.aggregated_excess_return) << ',' << e.label << '\n';
    }
    return out.str();
}

std::string cumulative_csv(const PipelineResult& r) {
    std::ostringstream out;
    out << "date,strategy,value\n";
    auto emit = [&](const std::string& name, const StrategyReport& rep) {
        for (const auto& [d, v] : rep.cumulative_path) {
            out << format_date(d) << ',' << name << ',' << format_number(v) << '\n';
        }
    };
    for (const auto& m : r.strategies) {
        emit(m.model + "/L", m.long_report);
        emit(m.model + "/S", m.short_report);
        emit(m.model + "/L-S", m.long_short_report);
    }
    if (r.benchmark_vw) {
        emit("VW", *r.benchmark_vw);
    }
    if (r.benchmark_ew) {
        emit("EW", *r.benchmark_ew);
    }
    return out.str();
}

}  // namespace sentrade
