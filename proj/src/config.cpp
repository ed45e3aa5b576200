#include "sentrade/config.hpp"

#include <fstream>
#include <set>
#include <string>
#include <utility>

#include "sentrade/csv.hpp"
#include "sentrade/errors.hpp"

namespace sentrade {

namespace {

double to_double(std::string_view key, std::string_view value) {
    try {
        return parse_number(value, key);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
}

long long to_int(std::string_view key, std::string_view value) {
    try {
        return parse_integer(value, key);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
}

bool to_bool(std::string_view key, std::string_view value) {
    const std::string v = to_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(value) + "'");
}

std::optional<Date> to_date(std::string_view key, std::string_view value) {
    if (value.empty()) {
        return std::nullopt;
    }
    try {
        return parse_date(value);
    } catch (const FormatError& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

// "opt+bert, bert+finbert, opt" -> {{opt, bert}, {bert, finbert}, {opt}}
std::vector<std::vector<std::string>> parse_regressions(std::string_view value) {
    std::vector<std::vector<std::string>> out;
    for (const auto& spec : split_csv_line(value)) {
        std::vector<std::string> models;
        std::string_view rest = trim(spec);
        if (rest.empty()) {
            continue;
        }
        while (true) {
            const auto plus = rest.find('+');
            const auto name = trim(rest.substr(0, plus));
            if (name.empty()) {
                throw ConfigError("regressions: empty model name in '" + std::string(spec) + "'");
            }
            models.emplace_back(name);
            if (plus == std::string_view::npos) {
                break;
            }
            rest = rest.substr(plus + 1);
        }
        out.push_back(std::move(models));
    }
    return out;
}

std::string regressions_to_string(const std::vector<std::vector<std::string>>& regs) {
    std::string out;
    for (std::size_t i = 0; i < regs.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        for (std::size_t j = 0; j < regs[i].size(); ++j) {
            if (j > 0) {
                out += "+";
            }
            out += regs[i][j];
        }
    }
    return out;
}

std::string_view cluster_name(ClusterMode m) {
    switch (m) {
        case ClusterMode::TwoWay:
            return "two_way";
        case ClusterMode::Firm:
            return "firm";
        case ClusterMode::Date:
            return "date";
        case ClusterMode::Robust:
            return "robust";
    }
    return "?";
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys = {
        "news",           "bars",
        "market",         "lexicon",
        "scores",         "output_dir",
        "novelty_window", "novelty_unit",
        "novelty_scope",  "similarity_threshold",
        "exchange_tz",    "label_horizon",
        "aggregation",    "lexicon_scoring",
        "test_fraction",  "validation_fraction",
        "split_mode",     "seed",
        "classification_threshold", "regressions",
        "cluster",        "cluster_small_sample",
        "quantile_fraction", "cost_bps",
        "cost_convention", "start_date",
        "end_date",       "annualization",
        "risk_free",
    };
    return keys;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    const std::string k(key);
    if (k == "news") {
        c.news = std::string(value);
    } else if (k == "bars") {
        c.bars = std::string(value);
    } else if (k == "market") {
        c.market = std::string(value);
    } else if (k == "lexicon") {
        c.lexicon = std::string(value);
    } else if (k == "scores") {
        c.scores = std::string(value);
    } else if (k == "output_dir") {
        c.output_dir = std::string(value);
    } else if (k == "novelty_window") {
        c.novelty_window = static_cast<int>(to_int(key, value));
    } else if (k == "novelty_unit") {
        if (value == "calendar") {
            c.novelty_unit = WindowUnit::CalendarDays;
        } else if (value == "business") {
            c.novelty_unit = WindowUnit::BusinessDays;
        } else {
            throw ConfigError("novelty_unit: expected calendar|business");
        }
    } else if (k == "novelty_scope") {
        if (value == "ticker") {
            c.novelty_scope = NoveltyScope::SameTicker;
        } else if (value == "corpus") {
            c.novelty_scope = NoveltyScope::Corpus;
        } else {
            throw ConfigError("novelty_scope: expected ticker|corpus");
        }
    } else if (k == "similarity_threshold") {
        c.similarity_threshold = to_double(key, value);
    } else if (k == "exchange_tz") {
        c.exchange_zone = parse_exchange_zone(value);
    } else if (k == "label_horizon") {
        c.label_horizon = static_cast<int>(to_int(key, value));
    } else if (k == "aggregation") {
        if (value == "sum") {
            c.aggregation = Aggregation::Sum;
        } else if (value == "compound") {
            c.aggregation = Aggregation::Compound;
        } else {
            throw ConfigError("aggregation: expected sum|compound");
        }
    } else if (k == "lexicon_scoring") {
        c.lexicon_scoring = to_bool(key, value);
    } else if (k == "test_fraction") {
        c.test_fraction = to_double(key, value);
    } else if (k == "validation_fraction") {
        c.validation_fraction = to_double(key, value);
    } else if (k == "split_mode") {
        if (value == "random") {
            c.split_mode = SplitMode::Random;
        } else if (value == "chronological") {
            c.split_mode = SplitMode::Chronological;
        } else {
            throw ConfigError("split_mode: expected random|chronological");
        }
    } else if (k == "seed") {
        const auto s = to_int(key, value);
        if (s < 0) {
            throw ConfigError("seed must be nonnegative");
        }
        c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "classification_threshold") {
        c.classification_threshold = to_double(key, value);
    } else if (k == "regressions") {
        c.regressions = parse_regressions(value);
    } else if (k == "cluster") {
        if (value == "two_way") {
            c.cluster_mode = ClusterMode::TwoWay;
        } else if (value == "firm") {
            c.cluster_mode = ClusterMode::Firm;
        } else if (value == "date") {
            c.cluster_mode = ClusterMode::Date;
        } else if (value == "robust") {
            c.cluster_mode = ClusterMode::Robust;
        } else {
            throw ConfigError("cluster: expected two_way|firm|date|robust");
        }
    } else if (k == "cluster_small_sample") {
        c.cluster_small_sample = to_bool(key, value);
    } else if (k == "quantile_fraction") {
        c.quantile_fraction = to_double(key, value);
    } else if (k == "cost_bps") {
        c.cost_bps = to_double(key, value);
    } else if (k == "cost_convention") {
        c.cost_convention = parse_cost_convention(value);
    } else if (k == "start_date") {
        c.start_date = to_date(key, value);
    } else if (k == "end_date") {
        c.end_date = to_date(key, value);
    } else if (k == "annualization") {
        c.annualization = to_double(key, value);
    } else if (k == "risk_free") {
        c.risk_free = to_double(key, value);
    } else {
        throw ConfigError("unknown config key '" + k + "'");
    }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    const auto base = path.parent_path();
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string_view body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(body.substr(0, eq)));
        const std::string_view value = trim(body.substr(eq + 1));
        try {
            apply_setting(config, key, value);
            seen.insert(key);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    const std::pair<const char*, std::filesystem::path*> paths[] = {
        {"news", &config.news},       {"bars", &config.bars},     {"market", &config.market},
        {"lexicon", &config.lexicon}, {"scores", &config.scores}, {"output_dir", &config.output_dir}};
    for (const auto& [key, p] : paths) {
        if (seen.count(key) && !p->empty() && p->is_relative()) {
            *p = base / *p;
        }
    }
}

void validate(const RunConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(c.similarity_threshold > 0.0 && c.similarity_threshold <= 1.0)) {
        fail("similarity_threshold must lie in (0, 1]");
    }
    if (c.novelty_window < 0) {
        fail("novelty_window must be nonnegative");
    }
    if (c.label_horizon < 1) {
        fail("label_horizon must be at least 1");
    }
    if (!(c.quantile_fraction > 0.0 && c.quantile_fraction <= 0.5)) {
        fail("quantile_fraction must lie in (0, 0.5]");
    }
    if (!(c.cost_bps >= 0.0)) {
        fail("cost_bps must be nonnegative");
    }
    if (!(c.test_fraction >= 0.0 && c.test_fraction < 1.0) ||
        !(c.validation_fraction >= 0.0 && c.validation_fraction < 1.0)) {
        fail("split fractions must lie in [0, 1)");
    }
    if (!(c.classification_threshold >= 0.0 && c.classification_threshold <= 1.0)) {
        fail("classification_threshold must lie in [0, 1]");
    }
    if (!(c.annualization > 0.0)) {
        fail("annualization must be positive");
    }
    if (c.start_date && c.end_date && *c.end_date < *c.start_date) {
        fail("end_date precedes start_date");
    }
    if (c.news.empty()) {
        fail("news path is required");
    }
    if (c.bars.empty()) {
        fail("bars path is required");
    }
    if (c.lexicon_scoring && c.lexicon.empty()) {
        fail("lexicon scoring is enabled but no lexicon path is set");
    }
    if (!c.lexicon_scoring && c.scores.empty()) {
        fail("no score source: enable lexicon_scoring or set scores");
    }
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["news"] = c.news.generic_string();
    j["bars"] = c.bars.generic_string();
    j["market"] = c.market.generic_string();
    j["lexicon"] = c.lexicon.generic_string();
    j["scores"] = c.scores.generic_string();
    j["novelty_window"] = c.novelty_window;
    j["novelty_unit"] = c.novelty_unit == WindowUnit::CalendarDays ? "calendar" : "business";
    j["novelty_scope"] = c.novelty_scope == NoveltyScope::SameTicker ? "ticker" : "corpus";
    j["similarity_threshold"] = c.similarity_threshold;
    j["exchange_tz"] = to_string(c.exchange_zone);
    j["label_horizon"] = c.label_horizon;
    j["aggregation"] = c.aggregation == Aggregation::Sum ? "sum" : "compound";
    j["lexicon_scoring"] = c.lexicon_scoring;
    j["test_fraction"] = c.test_fraction;
    j["validation_fraction"] = c.validation_fraction;
    j["split_mode"] = c.split_mode == SplitMode::Random ? "random" : "chronological";
    j["seed"] = c.seed;
    j["classification_threshold"] = c.classification_threshold;
    j["regressions"] = regressions_to_string(c.regressions);
    j["cluster"] = cluster_name(c.cluster_mode);
    j["cluster_small_sample"] = c.cluster_small_sample;
    j["quantile_fraction"] = c.quantile_fraction;
    j["cost_bps"] = c.cost_bps;
    j["cost_convention"] = to_string(c.cost_convention);
    j["start_date"] = c.start_date ? format_date(*c.start_date) : "";
    j["end_date"] = c.end_date ? format_date(*c.end_date) : "";
    j["annualization"] = c.annualization;
    j["risk_free"] = c.risk_free;
    return j;
}

}  // namespace sentrade
