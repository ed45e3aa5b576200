#include "sentrade/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "sentrade/csv.hpp"
#include "sentrade/errors.hpp"

namespace sentrade {

SentimentLexicon load_lexicon(const std::filesystem::path& path) {
    CsvReader reader(path);
    const auto c_word = reader.require_column("word");
    const auto c_pos = reader.require_column("positive");
    const auto c_neg = reader.require_column("negative");

    SentimentLexicon lex;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const std::string where = path.string() + ":" + std::to_string(reader.line_number());
        const std::string word = to_lower(trim(f[c_word]));
        if (word.empty()) {
            throw FormatError(where + ": empty word");
        }
        const bool pos = parse_number(f[c_pos], where) > 0.0;
        const bool neg = parse_number(f[c_neg], where) > 0.0;
        if (pos) {
            lex.positive_terms.insert(word);
        }
        if (neg) {
            lex.negative_terms.insert(word);
        }
        if (lex.positive_terms.count(word) != 0 && lex.negative_terms.count(word) != 0) {
            throw ConflictError(where + ": '" + word + "' is both positive and negative");
        }
    }
    return lex;
}

double lexicon_score(std::span<const std::string> tokens, const SentimentLexicon& lexicon) {
    std::size_t p = 0;
    std::size_t n = 0;
    for (const auto& t : tokens) {
        if (lexicon.positive_terms.count(t) != 0) {
            ++p;
        } else if (lexicon.negative_terms.count(t) != 0) {
            ++n;
        }
    }
    if (p + n == 0) {
        return 0.5;
    }
    return static_cast<double>(p) / static_cast<double>(p + n);
}

ExternalScores ingest_external_scores(const std::filesystem::path& path,
                                      const std::unordered_set<std::string>* known_ids) {
    CsvReader reader(path);
    const auto c_id = reader.require_column("article_id");
    const auto c_model = reader.require_column("model_name");
    const auto c_score = reader.require_column("score");

    ExternalScores out;
    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::string> unknown;
    std::vector<std::string> f;
    std::size_t row = 0;
    while (reader.next(f)) {
        ++row;
        const std::string where = path.string() + ":" + std::to_string(reader.line_number());
        ScoreRecord r{std::string(trim(f[c_id])), std::string(trim(f[c_model])), 0.0};
        if (r.article_id.empty() || r.model_name.empty()) {
            throw FormatError(where + ": empty article_id or model_name");
        }
        r.score = parse_number(f[c_score], where);
        if (!(r.score >= 0.0 && r.score <= 1.0)) {
            throw RangeError(where + " (row " + std::to_string(row) + "): score " + std::string(trim(f[c_score])) +
                             " outside [0, 1]");
        }
        if (!seen.emplace(r.article_id, r.model_name).second) {
            throw DuplicateError(where + " (row " + std::to_string(row) + "): duplicate score for (" + r.article_id +
                                 ", " + r.model_name + ")");
        }
        if (known_ids != nullptr && known_ids->count(r.article_id) == 0) {
            unknown.insert(r.article_id);
        }
        out.records.push_back(std::move(r));
    }
    out.unknown_ids.assign(unknown.begin(), unknown.end());
    return out;
}

void ScoreTable::add(const ScoreRecord& record) {
    if (!(record.score >= 0.0 && record.score <= 1.0)) {
        throw RangeError("score for (" + record.article_id + ", " + record.model_name + ") outside [0, 1]");
    }
    if (!scores_.emplace(std::make_pair(record.article_id, record.model_name), record.score).second) {
        throw DuplicateError("duplicate score for (" + record.article_id + ", " + record.model_name + ")");
    }
}

void ScoreTable::add(std::span<const ScoreRecord> records) {
    for (const auto& r : records) {
        add(r);
    }
}

std::optional<double> ScoreTable::find(const std::string& article_id, const std::string& model_name) const {
    auto it = scores_.find({article_id, model_name});
    if (it == scores_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> ScoreTable::models() const {
    std::set<std::string> names;
    for (const auto& [key, _] : scores_) {
        names.insert(key.second);
    }
    return {names.begin(), names.end()};
}

std::vector<ScoreRecord> ScoreTable::records() const {
    std::vector<ScoreRecord> out;
    out.reserve(scores_.size());
    for (const auto& [key, score] : scores_) {
        out.push_back({key.first, key.second, score});
    }
    return out;
}

void write_score_csv(std::ostream& out, const ScoreTable& table) {
    out << "article_id,model_name,score\n";
    for (const auto& r : table.records()) {
        out << r.article_id << ',' << r.model_name << ',' << format_number(r.score) << '\n';
    }
}

}  // namespace sentrade
