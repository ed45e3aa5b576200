#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sentrade {

struct SentimentLexicon {
    std::unordered_set<std::string> positive_terms;
    std::unordered_set<std::string> negative_terms;
};

/// Master-dictionary style CSV: Word, Positive, Negative columns (extra columns
/// ignored). A nonzero positive number in a flag column means membership.
/// Throws FormatError on missing columns and ConflictError when a term is in both sets.
SentimentLexicon load_lexicon(const std::filesystem::path& path);

/// p / (p + n) over lexicon hits; 0.5 when there are none.
double lexicon_score(std::span<const std::string> tokens, const SentimentLexicon& lexicon);

struct ScoreRecord {
    std::string article_id;
    std::string model_name;
    double score = 0.0;
};

struct ExternalScores {
    std::vector<ScoreRecord> records;
    std::vector<std::string> unknown_ids;  // distinct, sorted
};

/// CSV article_id,model_name,score. Throws RangeError for scores outside [0, 1]
/// and DuplicateError for repeated (article_id, model_name). Ids missing from
/// `known_ids` (when given) are reported, not rejected.
ExternalScores ingest_external_scores(const std::filesystem::path& path,
                                      const std::unordered_set<std::string>* known_ids = nullptr);

/// Score lookup keyed by (article_id, model_name), iterated in canonical order.
class ScoreTable {
public:
    void add(const ScoreRecord& record);
    void add(std::span<const ScoreRecord> records);

    std::optional<double> find(const std::string& article_id, const std::string& model_name) const;
    std::vector<std::string> models() const;
    std::size_t size() const { return scores_.size(); }
    std::vector<ScoreRecord> records() const;

private:
    std::map<std::pair<std::string, std::string>, double> scores_;
};

void write_score_csv(std::ostream& out, const ScoreTable& table);

}  // namespace sentrade
