#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentrade {

/// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Line-oriented CSV reader with a mandatory header row.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);

    const std::vector<std::string>& header() const { return header_; }

    /// Case-insensitive header lookup.
    std::optional<std::size_t> column(std::string_view name) const;
    std::size_t require_column(std::string_view name) const;

    /// Reads the next non-blank record. Returns false at end of file.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number of the most recently read record.
    std::size_t line_number() const { return line_no_; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::size_t line_no_ = 0;
};

/// Strict full-string numeric parse; throws FormatError naming `context`.
double parse_number(std::string_view text, std::string_view context);
long long parse_integer(std::string_view text, std::string_view context);

/// Shortest representation that round-trips.
std::string format_number(double value);

std::string to_lower(std::string_view text);
std::string to_upper_ascii(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace sentrade
