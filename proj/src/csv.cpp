#include "sentrade/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "sentrade/errors.hpp"

namespace sentrade {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

CsvReader::CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) {
        throw InputError("cannot open " + path.string());
    }
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!trim(line).empty()) {
            header_ = split_csv_line(line);
            for (auto& h : header_) {
                h = std::string(trim(h));
            }
            return;
        }
    }
    throw FormatError(path.string() + ": missing header row");
}

std::optional<std::size_t> CsvReader::column(std::string_view name) const {
    const std::string wanted = to_lower(name);
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (to_lower(header_[i]) == wanted) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t CsvReader::require_column(std::string_view name) const {
    if (auto idx = column(name)) {
        return *idx;
    }
    throw FormatError(path_.string() + ": missing column '" + std::string(name) + "'");
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty()) {
            continue;
        }
        fields = split_csv_line(line);
        if (fields.size() < header_.size()) {
            throw FormatError(path_.string() + ":" + std::to_string(line_no_) + ": expected " +
                              std::to_string(header_.size()) + " fields, got " +
                              std::to_string(fields.size()));
        }
        return true;
    }
    return false;
}

double parse_number(std::string_view text, std::string_view context) {
    text = trim(text);
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw FormatError(std::string(context) + ": not a number: '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text, std::string_view context) {
    text = trim(text);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError(std::string(context) + ": not an integer: '" + std::string(text) + "'");
    }
    return value;
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string to_upper_ascii(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    const auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = text.find_last_not_of(" \t\r\n");
    return text.substr(b, e - b + 1);
}

}  // namespace sentrade
