#include "sentrade/time.hpp"

#include <cctype>
#include <cstdio>

#include "sentrade/errors.hpp"

namespace sentrade {

using namespace std::chrono;

namespace {

int read_digits(std::string_view text, std::size_t pos, std::size_t count, std::string_view whole) {
    if (pos + count > text.size()) {
        throw FormatError("truncated date-time: '" + std::string(whole) + "'");
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw FormatError("bad digit in date-time: '" + std::string(whole) + "'");
        }
        value = value * 10 + (text[i] - '0');
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) {
        throw FormatError("malformed date-time: '" + std::string(whole) + "'");
    }
}

Date make_date(int y, int m, int d, std::string_view whole) {
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw FormatError("invalid calendar date: '" + std::string(whole) + "'");
    }
    return sys_days{ymd};
}

// n-th Sunday (1-based) of the given month.
sys_days nth_sunday(year y, month m, unsigned n) {
    return sys_days{year_month_weekday{y, m, weekday_indexed{Sunday, n}}};
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10) {
        throw FormatError("expected YYYY-MM-DD: '" + std::string(text) + "'");
    }
    const int y = read_digits(text, 0, 4, text);
    expect(text, 4, '-', text);
    const int m = read_digits(text, 5, 2, text);
    expect(text, 7, '-', text);
    const int d = read_digits(text, 8, 2, text);
    return make_date(y, m, d, text);
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool is_weekday(Date d) {
    const weekday w{d};
    return w != Saturday && w != Sunday;
}

Date Timestamp::local_date() const { return floor<days>(local()); }

seconds Timestamp::local_time_of_day() const { return local() - sys_seconds{local_date()}; }

Timestamp parse_timestamp(std::string_view text) {
    const std::string_view whole = text;
    if (text.size() < 16) {
        throw FormatError("expected ISO-8601 date-time: '" + std::string(whole) + "'");
    }
    const Date date = parse_date(text.substr(0, 10));
    if (text[10] != 'T' && text[10] != ' ') {
        throw FormatError("expected 'T' separator: '" + std::string(whole) + "'");
    }
    const int hh = read_digits(text, 11, 2, whole);
    expect(text, 13, ':', whole);
    const int mm = read_digits(text, 14, 2, whole);
    int ss = 0;
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        ss = read_digits(text, pos + 1, 2, whole);
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                ++pos;  // sub-second precision is dropped
            }
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) {
        throw FormatError("time of day out of range: '" + std::string(whole) + "'");
    }
    if (pos >= text.size()) {
        throw FormatError("timestamp lacks a UTC offset: '" + std::string(whole) + "'");
    }
    minutes offset{0};
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '-' ? -1 : 1;
        const int oh = read_digits(text, pos + 1, 2, whole);
        pos += 3;
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
        }
        const int om = read_digits(text, pos, 2, whole);
        pos += 2;
        if (oh > 18 || om > 59) {
            throw FormatError("UTC offset out of range: '" + std::string(whole) + "'");
        }
        offset = minutes{sign * (oh * 60 + om)};
    } else {
        throw FormatError("malformed UTC offset: '" + std::string(whole) + "'");
    }
    if (pos != text.size()) {
        throw FormatError("trailing characters in timestamp: '" + std::string(whole) + "'");
    }
    const sys_seconds local_wall = sys_seconds{date} + hours{hh} + minutes{mm} + seconds{ss};
    return Timestamp{local_wall - offset, offset};
}

std::string format_timestamp(const Timestamp& ts) {
    const auto local = ts.local();
    const Date d = floor<days>(local);
    const auto tod = hh_mm_ss<seconds>{local - sys_seconds{d}};
    const auto off = ts.offset.count();
    const long long abs_off = off < 0 ? -off : off;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02d%c%02lld:%02lld", format_date(d).c_str(),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), off < 0 ? '-' : '+', abs_off / 60,
                  abs_off % 60);
    return buf;
}

ExchangeZone parse_exchange_zone(std::string_view name) {
    if (name == "as_written") {
        return ExchangeZone::AsWritten;
    }
    if (name == "us_eastern") {
        return ExchangeZone::UsEastern;
    }
    throw ConfigError("unknown exchange zone '" + std::string(name) + "' (as_written|us_eastern)");
}

std::string_view to_string(ExchangeZone zone) {
    return zone == ExchangeZone::UsEastern ? "us_eastern" : "as_written";
}

Timestamp to_exchange_local(const Timestamp& ts, ExchangeZone zone) {
    if (zone == ExchangeZone::AsWritten) {
        return ts;
    }
    // DST runs from 02:00 EST on the second Sunday of March to 02:00 EDT on the
    // first Sunday of November.
    const year y = year_month_day{floor<days>(ts.utc)}.year();
    const sys_seconds dst_start = sys_seconds{nth_sunday(y, March, 2)} + hours{7};
    const sys_seconds dst_end = sys_seconds{nth_sunday(y, November, 1)} + hours{6};
    const bool dst = ts.utc >= dst_start && ts.utc < dst_end;
    return Timestamp{ts.utc, dst ? minutes{-240} : minutes{-300}};
}

}  // namespace sentrade
