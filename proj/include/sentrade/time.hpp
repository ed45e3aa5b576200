#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sentrade {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws FormatError.
Date parse_date(std::string_view text);
std::string format_date(Date d);
bool is_weekday(Date d);

/// An instant together with the exchange-local UTC offset it was observed in.
struct Timestamp {
    std::chrono::sys_seconds utc{};
    std::chrono::minutes offset{0};

    std::chrono::sys_seconds local() const { return utc + offset; }
    Date local_date() const;
    std::chrono::seconds local_time_of_day() const;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Parses ISO-8601 date-times of the form YYYY-MM-DDTHH:MM[:SS[.fff]] followed by
/// "Z" or a numeric offset. A missing offset is rejected.
Timestamp parse_timestamp(std::string_view text);

/// Formats as YYYY-MM-DDTHH:MM:SS±HH:MM in the timestamp's own offset.
std::string format_timestamp(const Timestamp& ts);

enum class ExchangeZone {
    AsWritten,  // the offset carried by the timestamp is the exchange offset
    UsEastern,  // convert to New York time (post-2007 DST rules)
};

ExchangeZone parse_exchange_zone(std::string_view name);
std::string_view to_string(ExchangeZone zone);

Timestamp to_exchange_local(const Timestamp& ts, ExchangeZone zone);

}  // namespace sentrade
