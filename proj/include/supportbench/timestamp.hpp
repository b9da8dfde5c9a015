#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace supportbench {

using Timestamp = std::chrono::sys_seconds;

// Parses the Twitter API form, e.g. "Tue Oct 31 22:10:47 +0000 2017".
// The weekday is checked for shape only; the UTC offset is applied.
std::optional<Timestamp> parse_twitter_time(std::string_view text);

// "2017-10-31T22:10:47Z"
std::string format_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text);

} // namespace supportbench
