#include "supportbench/timestamp.hpp"

#include <array>
#include <charconv>

#include <fmt/format.h>

namespace supportbench {

namespace {

template <typename T>
bool parse_int(std::string_view s, T& out)
{
    if (s.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<Timestamp> make_time(int y, unsigned mon, unsigned d, int hh, int mm, int ss)
{
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{mon}, day{d}};
    if (!ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) {
        return std::nullopt;
    }
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

bool parse_clock(std::string_view s, int& hh, int& mm, int& ss)
{
    return s.size() == 8 && s[2] == ':' && s[5] == ':' && parse_int(s.substr(0, 2), hh)
           && parse_int(s.substr(3, 2), mm) && parse_int(s.substr(6, 2), ss);
}

} // namespace

std::optional<Timestamp> parse_twitter_time(std::string_view text)
{
    static constexpr std::array<std::string_view, 12> months = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

    std::array<std::string_view, 6> parts{};
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') {
            ++pos;
        }
        if (pos == text.size()) {
            break;
        }
        auto end = text.find(' ', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        if (n == parts.size()) {
            return std::nullopt;
        }
        parts[n++] = text.substr(pos, end - pos);
        pos = end;
    }
    if (n != parts.size() || parts[0].size() != 3) {
        return std::nullopt;
    }

    unsigned mon = 0;
    for (unsigned i = 0; i < months.size(); ++i) {
        if (parts[1] == months[i]) {
            mon = i + 1;
        }
    }
    unsigned d = 0;
    int y = 0;
    int hh = 0;
    int mm = 0;
    int ss = 0;
    if (mon == 0 || !parse_int(parts[2], d) || !parse_clock(parts[3], hh, mm, ss)
        || !parse_int(parts[5], y)) {
        return std::nullopt;
    }

    // UTC offset "+hhmm" / "-hhmm"
    auto offset = parts[4];
    int off_h = 0;
    int off_m = 0;
    if (offset.size() != 5 || (offset[0] != '+' && offset[0] != '-')
        || !parse_int(offset.substr(1, 2), off_h) || !parse_int(offset.substr(3, 2), off_m)) {
        return std::nullopt;
    }
    auto t = make_time(y, mon, d, hh, mm, ss);
    if (!t) {
        return std::nullopt;
    }
    auto shift = std::chrono::hours{off_h} + std::chrono::minutes{off_m};
    return offset[0] == '+' ? *t - shift : *t + shift;
}

std::string format_iso8601(Timestamp t)
{
    using namespace std::chrono;
    auto day_start = floor<days>(t);
    year_month_day ymd{day_start};
    hh_mm_ss hms{t - day_start};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z",
                       static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

std::optional<Timestamp> parse_iso8601(std::string_view text)
{
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T'
        || text[19] != 'Z') {
        return std::nullopt;
    }
    int y = 0;
    unsigned mon = 0;
    unsigned d = 0;
    int hh = 0;
    int mm = 0;
    int ss = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mon)
        || !parse_int(text.substr(8, 2), d) || !parse_clock(text.substr(11, 8), hh, mm, ss)) {
        return std::nullopt;
    }
    return make_time(y, mon, d, hh, mm, ss);
}

} // namespace supportbench
