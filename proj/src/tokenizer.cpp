#include <algorithm>
#include <array>
#include <cstdint>

#include "supportbench/normalize.hpp"

namespace supportbench {

namespace {

// ---------------------------------------------------------------------------
// UTF-8 helpers

struct CodePoint {
    char32_t value = 0;
    std::size_t length = 1;
};

CodePoint decode(std::string_view s, std::size_t pos)
{
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        return {b0, 1};
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (pos + len > s.size()) {
        return {0xFFFD, 1};
    }
    for (std::size_t i = 1; i < len; ++i) {
        if ((byte(pos + i) & 0xC0) != 0x80) {
            return {0xFFFD, 1};
        }
        cp = (cp << 6) | (byte(pos + i) & 0x3F);
    }
    return {cp, len};
}

void encode(char32_t cp, std::string& out)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space(char32_t cp)
{
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f'
           || cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 || cp == 0x2029
           || cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

bool is_emoji(char32_t cp)
{
    return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF)
           || (cp >= 0x2B00 && cp <= 0x2BFF) || cp == 0x203C || cp == 0x2049 || cp == 0x2122
           || cp == 0x2139 || (cp >= 0x2190 && cp <= 0x21FF) || (cp >= 0x2300 && cp <= 0x23FF)
           || cp == 0x24C2 || (cp >= 0x25A0 && cp <= 0x25FF) || cp == 0x3030 || cp == 0x303D
           || cp == 0x3297 || cp == 0x3299;
}

// Code points that extend the preceding emoji into one glyph.
bool is_emoji_modifier(char32_t cp)
{
    return cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 || (cp >= 0x1F3FB && cp <= 0x1F3FF)
           || (cp >= 0xE0020 && cp <= 0xE007F);
}

constexpr char32_t zero_width_joiner = 0x200D;

bool is_unicode_punct(char32_t cp)
{
    return (cp >= 0x00A1 && cp <= 0x00BF && cp != 0x00AA && cp != 0x00B5 && cp != 0x00BA)
           || cp == 0x00D7 || cp == 0x00F7 || (cp >= 0x2010 && cp <= 0x205E)
           || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF01 && cp <= 0xFF0F);
}

bool is_ascii_alnum(char32_t cp)
{
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
}

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_word_char(char32_t cp)
{
    if (cp < 0x80) {
        return is_ascii_alnum(cp) || cp == '_';
    }
    return !is_space(cp) && !is_emoji(cp) && !is_emoji_modifier(cp) && !is_unicode_punct(cp)
           && cp != zero_width_joiner && cp != 0xFFFD;
}

char32_t to_lower(char32_t cp)
{
    if (cp >= 'A' && cp <= 'Z') {
        return cp + 32;
    }
    if (cp < 0x80) {
        return cp;
    }
    if ((cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7)) {
        return cp + 32;
    }
    if (cp >= 0x0100 && cp <= 0x017F && cp != 0x0130 && cp != 0x0131 && cp != 0x0138
        && cp != 0x0149 && cp != 0x017F) {
        // Latin Extended-A pairs: even/odd, except the 0x0139..0x0148 and
        // 0x0179..0x017E runs which are odd/even.
        bool odd_upper = (cp >= 0x0139 && cp <= 0x0148) || (cp >= 0x0179 && cp <= 0x017E);
        if (odd_upper ? (cp % 2 == 1) : (cp % 2 == 0)) {
            return cp + 1;
        }
        return cp;
    }
    if (cp >= 0x0391 && cp <= 0x03AB && cp != 0x03A2) {
        return cp + 32;
    }
    if (cp >= 0x0410 && cp <= 0x042F) {
        return cp + 32;
    }
    if (cp >= 0x0400 && cp <= 0x040F) {
        return cp + 80;
    }
    return cp;
}

std::string lowercase(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        auto cp = decode(s, i);
        encode(cp.value == 0xFFFD && cp.length == 1 ? static_cast<unsigned char>(s[i])
                                                    : to_lower(cp.value),
               out);
        i += cp.length;
    }
    return out;
}

bool iequals_prefix(std::string_view s, std::string_view prefix)
{
    if (s.size() < prefix.size()) {
        return false;
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        auto c = s[i];
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c + 32);
        }
        if (c != prefix[i]) {
            return false;
        }
    }
    return true;
}

// Code point ending right before pos (0 at the chunk start).
char32_t previous_code_point(std::string_view chunk, std::size_t pos)
{
    if (pos == 0) {
        return 0;
    }
    std::size_t start = pos - 1;
    while (start > 0 && (static_cast<unsigned char>(chunk[start]) & 0xC0) == 0x80) {
        --start;
    }
    return decode(chunk, start).value;
}

// ---------------------------------------------------------------------------
// Pre-tokenization cleanup

// Decodes the entities tweet exports carry and folds typographic apostrophes.
std::string clean(std::string_view raw)
{
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> entities = {{
        {"&amp;", "&"},
        {"&lt;", "<"},
        {"&gt;", ">"},
        {"&quot;", "\""},
        {"&#39;", "'"},
        {"&apos;", "'"},
        {"&nbsp;", " "},
    }};
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        if (raw[i] == '&') {
            bool replaced = false;
            for (auto [entity, text] : entities) {
                if (raw.substr(i, entity.size()) == entity) {
                    out += text;
                    i += entity.size();
                    replaced = true;
                    break;
                }
            }
            if (replaced) {
                continue;
            }
        }
        auto cp = decode(raw, i);
        if (cp.value == 0x2018 || cp.value == 0x2019 || cp.value == 0x02BC) {
            out.push_back('\'');
        } else {
            out.append(raw.substr(i, cp.length));
        }
        i += cp.length;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Recognizers working on a chunk (whitespace-free span) at a position.
// Each returns the matched byte length or 0.

constexpr std::string_view url_trailing_punct = ".,!?;:'\")]}>";

constexpr std::array<std::string_view, 16> bare_domain_tlds = {
    "com", "org", "net", "edu", "gov", "io", "co", "ly", "me", "uk", "de", "fr", "jp", "ca", "us",
    "info"};

std::size_t strip_url_tail(std::string_view chunk, std::size_t begin, std::size_t end)
{
    while (end > begin && url_trailing_punct.find(chunk[end - 1]) != std::string_view::npos) {
        --end;
    }
    return end - begin;
}

std::size_t match_scheme_url(std::string_view chunk, std::size_t pos)
{
    auto rest = chunk.substr(pos);
    std::size_t prefix = 0;
    if (iequals_prefix(rest, "https://")) {
        prefix = 8;
    } else if (iequals_prefix(rest, "http://")) {
        prefix = 7;
    } else if (iequals_prefix(rest, "www.")) {
        prefix = 4;
    } else {
        return 0;
    }
    auto len = strip_url_tail(chunk, pos, chunk.size());
    return len > prefix ? len : 0;
}

// "apple.com", "support.apple.com/kb/HT201"
std::size_t match_bare_domain(std::string_view chunk, std::size_t pos)
{
    std::size_t i = pos;
    std::size_t labels = 0;
    std::string_view last_label;
    while (true) {
        std::size_t start = i;
        while (i < chunk.size()
               && (is_ascii_alnum(static_cast<unsigned char>(chunk[i])) || chunk[i] == '-')) {
            ++i;
        }
        if (i == start) {
            return 0;
        }
        last_label = chunk.substr(start, i - start);
        ++labels;
        if (i + 1 < chunk.size() && chunk[i] == '.'
            && is_ascii_alnum(static_cast<unsigned char>(chunk[i + 1]))) {
            ++i;
            continue;
        }
        break;
    }
    if (labels < 2) {
        return 0;
    }
    auto tld = lowercase(last_label);
    if (std::find(bare_domain_tlds.begin(), bare_domain_tlds.end(), tld) == bare_domain_tlds.end()) {
        return 0;
    }
    if (i < chunk.size() && chunk[i] == '/') {
        return strip_url_tail(chunk, pos, chunk.size());
    }
    if (i < chunk.size() && is_word_char(decode(chunk, i).value)) {
        return 0;
    }
    return i - pos;
}

bool is_handle_char(char c)
{
    return is_ascii_alnum(static_cast<unsigned char>(c)) || c == '_';
}

std::size_t match_mention(std::string_view chunk, std::size_t pos)
{
    if (chunk[pos] != '@') {
        return 0;
    }
    std::size_t i = pos + 1;
    while (i < chunk.size() && is_handle_char(chunk[i])) {
        ++i;
    }
    return i > pos + 1 ? i - pos : 0;
}

std::size_t match_hashtag(std::string_view chunk, std::size_t pos)
{
    if (chunk[pos] != '#') {
        return 0;
    }
    std::size_t i = pos + 1;
    while (i < chunk.size()) {
        auto cp = decode(chunk, i);
        if (!is_word_char(cp.value)) {
            break;
        }
        i += cp.length;
    }
    return i > pos + 1 ? i - pos : 0;
}

std::size_t match_placeholder(std::string_view chunk, std::size_t pos)
{
    if (chunk[pos] != '<') {
        return 0;
    }
    for (auto special : special_tokens) {
        if (chunk.substr(pos, special.size()) == special) {
            return special.size();
        }
    }
    return 0;
}

std::size_t match_emoticon(std::string_view chunk, std::size_t pos)
{
    static constexpr std::array<std::string_view, 10> fixed = {
        "<3", "</3", "^_^", "^^", "-_-", "o_o", "O_O", ":'(", ":')", "T_T"};
    auto rest = chunk.substr(pos);
    auto bounded = [&](std::size_t len) {
        bool left_ok = !is_word_char(previous_code_point(chunk, pos));
        bool right_ok = pos + len == chunk.size() || !is_word_char(decode(chunk, pos + len).value);
        return left_ok && right_ok;
    };
    for (auto e : fixed) {
        if (rest.starts_with(e) && bounded(e.size())) {
            return e.size();
        }
    }

    // eyes [nose] mouth, e.g. :) ;-) =D :P :/
    constexpr std::string_view eyes = ":;=";
    constexpr std::string_view noses = "-o^'";
    constexpr std::string_view mouths = ")(][DPpOo/\\|*3$@";
    if (!rest.empty() && eyes.find(rest[0]) != std::string_view::npos) {
        std::size_t i = 1;
        if (i < rest.size() && noses.find(rest[i]) != std::string_view::npos && i + 1 < rest.size()
            && mouths.find(rest[i + 1]) != std::string_view::npos) {
            ++i;
        }
        if (i < rest.size() && mouths.find(rest[i]) != std::string_view::npos) {
            std::size_t len = i + 1;
            // repeated mouths ":)))" stay one emoticon
            while (len < rest.size() && rest[len] == rest[i]) {
                ++len;
            }
            // "://" belongs to a URL, ":/" followed by a word is punctuation
            if (rest[i] == '/' && len < rest.size()) {
                return 0;
            }
            if (bounded(len)) {
                return len;
            }
        }
    }
    // reversed: (: (-:
    constexpr std::string_view reverse_mouths = "()";
    if (!rest.empty() && reverse_mouths.find(rest[0]) != std::string_view::npos) {
        std::size_t i = 1;
        if (i < rest.size() && rest[i] == '-') {
            ++i;
        }
        if (i < rest.size() && (rest[i] == ':' || rest[i] == ';' || rest[i] == '=')
            && bounded(i + 1)) {
            return i + 1;
        }
    }
    return 0;
}

std::size_t match_emoji(std::string_view chunk, std::size_t pos)
{
    auto cp = decode(chunk, pos);
    bool keycap_base = (cp.value == '#' || cp.value == '*' || is_ascii_digit(cp.value))
                       && pos + cp.length < chunk.size();
    if (keycap_base) {
        // "1️⃣": digit + FE0F + combining keycap
        auto next = decode(chunk, pos + cp.length);
        if (next.value == 0xFE0F && pos + cp.length + next.length < chunk.size()
            && decode(chunk, pos + cp.length + next.length).value == 0x20E3) {
            return cp.length + next.length + 3;
        }
        return 0;
    }
    if (!is_emoji(cp.value)) {
        return 0;
    }
    std::size_t i = pos + cp.length;
    // Regional indicator pairs form a flag.
    if (cp.value >= 0x1F1E6 && cp.value <= 0x1F1FF && i < chunk.size()) {
        auto next = decode(chunk, i);
        if (next.value >= 0x1F1E6 && next.value <= 0x1F1FF) {
            i += next.length;
        }
    }
    while (i < chunk.size()) {
        auto next = decode(chunk, i);
        if (is_emoji_modifier(next.value)) {
            i += next.length;
        } else if (next.value == zero_width_joiner && i + next.length < chunk.size()
                   && is_emoji(decode(chunk, i + next.length).value)) {
            i += next.length;
            i += decode(chunk, i).length;
        } else {
            break;
        }
    }
    return i - pos;
}

// Apostrophe-initial elisions kept whole so the rewrite table can expand them.
constexpr std::array<std::string_view, 7> leading_elisions = {
    "'bout", "'til", "'cause", "'em", "'round", "'kay", "'tis"};

// Negations whose stem is not a word on its own ("ca", "wo").
constexpr std::array<std::string_view, 4> irregular_negations = {"can't", "won't", "shan't",
                                                                 "ain't"};

constexpr std::array<std::string_view, 6> clitics = {"'s", "'m", "'d", "'ll", "'re", "'ve"};

void emit_word(std::string_view word, TokenSequence& out)
{
    auto lower = lowercase(word);
    if (lower.find('\'') == std::string::npos
        || std::find(irregular_negations.begin(), irregular_negations.end(), lower)
               != irregular_negations.end()) {
        out.push_back(std::move(lower));
        return;
    }
    if (lower.size() > 3 && lower.ends_with("n't")) {
        out.push_back(lower.substr(0, lower.size() - 3));
        out.emplace_back("n't");
        return;
    }
    for (auto clitic : clitics) {
        if (lower.size() > clitic.size() && lower.ends_with(clitic)) {
            out.push_back(lower.substr(0, lower.size() - clitic.size()));
            out.emplace_back(clitic);
            return;
        }
    }
    out.push_back(std::move(lower));
}

// Length of a word starting at pos. Joins hyphenated parts, digit groups
// ("10.3.1", "1,000", "3:45") and internal apostrophes ("we're").
std::size_t scan_word(std::string_view chunk, std::size_t pos)
{
    std::size_t i = pos;
    char32_t prev = 0;
    while (i < chunk.size()) {
        auto cp = decode(chunk, i);
        if (is_word_char(cp.value)) {
            prev = cp.value;
            i += cp.length;
            continue;
        }
        if (i == pos || i + 1 >= chunk.size()) {
            break;
        }
        char c = chunk[i];
        auto next = decode(chunk, i + 1).value;
        bool joins = false;
        if (c == '-' || c == '\'') {
            joins = is_word_char(prev) && prev != '_' && is_word_char(next) && next != '_';
        } else if (c == '.' || c == ',' || c == ':') {
            joins = is_ascii_digit(prev) && is_ascii_digit(next);
        }
        if (!joins) {
            break;
        }
        prev = static_cast<unsigned char>(c);
        ++i;
    }
    return i - pos;
}

void tokenize_chunk(std::string_view chunk, TokenSequence& out)
{
    std::size_t pos = 0;
    while (pos < chunk.size()) {
        std::size_t len = 0;
        if ((len = match_placeholder(chunk, pos)) || (len = match_scheme_url(chunk, pos))
            || (len = match_mention(chunk, pos)) || (len = match_hashtag(chunk, pos))
            || (len = match_emoticon(chunk, pos)) || (len = match_emoji(chunk, pos))) {
            auto token = chunk.substr(pos, len);
            out.push_back(is_special_token(token) ? std::string(token) : lowercase(token));
            pos += len;
            continue;
        }

        auto cp = decode(chunk, pos);
        if (cp.value == '\'' && pos + 1 < chunk.size()) {
            auto wlen = scan_word(chunk, pos + 1);
            auto candidate = lowercase(chunk.substr(pos, wlen + 1));
            if (wlen > 0
                && std::find(leading_elisions.begin(), leading_elisions.end(), candidate)
                       != leading_elisions.end()) {
                out.push_back(std::move(candidate));
                pos += wlen + 1;
                continue;
            }
        }

        if (is_word_char(cp.value)) {
            bool starts_at_boundary = !is_word_char(previous_code_point(chunk, pos));
            if (starts_at_boundary && (len = match_bare_domain(chunk, pos))) {
                out.push_back(lowercase(chunk.substr(pos, len)));
                pos += len;
                continue;
            }
            len = scan_word(chunk, pos);
            emit_word(chunk.substr(pos, len), out);
            pos += len;
            continue;
        }

        // Punctuation: runs of one ASCII symbol stay together ("...", "!!!").
        len = cp.length;
        if (cp.value < 0x80) {
            while (pos + len < chunk.size() && chunk[pos + len] == chunk[pos]) {
                ++len;
            }
        }
        if (cp.value != 0xFFFD && cp.value != zero_width_joiner && !is_emoji_modifier(cp.value)) {
            out.emplace_back(chunk.substr(pos, len));
        }
        pos += len;
    }
}

} // namespace

std::string to_lower_utf8(std::string_view text) { return lowercase(text); }

bool is_special_token(std::string_view token)
{
    return std::find(std::begin(special_tokens), std::end(special_tokens), token)
           != std::end(special_tokens);
}

bool is_url_token(std::string_view token)
{
    if (token.empty()) {
        return false;
    }
    if (match_scheme_url(token, 0) == token.size()) {
        return true;
    }
    return is_word_char(decode(token, 0).value) && match_bare_domain(token, 0) == token.size();
}

bool is_mention_token(std::string_view token)
{
    return !token.empty() && match_mention(token, 0) == token.size();
}

bool is_hashtag_token(std::string_view token)
{
    return !token.empty() && match_hashtag(token, 0) == token.size();
}

TokenSequence tokenize(std::string_view raw)
{
    TokenSequence out;
    auto text = clean(raw);
    std::string_view view = text;
    std::size_t pos = 0;
    while (pos < view.size()) {
        auto cp = decode(view, pos);
        if (is_space(cp.value)) {
            pos += cp.length;
            continue;
        }
        std::size_t end = pos;
        while (end < view.size()) {
            auto next = decode(view, end);
            if (is_space(next.value)) {
                break;
            }
            end += next.length;
        }
        tokenize_chunk(view.substr(pos, end - pos), out);
        pos = end;
    }
    return out;
}

} // namespace supportbench
