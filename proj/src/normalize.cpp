#include "supportbench/normalize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "supportbench/errors.hpp"

namespace supportbench {

namespace {

// Mirrors data/rewrites.tsv; a unit test keeps the two in sync.
constexpr std::string_view builtin_rewrites = "'ll\twill\n"
                                              "'d\twould\n"
                                              "'re\tare\n"
                                              "'ve\thave\n"
                                              "'m\tam\n"
                                              "n't\tnot\n"
                                              "can't\tcan not\n"
                                              "won't\twill not\n"
                                              "shan't\tshall not\n"
                                              "ain't\tis not\n"
                                              "'bout\tabout\n"
                                              "'til\tuntil\n"
                                              "'cause\tbecause\n"
                                              "'em\tthem\n"
                                              "'round\taround\n";

TokenSequence split_spaces(std::string_view s)
{
    TokenSequence out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto start = s.find_first_not_of(' ', pos);
        if (start == std::string_view::npos) {
            break;
        }
        auto end = s.find(' ', start);
        if (end == std::string_view::npos) {
            end = s.size();
        }
        out.emplace_back(s.substr(start, end - start));
        pos = end;
    }
    return out;
}

bool is_placeholder_target(std::string_view token)
{
    return is_url_token(token) || is_mention_token(token) || is_hashtag_token(token);
}

} // namespace

const RewriteTable& RewriteTable::defaults()
{
    static const RewriteTable table = [] {
        std::istringstream in{std::string(builtin_rewrites)};
        return parse(in);
    }();
    return table;
}

RewriteTable RewriteTable::parse(std::istream& in)
{
    RewriteTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw FormatError(line_no, "expected `surface<TAB>replacement`");
        }
        try {
            table.add(std::string_view(line).substr(0, tab),
                      std::string_view(line).substr(tab + 1));
        } catch (const ConfigError& e) {
            throw FormatError(line_no, e.what());
        }
    }
    return table;
}

RewriteTable RewriteTable::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open rewrite table '{}'", path));
    }
    return parse(in);
}

void RewriteTable::add(std::string_view surface, std::string_view replacement)
{
    if (surface.empty() || surface.find(' ') != std::string_view::npos) {
        throw ConfigError(fmt::format("invalid surface form '{}'", surface));
    }
    if (is_special_token(surface) || is_placeholder_target(surface)) {
        throw ConfigError(fmt::format("surface '{}' is handled by placeholder rules", surface));
    }
    auto tokens = split_spaces(replacement);
    if (tokens.empty()) {
        throw ConfigError(fmt::format("empty replacement for '{}'", surface));
    }
    for (const auto& t : tokens) {
        if (m_entries.contains(t) || t == surface || is_placeholder_target(t)) {
            throw ConfigError(fmt::format("replacement token '{}' would be rewritten again", t));
        }
    }
    for (const auto& [key, value] : m_entries) {
        if (std::find(value.begin(), value.end(), surface) != value.end()) {
            throw ConfigError(
                fmt::format("surface '{}' appears in the replacement of '{}'", surface, key));
        }
    }
    m_entries.insert_or_assign(std::string(surface), std::move(tokens));
}

const TokenSequence* RewriteTable::lookup(std::string_view token) const
{
    auto it = m_entries.find(std::string(token));
    return it == m_entries.end() ? nullptr : &it->second;
}

TokenSequence normalize_tokens(std::span<const std::string> tokens, const RewriteTable& table)
{
    TokenSequence out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (is_special_token(t)) {
            out.push_back(t);
        } else if (is_url_token(t)) {
            out.emplace_back(url_token);
        } else if (is_mention_token(t)) {
            out.emplace_back(user_token);
        } else if (is_hashtag_token(t)) {
            out.emplace_back(hashtag_token);
        } else if (const auto* replacement = table.lookup(t)) {
            out.insert(out.end(), replacement->begin(), replacement->end());
        } else {
            out.push_back(t);
        }
    }
    return out;
}

TokenSequence normalize_text(std::string_view raw, const RewriteTable& table)
{
    return normalize_tokens(tokenize(raw), table);
}

} // namespace supportbench
