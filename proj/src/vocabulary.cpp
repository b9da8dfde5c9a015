#include "supportbench/vocabulary.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "supportbench/errors.hpp"

namespace supportbench {

Vocabulary::Vocabulary(std::vector<std::string> words, std::size_t limit)
    : m_words(std::move(words)), m_members(m_words.begin(), m_words.end()), m_limit(limit)
{
}

Vocabulary Vocabulary::build(std::span<const TokenSequence> corpus, std::size_t n)
{
    if (n < 1) {
        throw ConfigError("vocabulary size must be at least 1");
    }
    if (corpus.empty()) {
        throw DataError("cannot build a vocabulary from an empty corpus");
    }

    struct Entry {
        std::size_t count = 0;
        std::size_t first_seen = 0;
    };
    std::unordered_map<std::string_view, Entry> counts;
    std::size_t position = 0;
    for (const auto& seq : corpus) {
        for (const auto& token : seq) {
            if (is_special_token(token)) {
                continue;
            }
            auto [it, inserted] = counts.try_emplace(token, Entry{0, position});
            ++it->second.count;
            ++position;
        }
    }

    std::vector<std::pair<std::string_view, Entry>> ranked(counts.begin(), counts.end());
    auto keep = std::min(n, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end(), [](const auto& a, const auto& b) {
                          if (a.second.count != b.second.count) {
                              return a.second.count > b.second.count;
                          }
                          return a.second.first_seen < b.second.first_seen;
                      });

    std::vector<std::string> words;
    words.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        words.emplace_back(ranked[i].first);
    }
    return Vocabulary(std::move(words), n);
}

void Vocabulary::save(std::ostream& out) const
{
    for (auto special : special_tokens) {
        out << special << '\n';
    }
    for (const auto& w : m_words) {
        out << w << '\n';
    }
}

Vocabulary Vocabulary::load(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    for (auto special : special_tokens) {
        ++line_no;
        if (!std::getline(in, line) || line != special) {
            throw FormatError(line_no, fmt::format("expected special token '{}'", special));
        }
    }
    std::vector<std::string> words;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_of(" \t") != std::string::npos) {
            throw FormatError(line_no, "vocabulary entries must be single non-empty tokens");
        }
        if (is_special_token(line) || !seen.insert(line).second) {
            throw FormatError(line_no, fmt::format("duplicate vocabulary entry '{}'", line));
        }
        words.push_back(line);
    }
    auto limit = words.size();
    return Vocabulary(std::move(words), std::max<std::size_t>(limit, 1));
}

bool Vocabulary::contains(std::string_view token) const
{
    return is_special_token(token) || m_members.contains(std::string(token));
}

TokenSequence apply_vocabulary(std::span<const std::string> tokens, const Vocabulary& vocab)
{
    TokenSequence out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        out.emplace_back(vocab.contains(t) ? std::string_view(t) : unk_token);
    }
    return out;
}

} // namespace supportbench
