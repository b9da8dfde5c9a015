#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "supportbench/normalize.hpp"

namespace supportbench {

// Top-N word table. The special tokens are always members and do not count
// against the size limit. Immutable once built.
class Vocabulary {
  public:
    // n most frequent non-special tokens, ties broken by first occurrence.
    // Throws ConfigError for n < 1 and DataError for an empty corpus.
    static Vocabulary build(std::span<const TokenSequence> corpus, std::size_t n);

    // One token per line: the special tokens first (fixed order), then the
    // words in frequency order.
    void save(std::ostream& out) const;
    static Vocabulary load(std::istream& in);

    [[nodiscard]] bool contains(std::string_view token) const;
    [[nodiscard]] const std::vector<std::string>& words() const { return m_words; }
    [[nodiscard]] std::size_t size_limit() const { return m_limit; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b)
    {
        return a.m_words == b.m_words;
    }

  private:
    Vocabulary(std::vector<std::string> words, std::size_t limit);

    std::vector<std::string> m_words;
    std::unordered_set<std::string> m_members;
    std::size_t m_limit = 0;
};

inline Vocabulary build_vocabulary(std::span<const TokenSequence> corpus, std::size_t n)
{
    return Vocabulary::build(corpus, n);
}

// Replaces every token outside the vocabulary with <unk>; length preserved.
TokenSequence apply_vocabulary(std::span<const std::string> tokens, const Vocabulary& vocab);

} // namespace supportbench
