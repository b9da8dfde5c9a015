#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace supportbench {

enum class EmbeddingFormat { text, binary };

struct EmbeddingLoadOptions {
    // Fold keys to lowercase so lookups by normalized tokens reach entries
    // such as "iPhone". With the usual frequency-ordered files the most
    // frequent casing wins, since duplicates keep their first occurrence.
    bool lowercase_keys = true;
};

// word -> dense float vector; every vector has the same dimension.
// Immutable after loading and safe for concurrent readers.
class EmbeddingTable {
  public:
    explicit EmbeddingTable(std::size_t dimension);

    // Text: optional `count dim` header, then `word v1 ... vd` per line.
    // Binary: the packed word2vec layout (`count dim\n`, then per entry the
    // word, a space and dim little-endian float32 values).
    // Throws FormatError naming the offending line (text) or entry (binary).
    static EmbeddingTable load(std::istream& in, EmbeddingFormat format,
                               EmbeddingLoadOptions options = {});
    // Format picked from the extension: ".bin" is binary, anything else text.
    static EmbeddingTable load_file(const std::string& path, EmbeddingLoadOptions options = {});

    // Returns false (and keeps the existing vector) for a duplicate word.
    // Throws std::invalid_argument on a dimension mismatch.
    bool add(std::string_view word, std::span<const float> vector);

    // Empty span when the word is absent.
    [[nodiscard]] std::span<const float> lookup(std::string_view word) const;
    [[nodiscard]] bool contains(std::string_view word) const { return !lookup(word).empty(); }

    [[nodiscard]] std::size_t dimension() const { return m_dim; }
    [[nodiscard]] std::size_t size() const { return m_words.size(); }
    [[nodiscard]] const std::vector<std::string>& words() const { return m_words; }

    void save_text(std::ostream& out) const;
    void save_binary(std::ostream& out) const;

  private:
    std::size_t m_dim;
    std::vector<std::string> m_words;
    std::vector<float> m_data;
    std::unordered_map<std::string, std::size_t> m_row;
};

} // namespace supportbench
