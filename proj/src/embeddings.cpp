#include "supportbench/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "supportbench/errors.hpp"
#include "supportbench/normalize.hpp"

namespace supportbench {

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        auto start = line.find_first_not_of(" \t", pos);
        if (start == std::string_view::npos) {
            break;
        }
        auto end = line.find_first_of(" \t", start);
        if (end == std::string_view::npos) {
            end = line.size();
        }
        out.push_back(line.substr(start, end - start));
        pos = end;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

float float_from_le(const unsigned char* bytes)
{
    std::uint32_t bits = 0;
    for (int i = 3; i >= 0; --i) {
        bits = (bits << 8) | bytes[i];
    }
    return std::bit_cast<float>(bits);
}

void float_to_le(float v, std::ostream& out)
{
    auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
}

std::string key_for(std::string_view word, const EmbeddingLoadOptions& options)
{
    return options.lowercase_keys ? to_lower_utf8(word) : std::string(word);
}

EmbeddingTable load_text(std::istream& in, const EmbeddingLoadOptions& options)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    std::size_t declared = 0;
    bool has_header = false;
    std::vector<float> values;
    std::optional<EmbeddingTable> table;
    std::size_t entries = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        auto fields = split_fields(line);
        if (fields.empty()) {
            continue;
        }
        if (!table) {
            std::size_t count = 0;
            std::size_t header_dim = 0;
            if (fields.size() == 2 && parse_number(fields[0], count)
                && parse_number(fields[1], header_dim)) {
                if (header_dim == 0) {
                    throw FormatError(line_no, "header declares dimension 0");
                }
                has_header = true;
                declared = count;
                dim = header_dim;
                table.emplace(dim);
                continue;
            }
            if (fields.size() < 2) {
                throw FormatError(line_no, "expected a word followed by its vector");
            }
            dim = fields.size() - 1;
            table.emplace(dim);
        }
        if (fields.size() - 1 != dim) {
            throw FormatError(line_no, fmt::format("vector for '{}' has {} values, expected {}",
                                                   fields[0], fields.size() - 1, dim));
        }
        values.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!parse_number(fields[i + 1], values[i])) {
                throw FormatError(line_no, fmt::format("invalid number '{}'", fields[i + 1]));
            }
        }
        table->add(key_for(fields[0], options), values);
        ++entries;
    }
    if (!table) {
        throw FormatError(line_no, "embedding file is empty");
    }
    if (has_header && entries != declared) {
        throw FormatError(line_no,
                          fmt::format("header declares {} vectors, found {}", declared, entries));
    }
    return std::move(*table);
}

EmbeddingTable load_binary(std::istream& in, const EmbeddingLoadOptions& options)
{
    std::string header;
    if (!std::getline(in, header)) {
        throw FormatError(1, "embedding file is empty");
    }
    auto fields = split_fields(header);
    std::size_t count = 0;
    std::size_t dim = 0;
    if (fields.size() != 2 || !parse_number(fields[0], count) || !parse_number(fields[1], dim)
        || dim == 0) {
        throw FormatError(1, "expected `count dim` header");
    }

    EmbeddingTable table(dim);
    std::vector<unsigned char> raw(dim * sizeof(float));
    std::vector<float> values(dim);
    std::string word;
    for (std::size_t entry = 0; entry < count; ++entry) {
        // Entries are reported 1-based after the header line.
        const std::size_t where = entry + 2;
        word.clear();
        int c = 0;
        while ((c = in.get()) != std::char_traits<char>::eof() && c != ' ') {
            if (c == '\n' && word.empty()) {
                continue;
            }
            word.push_back(static_cast<char>(c));
        }
        if (c == std::char_traits<char>::eof() || word.empty()) {
            throw FormatError(where, fmt::format("entry {} of {} is truncated", entry + 1, count));
        }
        if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
            throw FormatError(where, fmt::format("vector for '{}' is truncated", word));
        }
        for (std::size_t i = 0; i < dim; ++i) {
            values[i] = float_from_le(raw.data() + 4 * i);
        }
        table.add(key_for(word, options), values);
    }
    return table;
}

} // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension) : m_dim(dimension)
{
    if (dimension == 0) {
        throw std::invalid_argument("embedding dimension must be positive");
    }
}

EmbeddingTable EmbeddingTable::load(std::istream& in, EmbeddingFormat format,
                                    EmbeddingLoadOptions options)
{
    return format == EmbeddingFormat::binary ? load_binary(in, options) : load_text(in, options);
}

EmbeddingTable EmbeddingTable::load_file(const std::string& path, EmbeddingLoadOptions options)
{
    auto format = path.ends_with(".bin") ? EmbeddingFormat::binary : EmbeddingFormat::text;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open embeddings '{}'", path));
    }
    try {
        return load(in, format, options);
    } catch (const FormatError& e) {
        throw DataError(fmt::format("{}: {}", path, e.what()));
    }
}

bool EmbeddingTable::add(std::string_view word, std::span<const float> vector)
{
    if (vector.size() != m_dim) {
        throw std::invalid_argument(
            fmt::format("vector of size {} added to a table of dimension {}", vector.size(), m_dim));
    }
    auto [it, inserted] = m_row.try_emplace(std::string(word), m_words.size());
    if (!inserted) {
        return false;
    }
    m_words.emplace_back(word);
    m_data.insert(m_data.end(), vector.begin(), vector.end());
    return true;
}

std::span<const float> EmbeddingTable::lookup(std::string_view word) const
{
    auto it = m_row.find(std::string(word));
    if (it == m_row.end()) {
        return {};
    }
    return std::span<const float>(m_data).subspan(it->second * m_dim, m_dim);
}

void EmbeddingTable::save_text(std::ostream& out) const
{
    out << m_words.size() << ' ' << m_dim << '\n';
    for (std::size_t r = 0; r < m_words.size(); ++r) {
        out << m_words[r];
        for (std::size_t i = 0; i < m_dim; ++i) {
            out << ' ' << fmt::format("{}", m_data[r * m_dim + i]);
        }
        out << '\n';
    }
}

void EmbeddingTable::save_binary(std::ostream& out) const
{
    out << m_words.size() << ' ' << m_dim << '\n';
    for (std::size_t r = 0; r < m_words.size(); ++r) {
        out << m_words[r] << ' ';
        for (std::size_t i = 0; i < m_dim; ++i) {
            float_to_le(m_data[r * m_dim + i], out);
        }
        out << '\n';
    }
}

} // namespace supportbench
