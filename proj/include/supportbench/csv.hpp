#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace supportbench {

// Streaming RFC 4180 reader: quoted fields may contain separators, doubled
// quotes and line breaks. Records are pulled one at a time.
class CsvReader {
  public:
    explicit CsvReader(std::istream& in, char separator = ',');

    // Fills `fields` with the next record. Returns false at end of input.
    bool next(std::vector<std::string>& fields);

    // 1-based record number of the record last returned (header = 1).
    [[nodiscard]] std::size_t record_number() const { return m_record; }
    // Physical line on which the last returned record started.
    [[nodiscard]] std::size_t line_number() const { return m_line_start; }
    // True when the last record ended inside an unterminated quote.
    [[nodiscard]] bool unterminated_quote() const { return m_unterminated; }

  private:
    std::istream& m_in;
    char m_sep;
    std::size_t m_record = 0;
    std::size_t m_line = 1;
    std::size_t m_line_start = 1;
    bool m_unterminated = false;
};

} // namespace supportbench
