#include "supportbench/csv.hpp"

namespace supportbench {

CsvReader::CsvReader(std::istream& in, char separator) : m_in(in), m_sep(separator) {}

bool CsvReader::next(std::vector<std::string>& fields)
{
    fields.clear();
    m_unterminated = false;
    if (m_in.peek() == std::char_traits<char>::eof()) {
        return false;
    }
    m_line_start = m_line;
    ++m_record;

    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;;) {
        int c = m_in.get();
        if (c == std::char_traits<char>::eof()) {
            if (quoted) {
                m_unterminated = true;
            }
            fields.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (m_in.peek() == '"') {
                    m_in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') {
                    ++m_line;
                }
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == m_sep) {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (ch == '\r' && m_in.peek() == '\n') {
            continue;
        } else if (ch == '\n') {
            ++m_line;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
            field_started = true;
        }
    }
}

} // namespace supportbench
