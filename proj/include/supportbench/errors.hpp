#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace supportbench {

// Bad input data: malformed files, empty splits, coverage violations.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid settings detected before any data is processed.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class EmptySplitError : public DataError {
  public:
    using DataError::DataError;
};

// A text file violated its format at a specific line.
class FormatError : public DataError {
  public:
    FormatError(std::size_t line, const std::string& message)
        : DataError("line " + std::to_string(line) + ": " + message), m_line(line)
    {
    }

    [[nodiscard]] std::size_t line() const { return m_line; }

  private:
    std::size_t m_line;
};

} // namespace supportbench
