#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "supportbench/corpus.hpp"

namespace supportbench {

// Exchange record between any responder and the evaluator.
struct ResponseRecord {
    TweetId dialog_id = 0;
    std::size_t turn_index = 0;
    std::string context;
    std::string question;
    std::string gold_answer;
    std::string response;
    std::string system;

    friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

// One JSON object per line. Readers throw FormatError with the line number
// on malformed input; blank lines are skipped.
void write_tuples(std::ostream& out, std::span<const DialogTuple> tuples);
std::vector<DialogTuple> read_tuples(std::istream& in);

void write_responses(std::ostream& out, std::span<const ResponseRecord> records);
std::vector<ResponseRecord> read_responses(std::istream& in);

// File wrappers; I/O failures and format errors surface as DataError
// carrying the path.
void write_tuples_file(const std::string& path, std::span<const DialogTuple> tuples);
std::vector<DialogTuple> read_tuples_file(const std::string& path);
void write_responses_file(const std::string& path, std::span<const ResponseRecord> records);
std::vector<ResponseRecord> read_responses_file(const std::string& path);

} // namespace supportbench
