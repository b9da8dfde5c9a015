#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "supportbench/csv.hpp"
#include "supportbench/timestamp.hpp"

namespace supportbench {

using TweetId = std::int64_t;

struct Tweet {
    TweetId tweet_id = 0;
    std::string author_id;
    bool inbound = false; // written by a customer
    Timestamp created_at{};
    std::string text;
    std::optional<TweetId> in_response_to;

    friend bool operator==(const Tweet&, const Tweet&) = default;
};

// A threaded conversation. turns[0] is the customer post that opened it and
// every later turn replies to an earlier one.
struct Dialog {
    TweetId dialog_id = 0;
    std::vector<Tweet> turns;
    std::string brand;
};

// One (context, question, answer) training unit.
struct DialogTuple {
    TweetId dialog_id = 0;
    std::size_t turn_index = 0; // position of the answer within its dialog
    std::string context;
    std::string question;
    std::string answer;
    Timestamp answer_time{};

    friend bool operator==(const DialogTuple&, const DialogTuple&) = default;
};

struct SplitConfig {
    int train_window_days = 60;
    int test_window_days = 5;
    std::string brand;

    // Throws ConfigError unless train_window_days > test_window_days > 0.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Parsing

struct RowError {
    std::size_t row = 0;  // 1-based data row, header excluded
    std::size_t line = 0; // physical line the row starts on
    std::string column;   // offending column name, empty when not column-specific
    std::string message;
};

using RowResult = std::variant<Tweet, RowError>;

// Pulls tweets one row at a time from a Kaggle-style customer support dump.
// Columns are located by header name, so column order is free.
class TweetReader {
  public:
    // Throws DataError when the header lacks a required column.
    explicit TweetReader(std::istream& in);

    // nullopt at end of stream.
    std::optional<RowResult> next();

  private:
    CsvReader m_csv;
    std::vector<std::string> m_fields;
    std::vector<std::string> m_header;
    std::size_t m_id_col = 0;
    std::size_t m_author_col = 0;
    std::size_t m_inbound_col = 0;
    std::size_t m_created_col = 0;
    std::size_t m_text_col = 0;
    std::size_t m_reply_col = 0;
    std::size_t m_row = 0;
};

enum class RowPolicy { skip, abort };

struct ParsedTweets {
    std::vector<Tweet> tweets;
    std::vector<RowError> errors; // skipped rows, in input order
};

// With RowPolicy::abort the first bad row throws DataError.
ParsedTweets parse_tweet_stream(std::istream& in, RowPolicy policy = RowPolicy::skip);

std::string describe(const RowError& error);

// ---------------------------------------------------------------------------
// Threading and tuple extraction

struct ThreadedDialogs {
    std::vector<Dialog> dialogs; // ordered by (root created_at, root id)
    std::vector<std::string> warnings;
};

// Builds the reply forest and keeps trees that open with a customer post, hold
// at least two turns and contain a reply from `brand`. Replies whose parent is
// missing from the dump become roots; trees containing a reply cycle are
// dropped with a warning. Throws DataError on duplicate tweet ids.
ThreadedDialogs thread_conversations(std::span<const Tweet> tweets, std::string_view brand);

// One tuple per brand reply whose parent is a customer tweet.
std::vector<DialogTuple> extract_dialog_tuples(const Dialog& dialog);

// ---------------------------------------------------------------------------
// Redirect filtering

std::vector<std::string> default_redirect_patterns();

// Case-insensitive ECMAScript patterns matched anywhere in an answer.
class RedirectFilter {
  public:
    // Throws ConfigError for an empty list, an empty pattern or invalid syntax.
    explicit RedirectFilter(std::vector<std::string> patterns);

    [[nodiscard]] bool matches(std::string_view answer) const;
    [[nodiscard]] const std::vector<std::string>& patterns() const { return m_patterns; }

  private:
    std::vector<std::string> m_patterns;
    std::vector<std::regex> m_compiled;
};

struct FilteredTuples {
    std::vector<DialogTuple> kept;
    std::size_t removed = 0;
};

FilteredTuples filter_redirects(std::vector<DialogTuple> tuples, const RedirectFilter& filter);

// ---------------------------------------------------------------------------
// Temporal split

struct TemporalSplit {
    std::vector<DialogTuple> train;
    std::vector<DialogTuple> test;
};

// Both windows are anchored at the newest answer_time T:
//   test  = (T - test_window_days,  T]
//   train = (T - train_window_days, T - test_window_days]
// Input order is preserved inside each part. Throws EmptySplitError when
// either part is empty and ConfigError on an invalid config.
TemporalSplit temporal_split(std::span<const DialogTuple> tuples, const SplitConfig& cfg);

} // namespace supportbench
