#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supportbench/corpus.hpp"
#include "supportbench/jsonl.hpp"
#include "supportbench/metrics.hpp"
#include "supportbench/retrieval.hpp"

namespace supportbench {

// ---------------------------------------------------------------------------
// prepare: CSV dump -> train.jsonl, test.jsonl, vocab.txt, stats.json

struct PrepareOptions {
    std::string csv_path;
    std::string out_dir;
    SplitConfig split;
    std::vector<std::string> redirect_patterns = default_redirect_patterns();
    RowPolicy row_policy = RowPolicy::skip;
    std::size_t vocab_size = 8192;
};

struct LengthStats {
    double mean = 0.0;
    double min = 0.0;
    double q1 = 0.0; // linear interpolation between order statistics
    double mode = 0.0; // smallest most frequent value
    double q3 = 0.0;
    double max = 0.0;
};

struct CorpusStats {
    std::size_t tweets = 0;
    std::size_t skipped_rows = 0;
    std::size_t threading_warnings = 0;
    std::size_t dialogs = 0;
    std::size_t min_turns = 0;
    std::size_t max_turns = 0;
    double avg_turns = 0.0;
    std::size_t extracted_tuples = 0;
    std::size_t redirects_removed = 0;
    std::size_t out_of_window = 0;
    std::size_t train_tuples = 0;
    std::size_t test_tuples = 0;
    std::size_t distinct_words = 0; // over questions and answers of both splits
    LengthStats question_words;
    LengthStats answer_words;
};

// Min, quartiles, mode, max and mean of a sample; all zero when empty.
LengthStats length_stats(std::vector<std::size_t> lengths);

// parse -> thread -> extract -> filter -> split, then writes the outputs.
// Per-row problems are counted (or abort, per row_policy); an empty split
// throws EmptySplitError and nothing is written.
CorpusStats cmd_prepare(const PrepareOptions& options);

std::string stats_to_json(const CorpusStats& stats);

// ---------------------------------------------------------------------------
// respond-ir: BM25 answers for every test tuple

inline constexpr std::string_view ir_system_name = "ir-bm25";

struct RespondOptions {
    std::string train_path;
    std::string test_path;
    std::string out_path;
    Bm25Params params;
    std::string fallback; // used when retrieval comes back empty
    std::optional<std::string> index_out;
    unsigned threads = 0;
};

// One ResponseRecord per test tuple, in test order.
std::vector<ResponseRecord> respond_ir(const Bm25Index& index,
                                       std::span<const DialogTuple> test,
                                       const std::string& fallback, unsigned threads = 0);

// Returns the number of records written.
std::size_t cmd_respond_ir(const RespondOptions& options);

// ---------------------------------------------------------------------------
// evaluate: five metrics per pair plus corpus means

struct EvaluationReport {
    std::string system;
    // Corpus-level values scaled by 100.
    double bleu2 = 0.0;
    double rouge_l = 0.0;
    double embedding_average = 0.0;
    double greedy_matching = 0.0;
    double vector_extrema = 0.0;
    // Per-pair spread, scaled by 100.
    double sentence_bleu2_mean = 0.0;
    double sentence_bleu2_stddev = 0.0;
    double rouge_l_stddev = 0.0;
    double embedding_average_stddev = 0.0;
    double greedy_matching_stddev = 0.0;
    double vector_extrema_stddev = 0.0;
    std::size_t pairs = 0;
    std::size_t covered = 0;
    std::size_t uncovered = 0;
    std::string pair_file;
    std::string fingerprint;

    friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

// Throws DataError listing duplicate keys, mixed system names, and (when a
// test split is given) missing or unexpected keys.
void check_coverage(std::span<const ResponseRecord> responses,
                    std::optional<std::span<const DialogTuple>> test);

// Digest of the evaluated split (keys and gold answers) and the metric
// settings, independent of the responses themselves.
std::string config_fingerprint(std::span<const ResponseRecord> responses,
                               const EmbeddingTable& table);

// Scores responses against their gold answers, both normalized.
EvaluationReport evaluate_responses(std::span<const ResponseRecord> responses,
                                    const EmbeddingTable& table, CorpusScores* detail = nullptr,
                                    unsigned threads = 0);

struct EvaluateOptions {
    std::string responses_path;
    std::string embeddings_path;
    std::string out_dir;
    std::optional<std::string> test_path;
    unsigned threads = 0;
};

// Writes pairs.jsonl and report.json into out_dir.
EvaluationReport cmd_evaluate(const EvaluateOptions& options);

// ---------------------------------------------------------------------------
// report: systems as rows, metrics as columns

// Scales by 100 and rounds half-to-even on the shortest decimal form of the
// scaled value, two decimals: 0.151045 -> "15.10".
std::string format_score(double fraction);

struct RenderedTables {
    std::string text;
    std::string csv;
};

// Rows keep input order. Reports with differing fingerprints are rendered
// with a trailing note.
RenderedTables cmd_report(std::span<const EvaluationReport> reports);

} // namespace supportbench
