#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "supportbench/corpus.hpp"
#include "supportbench/normalize.hpp"

namespace supportbench {

using DocId = std::uint32_t;

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
    // Stop-word removal and minimal plural stemming on both fields.
    bool english_analysis = false;

    void validate() const; // k1 >= 0, 0 <= b <= 1
    friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

enum class Field { unigram, trigram };

using TermCounts = std::map<std::string, std::uint32_t>;

struct IndexedDocument {
    DocId doc_id = 0;
    TweetId dialog_id = 0;
    std::size_t turn_index = 0;
    TokenSequence question_tokens; // analyzed context + question
    std::string answer;
    TermCounts unigram_tf;
    TermCounts trigram_tf;
    std::size_t length_uni = 0;
    std::size_t length_tri = 0;

    [[nodiscard]] const TermCounts& tf(Field f) const
    {
        return f == Field::unigram ? unigram_tf : trigram_tf;
    }
    [[nodiscard]] std::size_t length(Field f) const
    {
        return f == Field::unigram ? length_uni : length_tri;
    }
    friend bool operator==(const IndexedDocument&, const IndexedDocument&) = default;
};

struct Posting {
    DocId doc_id = 0;
    std::uint32_t tf = 0;
    friend bool operator==(const Posting&, const Posting&) = default;
};

// Consecutive token triples joined by a single space (tokens never contain
// whitespace, so the key is unambiguous).
std::vector<std::string> word_trigrams(std::span<const std::string> tokens);

// Stop-word removal and minimal English plural stemming.
TokenSequence english_analyze(std::span<const std::string> tokens);

// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
double bm25_idf(std::size_t doc_count, std::size_t df);

// Saturated, length-normalized term frequency component.
double bm25_tf_weight(double tf, double doc_length, double avg_length, double k1, double b);

// Inverted index over two fields of the same analyzed question text:
// unigrams and word trigrams. Immutable after build; all const members are
// safe to call from concurrent readers.
class Bm25Index {
  public:
    static constexpr int format_version = 1;

    // One document per tuple, indexing the analyzed `context + " " + question`.
    // Throws DataError when `train` is empty.
    static Bm25Index build(std::span<const DialogTuple> train, Bm25Params params = {});

    // Normalization plus the index's optional English analysis.
    [[nodiscard]] TokenSequence analyze(std::string_view text) const;
    [[nodiscard]] TokenSequence analyze_query(std::string_view context,
                                              std::string_view question) const;

    [[nodiscard]] const Bm25Params& params() const { return m_params; }
    [[nodiscard]] std::size_t doc_count() const { return m_docs.size(); }
    // Throws std::out_of_range for an unknown id.
    [[nodiscard]] const IndexedDocument& document(DocId id) const;
    [[nodiscard]] std::span<const Posting> postings(Field f, std::string_view term) const;
    [[nodiscard]] std::size_t df(Field f, std::string_view term) const
    {
        return postings(f, term).size();
    }
    [[nodiscard]] double avg_length(Field f) const;
    [[nodiscard]] std::size_t term_count(Field f) const;

    // JSON with a format header; save followed by load is lossless.
    void save(std::ostream& out) const;
    static Bm25Index load(std::istream& in);

    friend bool operator==(const Bm25Index& a, const Bm25Index& b);

  private:
    struct FieldIndex {
        std::unordered_map<std::string, std::vector<Posting>> postings;
        std::size_t total_length = 0;
        double avg_length = 0.0;
    };

    Bm25Index() = default;
    void add_document(IndexedDocument doc);
    void finalize();
    [[nodiscard]] const FieldIndex& field(Field f) const
    {
        return f == Field::unigram ? m_unigrams : m_trigrams;
    }

    Bm25Params m_params;
    std::vector<IndexedDocument> m_docs;
    FieldIndex m_unigrams;
    FieldIndex m_trigrams;
};

// Sum over both fields of idf(t) * tf_weight(t, doc) for every query term
// occurrence; `query_tokens` must already be analyzed by the index.
// Throws std::out_of_range for an unknown doc id.
double bm25_score(const Bm25Index& index, std::span<const std::string> query_tokens, DocId doc);

struct RankedAnswer {
    std::string answer;
    DocId doc_id = 0;
    double score = 0.0;
};

// Top-k documents sharing at least one term with the query, ordered by
// descending score then ascending doc id. Empty when nothing matches.
std::vector<RankedAnswer> rank(const Bm25Index& index, std::span<const std::string> query_tokens,
                               std::size_t k);

// rank() on the analyzed `context + " " + question`. Throws ConfigError for k < 1.
std::vector<RankedAnswer> respond(const Bm25Index& index, std::string_view context,
                                  std::string_view question, std::size_t k = 1);

struct Query {
    std::string context;
    std::string question;
};

// respond() for every query, spread over `threads` workers (0 = hardware
// concurrency). Output order matches input order.
std::vector<std::vector<RankedAnswer>> respond_batch(const Bm25Index& index,
                                                     std::span<const Query> queries,
                                                     std::size_t k, unsigned threads = 0);

} // namespace supportbench
