#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "supportbench/embeddings.hpp"
#include "supportbench/normalize.hpp"

namespace supportbench {

// ---------------------------------------------------------------------------
// Word-overlap measures, in [0, 1]

enum class BleuMode {
    corpus,   // n-gram statistics pooled over all pairs
    sentence, // mean of per-pair scores, add-one smoothing on bigrams
};

// BLEU with unigram and bigram precisions, uniform weights and the brevity
// penalty min(1, exp(1 - r/c)). A zero precision (including a zero
// denominator) gives 0. Throws std::invalid_argument when the sequences
// differ in length or are empty.
double bleu2(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references,
             BleuMode mode = BleuMode::corpus);

// Single pair, smoothed as in BleuMode::sentence.
double sentence_bleu2(std::span<const std::string> candidate,
                      std::span<const std::string> reference);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// LCS-based F1; 0 when either side is empty or nothing is shared.
double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

// ---------------------------------------------------------------------------
// Embedding measures, in [-1, 1]
//
// Tokens missing from the table are skipped. A pair where either side has no
// in-table token is uncovered: it scores 0 and is excluded from corpus means.

struct SemanticScore {
    double value = 0.0;
    bool covered = false;
};

// 0 when either vector has zero norm. Clamped to [-1, 1].
double cosine(std::span<const double> a, std::span<const double> b);

SemanticScore embedding_average(std::span<const std::string> candidate,
                                std::span<const std::string> reference,
                                const EmbeddingTable& table);

// Mean over in-table tokens v of u1 of max over in-table tokens w of u2 of
// cos(v, w); every token weighs 1.
SemanticScore greedy_directional(std::span<const std::string> u1, std::span<const std::string> u2,
                                 const EmbeddingTable& table);

// Average of both directions; symmetric.
SemanticScore greedy_matching(std::span<const std::string> u1, std::span<const std::string> u2,
                              const EmbeddingTable& table);

// Per coordinate, the maximum when it is at least |minimum|, else the minimum.
// Throws std::invalid_argument on empty input or mixed dimensions.
std::vector<double> extrema_vector(std::span<const std::vector<double>> vectors);

SemanticScore vector_extrema(std::span<const std::string> candidate,
                             std::span<const std::string> reference, const EmbeddingTable& table);

// ---------------------------------------------------------------------------
// Aggregation

struct PairScores {
    double bleu2 = 0.0; // sentence-level, diagnostic
    double rouge_l = 0.0;
    SemanticScore embedding_average;
    SemanticScore greedy_matching;
    SemanticScore vector_extrema;
};

PairScores score_pair(std::span<const std::string> candidate,
                      std::span<const std::string> reference, const EmbeddingTable& table);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation of per-pair scores
    std::size_t count = 0;
};

struct CorpusScores {
    double bleu2 = 0.0; // corpus-level
    MetricSummary sentence_bleu2;
    MetricSummary rouge_l;
    MetricSummary embedding_average; // covered pairs only
    MetricSummary greedy_matching;
    MetricSummary vector_extrema;
    std::size_t pairs = 0;
    std::size_t uncovered = 0; // pairs with an uncovered embedding side
    std::vector<PairScores> per_pair;
};

// Scores every pair (in parallel over `threads` workers, 0 = hardware
// concurrency) and reduces in input order, so results do not depend on the
// thread count.
CorpusScores score_corpus(std::span<const TokenSequence> candidates,
                          std::span<const TokenSequence> references, const EmbeddingTable& table,
                          unsigned threads = 0);

} // namespace supportbench
