#include "supportbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

namespace supportbench {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n)
{
    NgramCounts counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            key += ' ';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

struct OverlapStats {
    std::size_t matches[2] = {0, 0}; // clipped unigram / bigram matches
    std::size_t totals[2] = {0, 0};  // candidate unigrams / bigrams
    std::size_t cand_len = 0;
    std::size_t ref_len = 0;

    OverlapStats& operator+=(const OverlapStats& o)
    {
        for (int i = 0; i < 2; ++i) {
            matches[i] += o.matches[i];
            totals[i] += o.totals[i];
        }
        cand_len += o.cand_len;
        ref_len += o.ref_len;
        return *this;
    }
};

OverlapStats overlap(std::span<const std::string> cand, std::span<const std::string> ref)
{
    OverlapStats s;
    s.cand_len = cand.size();
    s.ref_len = ref.size();
    for (std::size_t n = 1; n <= 2; ++n) {
        auto c = count_ngrams(cand, n);
        auto r = count_ngrams(ref, n);
        for (const auto& [gram, count] : c) {
            auto it = r.find(gram);
            if (it != r.end()) {
                s.matches[n - 1] += std::min(count, it->second);
            }
            s.totals[n - 1] += count;
        }
    }
    return s;
}

double brevity_penalty(std::size_t cand_len, std::size_t ref_len)
{
    if (cand_len == 0) {
        return 0.0;
    }
    if (cand_len >= ref_len) {
        return 1.0;
    }
    return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
}

double bleu_from(const OverlapStats& s, bool smooth_bigrams)
{
    if (s.totals[0] == 0 || s.matches[0] == 0) {
        return 0.0;
    }
    double p1 = static_cast<double>(s.matches[0]) / static_cast<double>(s.totals[0]);
    double p2 = 0.0;
    if (smooth_bigrams) {
        p2 = static_cast<double>(s.matches[1] + 1) / static_cast<double>(s.totals[1] + 1);
    } else if (s.totals[1] > 0) {
        p2 = static_cast<double>(s.matches[1]) / static_cast<double>(s.totals[1]);
    }
    if (p2 == 0.0) {
        return 0.0;
    }
    return brevity_penalty(s.cand_len, s.ref_len) * std::sqrt(p1 * p2);
}

std::vector<std::vector<double>> in_table_vectors(std::span<const std::string> tokens,
                                                  const EmbeddingTable& table)
{
    std::vector<std::vector<double>> out;
    for (const auto& t : tokens) {
        auto v = table.lookup(t);
        if (!v.empty()) {
            out.emplace_back(v.begin(), v.end());
        }
    }
    return out;
}

std::vector<double> mean_vector(const std::vector<std::vector<double>>& vectors)
{
    std::vector<double> mean(vectors.front().size(), 0.0);
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            mean[i] += v[i];
        }
    }
    for (auto& x : mean) {
        x /= static_cast<double>(vectors.size());
    }
    return mean;
}

double directional(const std::vector<std::vector<double>>& from,
                   const std::vector<std::vector<double>>& to)
{
    double total = 0.0;
    for (const auto& v : from) {
        double best = -1.0;
        for (const auto& w : to) {
            best = std::max(best, cosine(v, w));
        }
        total += best;
    }
    return total / static_cast<double>(from.size());
}

MetricSummary summarize(const std::vector<double>& values)
{
    MetricSummary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) {
        sq += (v - s.mean) * (v - s.mean);
    }
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

} // namespace

double bleu2(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references,
             BleuMode mode)
{
    if (candidates.size() != references.size()) {
        throw std::invalid_argument("bleu2: candidate and reference counts differ");
    }
    if (candidates.empty()) {
        throw std::invalid_argument("bleu2: no pairs to score");
    }
    if (mode == BleuMode::sentence) {
        double sum = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            sum += sentence_bleu2(candidates[i], references[i]);
        }
        return sum / static_cast<double>(candidates.size());
    }
    OverlapStats pooled;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        pooled += overlap(candidates[i], references[i]);
    }
    return bleu_from(pooled, false);
}

double sentence_bleu2(std::span<const std::string> candidate,
                      std::span<const std::string> reference)
{
    return bleu_from(overlap(candidate, reference), true);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b)
{
    if (a.empty() || b.empty()) {
        return 0;
    }
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference)
{
    auto l = static_cast<double>(lcs_length(candidate, reference));
    if (l == 0.0) {
        return 0.0;
    }
    double p = l / static_cast<double>(candidate.size());
    double r = l / static_cast<double>(reference.size());
    return 2.0 * p * r / (p + r);
}

double cosine(std::span<const double> a, std::span<const double> b)
{
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    if (!std::isfinite(na) || !std::isfinite(nb) || !std::isfinite(dot)) {
        // rescale so the squared sums stay in range
        double sa = 0.0;
        double sb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            sa = std::max(sa, std::abs(a[i]));
            sb = std::max(sb, std::abs(b[i]));
        }
        dot = na = nb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double x = a[i] / sa;
            double y = b[i] / sb;
            dot += x * y;
            na += x * x;
            nb += y * y;
        }
    }
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    if (std::isnan(c)) {
        return 0.0;
    }
    return std::clamp(c, -1.0, 1.0);
}

SemanticScore embedding_average(std::span<const std::string> candidate,
                                std::span<const std::string> reference, const EmbeddingTable& table)
{
    auto c = in_table_vectors(candidate, table);
    auto r = in_table_vectors(reference, table);
    if (c.empty() || r.empty()) {
        return {};
    }
    return {cosine(mean_vector(c), mean_vector(r)), true};
}

SemanticScore greedy_directional(std::span<const std::string> u1, std::span<const std::string> u2,
                                 const EmbeddingTable& table)
{
    auto a = in_table_vectors(u1, table);
    auto b = in_table_vectors(u2, table);
    if (a.empty() || b.empty()) {
        return {};
    }
    return {directional(a, b), true};
}

SemanticScore greedy_matching(std::span<const std::string> u1, std::span<const std::string> u2,
                              const EmbeddingTable& table)
{
    auto a = in_table_vectors(u1, table);
    auto b = in_table_vectors(u2, table);
    if (a.empty() || b.empty()) {
        return {};
    }
    return {(directional(a, b) + directional(b, a)) / 2.0, true};
}

std::vector<double> extrema_vector(std::span<const std::vector<double>> vectors)
{
    if (vectors.empty()) {
        throw std::invalid_argument("extrema_vector: no vectors");
    }
    const auto dim = vectors.front().size();
    std::vector<double> hi(vectors.front());
    std::vector<double> lo(vectors.front());
    for (const auto& v : vectors) {
        if (v.size() != dim) {
            throw std::invalid_argument("extrema_vector: vectors differ in dimension");
        }
        for (std::size_t i = 0; i < dim; ++i) {
            hi[i] = std::max(hi[i], v[i]);
            lo[i] = std::min(lo[i], v[i]);
        }
    }
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out[i] = hi[i] >= std::abs(lo[i]) ? hi[i] : lo[i];
    }
    return out;
}

SemanticScore vector_extrema(std::span<const std::string> candidate,
                             std::span<const std::string> reference, const EmbeddingTable& table)
{
    auto c = in_table_vectors(candidate, table);
    auto r = in_table_vectors(reference, table);
    if (c.empty() || r.empty()) {
        return {};
    }
    return {cosine(extrema_vector(c), extrema_vector(r)), true};
}

PairScores score_pair(std::span<const std::string> candidate,
                      std::span<const std::string> reference, const EmbeddingTable& table)
{
    PairScores s;
    s.bleu2 = sentence_bleu2(candidate, reference);
    s.rouge_l = rouge_l(candidate, reference);
    s.embedding_average = embedding_average(candidate, reference, table);
    s.greedy_matching = greedy_matching(candidate, reference, table);
    s.vector_extrema = vector_extrema(candidate, reference, table);
    return s;
}

CorpusScores score_corpus(std::span<const TokenSequence> candidates,
                          std::span<const TokenSequence> references, const EmbeddingTable& table,
                          unsigned threads)
{
    CorpusScores out;
    out.bleu2 = bleu2(candidates, references, BleuMode::corpus);
    out.pairs = candidates.size();
    out.per_pair.resize(candidates.size());

    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, candidates.size()));
    auto work = [&](unsigned worker) {
        for (std::size_t i = worker; i < candidates.size(); i += threads) {
            out.per_pair[i] = score_pair(candidates[i], references[i], table);
        }
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
    }

    std::vector<double> bleu;
    std::vector<double> rouge;
    std::vector<double> average;
    std::vector<double> greedy;
    std::vector<double> extrema;
    for (const auto& p : out.per_pair) {
        bleu.push_back(p.bleu2);
        rouge.push_back(p.rouge_l);
        if (p.embedding_average.covered) {
            average.push_back(p.embedding_average.value);
        }
        if (p.greedy_matching.covered) {
            greedy.push_back(p.greedy_matching.value);
        }
        if (p.vector_extrema.covered) {
            extrema.push_back(p.vector_extrema.value);
        }
        if (!p.embedding_average.covered) {
            ++out.uncovered;
        }
    }
    out.sentence_bleu2 = summarize(bleu);
    out.rouge_l = summarize(rouge);
    out.embedding_average = summarize(average);
    out.greedy_matching = summarize(greedy);
    out.vector_extrema = summarize(extrema);
    return out;
}

} // namespace supportbench
