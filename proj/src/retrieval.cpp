#include "supportbench/retrieval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "supportbench/errors.hpp"

namespace supportbench {

namespace {

constexpr std::string_view format_name = "supportbench-bm25";

// Lucene's default English stop set.
constexpr std::array<std::string_view, 33> english_stop_words = {
    "a",    "an",   "and",   "are",  "as",    "at",   "be",   "but",   "by",
    "for",  "if",   "in",    "into", "is",    "it",   "no",   "not",   "of",
    "on",   "or",   "such",  "that", "the",   "their", "then", "there", "these",
    "they", "this", "to",    "was",  "will",  "with"};

bool is_ascii_word(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

// Harman's S-stemmer.
std::string stem_plural(std::string word)
{
    auto n = word.size();
    if (n < 3 || !is_ascii_word(word) || word.back() != 's') {
        return word;
    }
    char before = word[n - 2];
    if (n > 3 && word.ends_with("ies") && word[n - 4] != 'e' && word[n - 4] != 'a') {
        word.replace(n - 3, 3, "y");
    } else if (word.ends_with("es") && n > 3 && word[n - 3] != 'a' && word[n - 3] != 'e'
               && word[n - 3] != 'o') {
        word.pop_back();
    } else if (before != 'u' && before != 's') {
        word.pop_back();
    }
    return word;
}

} // namespace

void Bm25Params::validate() const
{
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw ConfigError(fmt::format("BM25 k1 must be a non-negative number (got {})", k1));
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ConfigError(fmt::format("BM25 b must lie in [0, 1] (got {})", b));
    }
}

std::vector<std::string> word_trigrams(std::span<const std::string> tokens)
{
    std::vector<std::string> out;
    if (tokens.size() < 3) {
        return out;
    }
    out.reserve(tokens.size() - 2);
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
        out.push_back(tokens[i] + ' ' + tokens[i + 1] + ' ' + tokens[i + 2]);
    }
    return out;
}

TokenSequence english_analyze(std::span<const std::string> tokens)
{
    TokenSequence out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (t == "'s"
            || std::find(english_stop_words.begin(), english_stop_words.end(), t)
                   != english_stop_words.end()) {
            continue;
        }
        out.push_back(stem_plural(t));
    }
    return out;
}

double bm25_idf(std::size_t doc_count, std::size_t df)
{
    auto n = static_cast<double>(doc_count);
    auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double bm25_tf_weight(double tf, double doc_length, double avg_length, double k1, double b)
{
    if (tf <= 0.0) {
        return 0.0;
    }
    double norm = avg_length > 0.0 ? doc_length / avg_length : 0.0;
    return tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * norm));
}

// ---------------------------------------------------------------------------

TokenSequence Bm25Index::analyze(std::string_view text) const
{
    auto tokens = normalize_text(text);
    return m_params.english_analysis ? english_analyze(tokens) : tokens;
}

TokenSequence Bm25Index::analyze_query(std::string_view context, std::string_view question) const
{
    std::string text;
    text.reserve(context.size() + 1 + question.size());
    text.append(context);
    text.push_back(' ');
    text.append(question);
    return analyze(text);
}

void Bm25Index::add_document(IndexedDocument doc)
{
    for (auto f : {Field::unigram, Field::trigram}) {
        auto& fi = f == Field::unigram ? m_unigrams : m_trigrams;
        for (const auto& [term, tf] : doc.tf(f)) {
            fi.postings[term].push_back(Posting{doc.doc_id, tf});
        }
        fi.total_length += doc.length(f);
    }
    m_docs.push_back(std::move(doc));
}

void Bm25Index::finalize()
{
    auto n = static_cast<double>(m_docs.size());
    for (auto* fi : {&m_unigrams, &m_trigrams}) {
        fi->avg_length = n > 0 ? static_cast<double>(fi->total_length) / n : 0.0;
    }
}

Bm25Index Bm25Index::build(std::span<const DialogTuple> train, Bm25Params params)
{
    params.validate();
    if (train.empty()) {
        throw DataError("cannot build a BM25 index from an empty training set");
    }
    Bm25Index index;
    index.m_params = params;
    index.m_docs.reserve(train.size());
    for (const auto& t : train) {
        IndexedDocument doc;
        doc.doc_id = static_cast<DocId>(index.m_docs.size());
        doc.dialog_id = t.dialog_id;
        doc.turn_index = t.turn_index;
        doc.question_tokens = index.analyze_query(t.context, t.question);
        doc.answer = t.answer;
        for (const auto& tok : doc.question_tokens) {
            ++doc.unigram_tf[tok];
        }
        for (auto& tri : word_trigrams(doc.question_tokens)) {
            ++doc.trigram_tf[std::move(tri)];
        }
        doc.length_uni = doc.question_tokens.size();
        doc.length_tri = doc.question_tokens.size() >= 3 ? doc.question_tokens.size() - 2 : 0;
        index.add_document(std::move(doc));
    }
    index.finalize();
    return index;
}

const IndexedDocument& Bm25Index::document(DocId id) const
{
    if (id >= m_docs.size()) {
        throw std::out_of_range(fmt::format("unknown document id {}", id));
    }
    return m_docs[id];
}

std::span<const Posting> Bm25Index::postings(Field f, std::string_view term) const
{
    const auto& map = field(f).postings;
    auto it = map.find(std::string(term));
    if (it == map.end()) {
        return {};
    }
    return it->second;
}

double Bm25Index::avg_length(Field f) const { return field(f).avg_length; }

std::size_t Bm25Index::term_count(Field f) const { return field(f).postings.size(); }

bool operator==(const Bm25Index& a, const Bm25Index& b)
{
    auto same_field = [](const Bm25Index::FieldIndex& x, const Bm25Index::FieldIndex& y) {
        return x.postings == y.postings && x.total_length == y.total_length
               && x.avg_length == y.avg_length;
    };
    return a.m_params == b.m_params && a.m_docs == b.m_docs
           && same_field(a.m_unigrams, b.m_unigrams) && same_field(a.m_trigrams, b.m_trigrams);
}

// ---------------------------------------------------------------------------
// Persistence

void Bm25Index::save(std::ostream& out) const
{
    using nlohmann::json;
    json j;
    j["format"] = format_name;
    j["version"] = format_version;
    j["params"] = {{"k1", m_params.k1},
                   {"b", m_params.b},
                   {"english_analysis", m_params.english_analysis}};
    j["doc_count"] = m_docs.size();

    auto& docs = j["documents"] = json::array();
    for (const auto& d : m_docs) {
        docs.push_back({{"doc_id", d.doc_id},
                        {"dialog_id", d.dialog_id},
                        {"turn_index", d.turn_index},
                        {"question_tokens", d.question_tokens},
                        {"answer", d.answer}});
    }
    for (auto f : {Field::unigram, Field::trigram}) {
        const auto& fi = field(f);
        json postings = json::object();
        for (const auto& [term, list] : fi.postings) {
            auto& arr = postings[term] = json::array();
            for (const auto& p : list) {
                arr.push_back({p.doc_id, p.tf});
            }
        }
        j["fields"][f == Field::unigram ? "unigram" : "trigram"] = {
            {"total_length", fi.total_length},
            {"avg_length", fi.avg_length},
            {"postings", std::move(postings)}};
    }
    out << j.dump() << '\n';
}

Bm25Index Bm25Index::load(std::istream& in)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(in);
        if (j.at("format") != format_name) {
            throw DataError("not a supportbench BM25 index");
        }
        if (j.at("version") != format_version) {
            throw DataError(fmt::format("unsupported index format version {} (expected {})",
                                        j.at("version").dump(), format_version));
        }

        Bm25Index index;
        const auto& params = j.at("params");
        index.m_params.k1 = params.at("k1").get<double>();
        index.m_params.b = params.at("b").get<double>();
        index.m_params.english_analysis = params.at("english_analysis").get<bool>();
        index.m_params.validate();

        const auto& docs = j.at("documents");
        index.m_docs.reserve(docs.size());
        for (const auto& d : docs) {
            IndexedDocument doc;
            doc.doc_id = d.at("doc_id").get<DocId>();
            if (doc.doc_id != index.m_docs.size()) {
                throw DataError("document ids must be dense and ordered");
            }
            doc.dialog_id = d.at("dialog_id").get<TweetId>();
            doc.turn_index = d.at("turn_index").get<std::size_t>();
            doc.question_tokens = d.at("question_tokens").get<TokenSequence>();
            doc.answer = d.at("answer").get<std::string>();
            index.m_docs.push_back(std::move(doc));
        }
        if (index.m_docs.size() != j.at("doc_count").get<std::size_t>()) {
            throw DataError("doc_count does not match the stored documents");
        }

        // Per-document term counts are restored from the postings and then
        // cross-checked against the stored statistics.
        for (auto f : {Field::unigram, Field::trigram}) {
            const auto& jf = j.at("fields").at(f == Field::unigram ? "unigram" : "trigram");
            auto& fi = f == Field::unigram ? index.m_unigrams : index.m_trigrams;
            for (const auto& [term, list] : jf.at("postings").items()) {
                auto& postings = fi.postings[term];
                postings.reserve(list.size());
                for (const auto& p : list) {
                    Posting posting{p.at(0).get<DocId>(), p.at(1).get<std::uint32_t>()};
                    if (posting.doc_id >= index.m_docs.size() || posting.tf == 0
                        || (!postings.empty() && postings.back().doc_id >= posting.doc_id)) {
                        throw DataError(fmt::format("corrupt postings for term '{}'", term));
                    }
                    auto& doc = index.m_docs[posting.doc_id];
                    (f == Field::unigram ? doc.unigram_tf : doc.trigram_tf)[term] = posting.tf;
                    (f == Field::unigram ? doc.length_uni : doc.length_tri) += posting.tf;
                    postings.push_back(posting);
                }
            }
            fi.total_length = jf.at("total_length").get<std::size_t>();
            fi.avg_length = jf.at("avg_length").get<double>();
        }

        std::size_t uni_total = 0;
        std::size_t tri_total = 0;
        for (const auto& doc : index.m_docs) {
            auto expected_tri =
                doc.question_tokens.size() >= 3 ? doc.question_tokens.size() - 2 : 0;
            if (doc.length_uni != doc.question_tokens.size() || doc.length_tri != expected_tri) {
                throw DataError(
                    fmt::format("postings disagree with the tokens of document {}", doc.doc_id));
            }
            uni_total += doc.length_uni;
            tri_total += doc.length_tri;
        }
        if (uni_total != index.m_unigrams.total_length
            || tri_total != index.m_trigrams.total_length) {
            throw DataError("stored field lengths disagree with the postings");
        }
        return index;
    } catch (const json::exception& e) {
        throw DataError(fmt::format("malformed index file: {}", e.what()));
    }
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

template <typename Visit>
void for_each_query_term(std::span<const std::string> query_tokens, Visit&& visit)
{
    for (const auto& t : query_tokens) {
        visit(Field::unigram, std::string_view(t));
    }
    for (const auto& t : word_trigrams(query_tokens)) {
        visit(Field::trigram, std::string_view(t));
    }
}

} // namespace

double bm25_score(const Bm25Index& index, std::span<const std::string> query_tokens, DocId doc_id)
{
    const auto& doc = index.document(doc_id);
    const auto& p = index.params();
    double score = 0.0;
    for_each_query_term(query_tokens, [&](Field f, std::string_view term) {
        const auto& counts = doc.tf(f);
        auto it = counts.find(std::string(term));
        if (it == counts.end()) {
            return;
        }
        score += bm25_idf(index.doc_count(), index.df(f, term))
                 * bm25_tf_weight(it->second, static_cast<double>(doc.length(f)),
                                  index.avg_length(f), p.k1, p.b);
    });
    return score;
}

std::vector<RankedAnswer> rank(const Bm25Index& index, std::span<const std::string> query_tokens,
                               std::size_t k)
{
    if (k < 1) {
        throw ConfigError("k must be at least 1");
    }
    const auto& p = index.params();
    std::vector<double> acc(index.doc_count(), 0.0);
    std::vector<DocId> touched;

    // Accumulation visits query terms in the same order as bm25_score, so
    // the two agree exactly.
    for_each_query_term(query_tokens, [&](Field f, std::string_view term) {
        auto list = index.postings(f, term);
        if (list.empty()) {
            return;
        }
        double idf = bm25_idf(index.doc_count(), list.size());
        double avg = index.avg_length(f);
        for (const auto& posting : list) {
            const auto& doc = index.document(posting.doc_id);
            if (acc[posting.doc_id] == 0.0) {
                touched.push_back(posting.doc_id);
            }
            acc[posting.doc_id] +=
                idf * bm25_tf_weight(posting.tf, static_cast<double>(doc.length(f)), avg, p.k1, p.b);
        }
    });

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    auto better = [&](DocId a, DocId b) {
        if (acc[a] != acc[b]) {
            return acc[a] > acc[b];
        }
        return a < b;
    };
    auto keep = std::min(k, touched.size());
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep),
                      touched.end(), better);

    std::vector<RankedAnswer> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        auto id = touched[i];
        out.push_back(RankedAnswer{index.document(id).answer, id, acc[id]});
    }
    return out;
}

std::vector<RankedAnswer> respond(const Bm25Index& index, std::string_view context,
                                  std::string_view question, std::size_t k)
{
    if (k < 1) {
        throw ConfigError("k must be at least 1");
    }
    return rank(index, index.analyze_query(context, question), k);
}

std::vector<std::vector<RankedAnswer>> respond_batch(const Bm25Index& index,
                                                     std::span<const Query> queries,
                                                     std::size_t k, unsigned threads)
{
    if (k < 1) {
        throw ConfigError("k must be at least 1");
    }
    std::vector<std::vector<RankedAnswer>> out(queries.size());
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(queries.size(), 1)));

    // Strided partition: each worker owns distinct output slots.
    auto work = [&](unsigned worker) {
        for (std::size_t i = worker; i < queries.size(); i += threads) {
            out[i] = respond(index, queries[i].context, queries[i].question, k);
        }
    };
    if (threads <= 1) {
        work(0);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(work, w);
        }
    }
    return out;
}

} // namespace supportbench
