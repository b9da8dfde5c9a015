#include "supportbench/harness.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "supportbench/errors.hpp"
#include "supportbench/vocabulary.hpp"

namespace supportbench {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw DataError(fmt::format("cannot create output directory '{}'", dir));
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
}

double percentile(const std::vector<std::size_t>& sorted, double q)
{
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return static_cast<double>(sorted[lo])
           + frac * (static_cast<double>(sorted[hi]) - static_cast<double>(sorted[lo]));
}

ordered_json length_json(const LengthStats& s)
{
    return {{"mean", s.mean}, {"min", s.min}, {"q1", s.q1},
            {"mode", s.mode}, {"q3", s.q3},   {"max", s.max}};
}

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string key_string(TweetId dialog, std::size_t turn) { return fmt::format("{}/{}", dialog, turn); }

// Metric settings that change scores; part of the fingerprint.
constexpr std::string_view metric_settings =
    "bleu=corpus,n=2,weights=uniform,bp=min(1,exp(1-r/c));rouge=lcs-f1;"
    "oov=skip;uncovered=excluded;greedy.weight=1;normalize=v1";

// Round-half-to-even of the shortest decimal representation, 2 places.
std::string round_two_places(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    if (ec != std::errc{}) {
        return fmt::format("{:.2f}", value);
    }
    std::string s(buf, end);
    bool negative = !s.empty() && s.front() == '-';
    if (negative) {
        s.erase(0, 1);
    }
    auto dot = s.find('.');
    std::string int_part = dot == std::string::npos ? s : s.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
    frac.resize(std::max<std::size_t>(frac.size(), 3), '0');

    std::string digits = int_part + frac.substr(0, 2);
    char decider = frac[2];
    bool rest_nonzero = frac.find_first_not_of('0', 3) != std::string::npos;
    bool round_up = decider > '5' || (decider == '5' && rest_nonzero)
                    || (decider == '5' && !rest_nonzero && ((digits.back() - '0') % 2 == 1));
    if (round_up) {
        int i = static_cast<int>(digits.size()) - 1;
        while (i >= 0 && digits[i] == '9') {
            digits[i] = '0';
            --i;
        }
        if (i < 0) {
            digits.insert(digits.begin(), '1');
        } else {
            ++digits[i];
        }
    }
    std::string out = digits.substr(0, digits.size() - 2) + "." + digits.substr(digits.size() - 2);
    if (negative && out.find_first_not_of("0.") != std::string::npos) {
        out.insert(out.begin(), '-');
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

LengthStats length_stats(std::vector<std::size_t> lengths)
{
    LengthStats s;
    if (lengths.empty()) {
        return s;
    }
    std::sort(lengths.begin(), lengths.end());
    double sum = 0.0;
    for (auto l : lengths) {
        sum += static_cast<double>(l);
    }
    s.mean = sum / static_cast<double>(lengths.size());
    s.min = static_cast<double>(lengths.front());
    s.max = static_cast<double>(lengths.back());
    s.q1 = percentile(lengths, 0.25);
    s.q3 = percentile(lengths, 0.75);

    std::size_t best_count = 0;
    for (std::size_t i = 0; i < lengths.size();) {
        std::size_t j = i;
        while (j < lengths.size() && lengths[j] == lengths[i]) {
            ++j;
        }
        if (j - i > best_count) {
            best_count = j - i;
            s.mode = static_cast<double>(lengths[i]);
        }
        i = j;
    }
    return s;
}

CorpusStats cmd_prepare(const PrepareOptions& options)
{
    options.split.validate();
    RedirectFilter filter(options.redirect_patterns);
    if (options.vocab_size < 1) {
        throw ConfigError("vocabulary size must be at least 1");
    }

    std::ifstream in(options.csv_path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", options.csv_path));
    }

    CorpusStats stats;
    auto parsed = parse_tweet_stream(in, options.row_policy);
    stats.tweets = parsed.tweets.size();
    stats.skipped_rows = parsed.errors.size();

    auto threaded = thread_conversations(parsed.tweets, options.split.brand);
    stats.threading_warnings = threaded.warnings.size();
    stats.dialogs = threaded.dialogs.size();

    std::vector<DialogTuple> tuples;
    std::size_t turn_total = 0;
    for (const auto& d : threaded.dialogs) {
        auto n = d.turns.size();
        turn_total += n;
        stats.min_turns = stats.min_turns == 0 ? n : std::min(stats.min_turns, n);
        stats.max_turns = std::max(stats.max_turns, n);
        auto extracted = extract_dialog_tuples(d);
        tuples.insert(tuples.end(), std::make_move_iterator(extracted.begin()),
                      std::make_move_iterator(extracted.end()));
    }
    stats.avg_turns = stats.dialogs ? static_cast<double>(turn_total)
                                          / static_cast<double>(stats.dialogs)
                                    : 0.0;
    stats.extracted_tuples = tuples.size();

    auto filtered = filter_redirects(std::move(tuples), filter);
    stats.redirects_removed = filtered.removed;

    auto split = temporal_split(filtered.kept, options.split);
    stats.train_tuples = split.train.size();
    stats.test_tuples = split.test.size();
    stats.out_of_window = filtered.kept.size() - stats.train_tuples - stats.test_tuples;

    std::vector<std::size_t> q_len;
    std::vector<std::size_t> a_len;
    std::unordered_set<std::string> words;
    for (const auto* part : {&split.train, &split.test}) {
        for (const auto& t : *part) {
            auto q = normalize_text(t.question);
            auto a = normalize_text(t.answer);
            q_len.push_back(q.size());
            a_len.push_back(a.size());
            words.insert(q.begin(), q.end());
            words.insert(a.begin(), a.end());
        }
    }
    stats.distinct_words = words.size();
    stats.question_words = length_stats(std::move(q_len));
    stats.answer_words = length_stats(std::move(a_len));

    std::vector<TokenSequence> vocab_corpus;
    vocab_corpus.reserve(split.train.size() * 2);
    for (const auto& t : split.train) {
        vocab_corpus.push_back(normalize_text(t.context + " " + t.question));
        vocab_corpus.push_back(normalize_text(t.answer));
    }
    auto vocab = Vocabulary::build(vocab_corpus, options.vocab_size);

    ensure_dir(options.out_dir);
    fs::path dir(options.out_dir);
    write_tuples_file((dir / "train.jsonl").string(), split.train);
    write_tuples_file((dir / "test.jsonl").string(), split.test);
    std::ostringstream vocab_text;
    vocab.save(vocab_text);
    write_text(dir / "vocab.txt", vocab_text.str());
    write_text(dir / "stats.json", stats_to_json(stats));
    return stats;
}

std::string stats_to_json(const CorpusStats& s)
{
    ordered_json j;
    j["tweets"] = s.tweets;
    j["skipped_rows"] = s.skipped_rows;
    j["threading_warnings"] = s.threading_warnings;
    j["dialogs"] = s.dialogs;
    j["turns_per_dialog"] = {{"min", s.min_turns}, {"max", s.max_turns}, {"mean", s.avg_turns}};
    j["extracted_tuples"] = s.extracted_tuples;
    j["redirects_removed"] = s.redirects_removed;
    j["out_of_window"] = s.out_of_window;
    j["dialog_tuples"] = s.train_tuples + s.test_tuples;
    j["train_tuples"] = s.train_tuples;
    j["test_tuples"] = s.test_tuples;
    j["distinct_words"] = s.distinct_words;
    j["question_words"] = length_json(s.question_words);
    j["answer_words"] = length_json(s.answer_words);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::vector<ResponseRecord> respond_ir(const Bm25Index& index, std::span<const DialogTuple> test,
                                       const std::string& fallback, unsigned threads)
{
    std::vector<Query> queries;
    queries.reserve(test.size());
    for (const auto& t : test) {
        queries.push_back({t.context, t.question});
    }
    auto ranked = respond_batch(index, queries, 1, threads);

    std::vector<ResponseRecord> out;
    out.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto& t = test[i];
        out.push_back(ResponseRecord{t.dialog_id, t.turn_index, t.context, t.question, t.answer,
                                     ranked[i].empty() ? fallback : ranked[i].front().answer,
                                     std::string(ir_system_name)});
    }
    return out;
}

std::size_t cmd_respond_ir(const RespondOptions& options)
{
    options.params.validate();
    auto train = read_tuples_file(options.train_path);
    auto test = read_tuples_file(options.test_path);
    if (train.empty()) {
        throw DataError(fmt::format("training split '{}' is empty", options.train_path));
    }
    auto index = Bm25Index::build(train, options.params);
    if (options.index_out) {
        std::ofstream out(*options.index_out, std::ios::binary);
        index.save(out);
        if (!out) {
            throw DataError(fmt::format("cannot write '{}'", *options.index_out));
        }
    }
    auto records = respond_ir(index, test, options.fallback, options.threads);
    write_responses_file(options.out_path, records);
    return records.size();
}

// ---------------------------------------------------------------------------

std::string report_to_json(const EvaluationReport& r)
{
    ordered_json j;
    j["system"] = r.system;
    j["scores"] = {{"bleu2", r.bleu2},
                   {"rouge_l", r.rouge_l},
                   {"embedding_average", r.embedding_average},
                   {"greedy_matching", r.greedy_matching},
                   {"vector_extrema", r.vector_extrema}};
    j["per_pair"] = {{"sentence_bleu2_mean", r.sentence_bleu2_mean},
                     {"sentence_bleu2_stddev", r.sentence_bleu2_stddev},
                     {"rouge_l_stddev", r.rouge_l_stddev},
                     {"embedding_average_stddev", r.embedding_average_stddev},
                     {"greedy_matching_stddev", r.greedy_matching_stddev},
                     {"vector_extrema_stddev", r.vector_extrema_stddev}};
    j["pairs"] = r.pairs;
    j["covered"] = r.covered;
    j["uncovered"] = r.uncovered;
    j["pair_file"] = r.pair_file;
    j["fingerprint"] = r.fingerprint;
    return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text)
{
    try {
        auto j = ordered_json::parse(text);
        EvaluationReport r;
        r.system = j.at("system").get<std::string>();
        const auto& s = j.at("scores");
        r.bleu2 = s.at("bleu2").get<double>();
        r.rouge_l = s.at("rouge_l").get<double>();
        r.embedding_average = s.at("embedding_average").get<double>();
        r.greedy_matching = s.at("greedy_matching").get<double>();
        r.vector_extrema = s.at("vector_extrema").get<double>();
        const auto& p = j.at("per_pair");
        r.sentence_bleu2_mean = p.at("sentence_bleu2_mean").get<double>();
        r.sentence_bleu2_stddev = p.at("sentence_bleu2_stddev").get<double>();
        r.rouge_l_stddev = p.at("rouge_l_stddev").get<double>();
        r.embedding_average_stddev = p.at("embedding_average_stddev").get<double>();
        r.greedy_matching_stddev = p.at("greedy_matching_stddev").get<double>();
        r.vector_extrema_stddev = p.at("vector_extrema_stddev").get<double>();
        r.pairs = j.at("pairs").get<std::size_t>();
        r.covered = j.at("covered").get<std::size_t>();
        r.uncovered = j.at("uncovered").get<std::size_t>();
        r.pair_file = j.at("pair_file").get<std::string>();
        r.fingerprint = j.at("fingerprint").get<std::string>();
        return r;
    } catch (const ordered_json::exception& e) {
        throw DataError(fmt::format("malformed evaluation report: {}", e.what()));
    }
}

void check_coverage(std::span<const ResponseRecord> responses,
                    std::optional<std::span<const DialogTuple>> test)
{
    static constexpr std::size_t max_listed = 10;
    auto list = [](const std::vector<std::string>& keys) {
        std::string s;
        for (std::size_t i = 0; i < std::min(keys.size(), max_listed); ++i) {
            s += (i ? ", " : "") + keys[i];
        }
        if (keys.size() > max_listed) {
            s += fmt::format(", ... ({} total)", keys.size());
        }
        return s;
    };

    std::vector<std::string> problems;
    if (responses.empty()) {
        problems.emplace_back("no responses");
    }

    std::set<std::pair<TweetId, std::size_t>> seen;
    std::vector<std::string> duplicates;
    std::set<std::string> systems;
    for (const auto& r : responses) {
        if (!seen.emplace(r.dialog_id, r.turn_index).second) {
            duplicates.push_back(key_string(r.dialog_id, r.turn_index));
        }
        systems.insert(r.system);
    }
    if (!duplicates.empty()) {
        problems.push_back("duplicate keys: " + list(duplicates));
    }
    if (systems.size() > 1) {
        problems.push_back(fmt::format("responses mix {} system names", systems.size()));
    }

    if (test) {
        std::set<std::pair<TweetId, std::size_t>> expected;
        std::vector<std::string> missing;
        for (const auto& t : *test) {
            expected.emplace(t.dialog_id, t.turn_index);
            if (!seen.contains({t.dialog_id, t.turn_index})) {
                missing.push_back(key_string(t.dialog_id, t.turn_index));
            }
        }
        std::vector<std::string> unexpected;
        for (const auto& [d, turn] : seen) {
            if (!expected.contains({d, turn})) {
                unexpected.push_back(key_string(d, turn));
            }
        }
        if (!missing.empty()) {
            problems.push_back("missing keys: " + list(missing));
        }
        if (!unexpected.empty()) {
            problems.push_back("keys not in the test split: " + list(unexpected));
        }
    }

    if (!problems.empty()) {
        std::string msg = "responses do not cover the test split exactly";
        for (const auto& p : problems) {
            msg += "\n  " + p;
        }
        throw DataError(msg);
    }
}

std::string config_fingerprint(std::span<const ResponseRecord> responses,
                               const EmbeddingTable& table)
{
    std::vector<const ResponseRecord*> sorted;
    sorted.reserve(responses.size());
    for (const auto& r : responses) {
        sorted.push_back(&r);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return std::tie(a->dialog_id, a->turn_index) < std::tie(b->dialog_id, b->turn_index);
    });
    std::string material(metric_settings);
    material += fmt::format(";embeddings={}x{}\n", table.size(), table.dimension());
    for (const auto* r : sorted) {
        material += fmt::format("{}\t{}\t{}\t{}\n", r->dialog_id, r->turn_index,
                                r->gold_answer.size(), r->gold_answer);
    }
    return "sha256:" + sha256_hex(material);
}

EvaluationReport evaluate_responses(std::span<const ResponseRecord> responses,
                                    const EmbeddingTable& table, CorpusScores* detail,
                                    unsigned threads)
{
    check_coverage(responses, std::nullopt);
    std::vector<TokenSequence> candidates;
    std::vector<TokenSequence> references;
    candidates.reserve(responses.size());
    references.reserve(responses.size());
    for (const auto& r : responses) {
        candidates.push_back(normalize_text(r.response));
        references.push_back(normalize_text(r.gold_answer));
    }
    auto scores = score_corpus(candidates, references, table, threads);

    EvaluationReport report;
    report.system = responses.front().system;
    report.bleu2 = 100.0 * scores.bleu2;
    report.rouge_l = 100.0 * scores.rouge_l.mean;
    report.embedding_average = 100.0 * scores.embedding_average.mean;
    report.greedy_matching = 100.0 * scores.greedy_matching.mean;
    report.vector_extrema = 100.0 * scores.vector_extrema.mean;
    report.sentence_bleu2_mean = 100.0 * scores.sentence_bleu2.mean;
    report.sentence_bleu2_stddev = 100.0 * scores.sentence_bleu2.stddev;
    report.rouge_l_stddev = 100.0 * scores.rouge_l.stddev;
    report.embedding_average_stddev = 100.0 * scores.embedding_average.stddev;
    report.greedy_matching_stddev = 100.0 * scores.greedy_matching.stddev;
    report.vector_extrema_stddev = 100.0 * scores.vector_extrema.stddev;
    report.pairs = scores.pairs;
    report.uncovered = scores.uncovered;
    report.covered = scores.pairs - scores.uncovered;
    report.fingerprint = config_fingerprint(responses, table);
    if (detail) {
        *detail = std::move(scores);
    }
    return report;
}

EvaluationReport cmd_evaluate(const EvaluateOptions& options)
{
    auto responses = read_responses_file(options.responses_path);
    std::optional<std::vector<DialogTuple>> test;
    if (options.test_path) {
        test = read_tuples_file(*options.test_path);
    }
    check_coverage(responses, test ? std::optional<std::span<const DialogTuple>>(*test)
                                   : std::nullopt);
    auto table = EmbeddingTable::load_file(options.embeddings_path);

    CorpusScores detail;
    auto report = evaluate_responses(responses, table, &detail, options.threads);
    report.pair_file = "pairs.jsonl";

    ensure_dir(options.out_dir);
    fs::path dir(options.out_dir);
    std::ostringstream pairs;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const auto& p = detail.per_pair[i];
        ordered_json j;
        j["dialog_id"] = responses[i].dialog_id;
        j["turn_index"] = responses[i].turn_index;
        j["bleu2"] = p.bleu2;
        j["rouge_l"] = p.rouge_l;
        j["embedding_average"] = p.embedding_average.value;
        j["greedy_matching"] = p.greedy_matching.value;
        j["vector_extrema"] = p.vector_extrema.value;
        j["uncovered"] = {{"embedding_average", !p.embedding_average.covered},
                          {"greedy_matching", !p.greedy_matching.covered},
                          {"vector_extrema", !p.vector_extrema.covered}};
        pairs << j.dump() << '\n';
    }
    write_text(dir / report.pair_file, pairs.str());
    write_text(dir / "report.json", report_to_json(report));
    return report;
}

// ---------------------------------------------------------------------------

std::string format_score(double fraction) { return round_two_places(100.0 * fraction); }

RenderedTables cmd_report(std::span<const EvaluationReport> reports)
{
    static constexpr std::array<std::string_view, 6> headers = {
        "System", "BLEU@2", "ROUGE-L", "Emb. Average", "Greedy Matching", "Vector Extrema"};

    std::vector<std::array<std::string, 6>> rows;
    for (const auto& r : reports) {
        rows.push_back({r.system, round_two_places(r.bleu2), round_two_places(r.rouge_l),
                        round_two_places(r.embedding_average),
                        round_two_places(r.greedy_matching),
                        round_two_places(r.vector_extrema)});
    }
    std::array<std::size_t, 6> width{};
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& row : rows) {
            width[c] = std::max(width[c], row[c].size());
        }
    }

    RenderedTables out;
    auto emit = [&](auto cell_at) {
        std::string line;
        for (std::size_t c = 0; c < headers.size(); ++c) {
            std::string_view cell = cell_at(c);
            if (c == 0) {
                line += fmt::format("{:<{}}", cell, width[c]);
            } else {
                line += fmt::format("  {:>{}}", cell, width[c]);
            }
        }
        out.text += line + "\n";
    };
    emit([&](std::size_t c) { return headers[c]; });
    std::size_t total = width[0];
    for (std::size_t c = 1; c < width.size(); ++c) {
        total += 2 + width[c];
    }
    out.text += std::string(total, '-') + "\n";
    for (const auto& row : rows) {
        emit([&](std::size_t c) { return std::string_view(row[c]); });
    }

    std::set<std::string> fingerprints;
    for (const auto& r : reports) {
        fingerprints.insert(r.fingerprint);
    }
    if (fingerprints.size() > 1) {
        out.text += "note: reports come from different splits or metric settings\n";
    }

    out.csv = "system,bleu2,rouge_l,embedding_average,greedy_matching,vector_extrema\n";
    for (const auto& row : rows) {
        std::string system = row[0];
        if (system.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : system) {
                quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            }
            system = quoted + "\"";
        }
        out.csv += fmt::format("{},{},{},{},{},{}\n", system, row[1], row[2], row[3], row[4],
                               row[5]);
    }
    return out;
}

} // namespace supportbench
