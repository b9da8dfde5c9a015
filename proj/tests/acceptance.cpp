// Acceptance checks: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance                 run everything; exit 1 if any check fails
//   acceptance --only NAME     run one check; exit 77 if it was skipped

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sys/wait.h>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "supportbench/harness.hpp"

using namespace supportbench;
using fixtures::day;
using fixtures::tuple;

namespace {

enum class Outcome { pass, fail, skip };

struct Result {
    Outcome outcome;
    std::string detail;
};

Result pass(std::string detail) { return {Outcome::pass, std::move(detail)}; }
Result fail(std::string detail) { return {Outcome::fail, std::move(detail)}; }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Result metric_oracle()
{
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20190501);
    std::size_t checks = 0;
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        auto inst = oracle::random_instance(rng);
        auto table = oracle::to_table(inst);
        std::vector<TokenSequence> cs(inst.cands.begin(), inst.cands.end());
        std::vector<TokenSequence> rs(inst.refs.begin(), inst.refs.end());
        auto track = [&](double got, double want) {
            worst = std::max(worst, std::abs(got - want));
            ++checks;
        };
        track(bleu2(cs, rs, BleuMode::corpus), oracle::corpus_bleu2(inst.cands, inst.refs));
        for (std::size_t p = 0; p < cs.size(); ++p) {
            const auto& c = inst.cands[p];
            const auto& r = inst.refs[p];
            track(rouge_l(c, r), oracle::rouge_l(c, r));
            track(embedding_average(c, r, table).value, oracle::embedding_average(c, r, inst.table));
            track(greedy_matching(c, r, table).value, oracle::greedy_matching(c, r, inst.table));
            track(vector_extrema(c, r, table).value, oracle::vector_extrema(c, r, inst.table));
        }
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto detail = fmt::format("1000 instances, {} comparisons, max |diff| {:.2e}, {:.2f} s", checks,
                              worst, seconds);
    return worst <= 1e-9 && seconds < 10.0 ? pass(detail) : fail(detail);
}

Result hand_values()
{
    EmbeddingTable t(2);
    t.add("a", std::vector<float>{1, 0});
    t.add("b", std::vector<float>{0, 1});
    using T = TokenSequence;
    std::vector<T> cand{{"the", "cat", "sat"}};
    std::vector<T> ref{{"the", "cat", "sat", "down"}};

    struct Check {
        const char* name;
        double got;
        double want;
        double tol;
    };
    const Check checks[] = {
        {"rouge_l", rouge_l(T{"a", "b", "c", "d"}, T{"a", "c", "d"}), 6.0 / 7.0, 1e-9},
        {"bleu2", bleu2(cand, ref, BleuMode::corpus), std::exp(1.0 - 4.0 / 3.0), 1e-6},
        {"greedy(ab,a)", greedy_directional(T{"a", "b"}, T{"a"}, t).value, 0.5, 1e-9},
        {"greedy(a,ab)", greedy_directional(T{"a"}, T{"a", "b"}, t).value, 1.0, 1e-9},
        {"simGreedy", greedy_matching(T{"a", "b"}, T{"a"}, t).value, 0.75, 1e-9},
        {"vector_extrema", vector_extrema(T{"a", "b"}, T{"a"}, t).value, 1.0 / std::sqrt(2.0), 1e-9},
        {"embedding_average", embedding_average(T{"a"}, T{"a", "b"}, t).value,
         1.0 / std::sqrt(2.0), 1e-9},
    };
    std::string bad;
    for (const auto& c : checks) {
        if (!near(c.got, c.want, c.tol)) {
            bad += fmt::format(" {}={:.12f} (want {:.12f})", c.name, c.got, c.want);
        }
    }
    auto extrema = extrema_vector(std::vector<std::vector<double>>{{1, -3}, {2, 1}});
    if (extrema != std::vector<double>{2, -3}) {
        bad += " extrema_vector";
    }
    if (!bad.empty()) {
        return fail("mismatch:" + bad);
    }
    return pass(fmt::format("rouge_l {:.9f}, bleu2 {:.6f}, simGreedy {:.3f}, extrema cos {:.6f}",
                            checks[0].got, checks[1].got, checks[4].got, checks[5].got));
}

Result bm25_fixture()
{
    std::vector<DialogTuple> train{
        tuple(1, 1, "", "my iphone battery drains fast", "try low power mode", day(0)),
        tuple(2, 1, "hello there", "battery is not charging at all", "check the cable", day(1)),
        tuple(3, 3, "earlier turn", "screen cracked and battery swollen battery",
              "visit an apple store", day(2))};
    auto index = Bm25Index::build(train, Bm25Params{1.2, 0.75});
    oracle::Bm25Corpus corpus;
    for (const auto& t : train) {
        auto tokens = index.analyze(t.context + " " + t.question);
        corpus.unigram_docs.push_back(tokens);
        corpus.trigram_docs.push_back(oracle::trigrams(tokens));
    }
    double worst = 0;
    for (const auto* q : {"battery drains fast", "battery battery not charging at all",
                          "screen cracked and battery", "hello there battery is not charging"}) {
        auto query = index.analyze(q);
        for (DocId d = 0; d < 3; ++d) {
            worst = std::max(worst, std::abs(bm25_score(index, query, d) - oracle::bm25(corpus, query, d)));
        }
    }
    auto top = respond(index, "hello there", "battery is not charging at all");
    bool duplicate_ok = !top.empty() && top[0].answer == "check the cable";
    auto detail = fmt::format("max |score - formula| {:.2e}; duplicate question rank-1 answer '{}'",
                              worst, top.empty() ? "" : top[0].answer);
    return worst <= 1e-9 && duplicate_ok ? pass(detail) : fail(detail);
}

Result split_integrity()
{
    std::vector<DialogTuple> ts;
    for (int d = 0; d < 70; ++d) {
        ts.push_back(tuple(d + 1, 1, "", "q", "a", day(d)));
    }
    SplitConfig cfg;
    cfg.brand = "B";
    auto s = temporal_split(ts, cfg);
    Timestamp max_train{};
    Timestamp min_test = Timestamp::max();
    for (const auto& t : s.train) {
        max_train = std::max(max_train, t.answer_time);
    }
    for (const auto& t : s.test) {
        min_test = std::min(min_test, t.answer_time);
    }
    auto detail = fmt::format("train {}, test {}, max(train) {} < min(test) {}", s.train.size(),
                              s.test.size(), format_iso8601(max_train), format_iso8601(min_test));
    return s.test.size() == 5 && s.train.size() == 55 && max_train < min_test ? pass(detail)
                                                                               : fail(detail);
}

// Runs the command line tool; returns its exit status.
int cli(const std::string& args)
{
    std::string cmd = std::string(SUPPORTBENCH_CLI) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Result identity_upper_bound()
{
    fixtures::TempDir dir("acc-identity");
    fixtures::write_file(dir.path() / "dump.csv", fixtures::synthetic_csv(70, 3));
    PrepareOptions prep;
    prep.csv_path = dir / "dump.csv";
    prep.out_dir = dir / "prep";
    prep.split.brand = "BrandSupport";
    cmd_prepare(prep);

    std::vector<ResponseRecord> gold;
    for (const auto& t : read_tuples_file(dir / "prep/test.jsonl")) {
        gold.push_back({t.dialog_id, t.turn_index, t.context, t.question, t.answer, t.answer,
                        "gold"});
    }
    write_responses_file(dir / "gold.jsonl", gold);
    EvaluateOptions eval;
    eval.responses_path = dir / "gold.jsonl";
    eval.embeddings_path = fixtures::test_data("embeddings50.txt");
    eval.out_dir = dir / "eval";
    eval.test_path = dir / "prep/test.jsonl";
    auto r = cmd_evaluate(eval);
    auto table = cmd_report(std::span(&r, 1));

    const double values[] = {r.bleu2, r.rouge_l, r.embedding_average, r.greedy_matching,
                             r.vector_extrema};
    bool ok = r.uncovered == 0 && r.pairs == gold.size();
    std::string shown;
    for (double v : values) {
        auto s = format_score(v / 100.0);
        ok = ok && s == "100.00";
        shown += (shown.empty() ? "" : " ") + s;
    }
    ok = ok && table.csv.find("gold,100.00,100.00,100.00,100.00,100.00") != std::string::npos;
    auto detail = fmt::format("{} pairs, {} uncovered, scores {}", r.pairs, r.uncovered, shown);
    return ok ? pass(detail) : fail(detail);
}

Result determinism()
{
    fixtures::TempDir dir("acc-determinism");
    fixtures::write_file(dir.path() / "dump.csv", fixtures::synthetic_csv(70, 3));
    const auto embeddings = fixtures::test_data("embeddings50.txt");

    auto run = [&](const std::string& tag, const std::string& threads) {
        auto base = dir / tag;
        int rc = cli(fmt::format("prepare --csv {} --brand BrandSupport --train-days 60 "
                                 "--test-days 5 --out {}",
                                 dir / "dump.csv", base));
        rc = rc ? rc
                : cli(fmt::format("{} respond-ir --train {}/train.jsonl --test {}/test.jsonl "
                                  "--k1 1.2 --b 0.75 --fallback '' --out {}/responses.jsonl",
                                  threads, base, base, base));
        rc = rc ? rc
                : cli(fmt::format("{} evaluate --responses {}/responses.jsonl --embeddings {} "
                                  "--out {}/eval",
                                  threads, base, embeddings, base));
        rc = rc ? rc : cli(fmt::format("report --in {}/eval/report.json --csv {}/table.csv", base, base));
        return rc;
    };
    if (int rc = run("one", "--threads 1"); rc != 0) {
        return fail(fmt::format("first pipeline run exited with {}", rc));
    }
    if (int rc = run("two", "--threads 4"); rc != 0) {
        return fail(fmt::format("second pipeline run exited with {}", rc));
    }
    std::string differing;
    for (const auto* file : {"train.jsonl", "test.jsonl", "vocab.txt", "stats.json",
                             "responses.jsonl", "eval/pairs.jsonl", "eval/report.json",
                             "table.csv"}) {
        auto a = fixtures::read_file(dir.path() / "one" / file);
        auto b = fixtures::read_file(dir.path() / "two" / file);
        if (a.empty() || a != b) {
            differing += std::string(" ") + file;
        }
    }
    if (!differing.empty()) {
        return fail("outputs differ:" + differing);
    }
    return pass("two CLI runs (1 and 4 threads): splits, responses, pair scores, report and "
                "table byte-identical");
}

Result full_dump()
{
    const char* path = std::getenv("SUPPORTBENCH_TWCS_CSV");
    if (path == nullptr || *path == '\0') {
        return {Outcome::skip, "set SUPPORTBENCH_TWCS_CSV to the Kaggle twcs.csv to run"};
    }
    fixtures::TempDir dir("acc-dump");
    PrepareOptions prep;
    prep.csv_path = path;
    prep.out_dir = dir / "prep";
    prep.split.brand = "AppleSupport";
    auto s = cmd_prepare(prep);
    auto detail = fmt::format("tuples {} (want 49626), train {} (want 45582), test {} (want 4044), "
                              "mean turns {:.2f}",
                              s.train_tuples + s.test_tuples, s.train_tuples, s.test_tuples,
                              s.avg_turns);
    bool ok = s.train_tuples + s.test_tuples == 49626 && s.train_tuples == 45582
              && s.test_tuples == 4044;
    return ok ? pass(detail) : fail(detail);
}

struct Criterion {
    const char* name;
    const char* title;
    std::function<Result()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria = {
        {"metric-oracle", "metric oracle equivalence", metric_oracle},
        {"hand-values", "hand-computed metric values", hand_values},
        {"bm25", "BM25 formula and duplicate retrieval", bm25_fixture},
        {"identity", "identity upper bound", identity_upper_bound},
        {"split", "split integrity", split_integrity},
        {"determinism", "pipeline determinism", determinism},
        {"full-dump", "full dump statistics", full_dump},
    };

    std::string only;
    if (argc == 3 && std::string(argv[1]) == "--only") {
        only = argv[2];
    } else if (argc != 1) {
        std::cerr << "usage: acceptance [--only NAME]\n";
        return 2;
    }

    int failures = 0;
    int ran = 0;
    bool skipped = false;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.name) {
            continue;
        }
        ++ran;
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = fail(std::string("exception: ") + e.what());
        }
        const char* label = r.outcome == Outcome::pass ? "PASS"
                            : r.outcome == Outcome::fail ? "FAIL"
                                                         : "SKIP";
        std::cout << fmt::format("{} {:<12} {}: {}\n", label, c.name, c.title, r.detail);
        failures += r.outcome == Outcome::fail;
        skipped = skipped || r.outcome == Outcome::skip;
    }
    if (ran == 0) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    if (failures > 0) {
        return 1;
    }
    return !only.empty() && skipped ? 77 : 0;
}
