// Command line front end: prepare, respond-ir, evaluate, report.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "supportbench/errors.hpp"
#include "supportbench/harness.hpp"

namespace sb = supportbench;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw sb::DataError(fmt::format("cannot open '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_prepare_summary(const sb::CorpusStats& s)
{
    std::cout << fmt::format("tweets parsed        {}\n", s.tweets)
              << fmt::format("rows skipped         {}\n", s.skipped_rows)
              << fmt::format("dialogs              {} (turns {}-{}, mean {:.2f})\n", s.dialogs,
                             s.min_turns, s.max_turns, s.avg_turns)
              << fmt::format("tuples extracted     {}\n", s.extracted_tuples)
              << fmt::format("redirects removed    {}\n", s.redirects_removed)
              << fmt::format("outside both windows {}\n", s.out_of_window)
              << fmt::format("train / test         {} / {}\n", s.train_tuples, s.test_tuples);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Customer support dialog benchmark"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    sb::PrepareOptions prep;
    std::vector<std::string> patterns;
    bool abort_on_bad_row = false;
    auto* prepare = app.add_subcommand("prepare", "Build train/test splits from a CSV dump");
    prepare->add_option("--csv", prep.csv_path, "Input CSV")->required();
    prepare->add_option("--brand", prep.split.brand, "Support account name")->required();
    prepare->add_option("--train-days", prep.split.train_window_days)->capture_default_str();
    prepare->add_option("--test-days", prep.split.test_window_days)->capture_default_str();
    prepare->add_option("--out", prep.out_dir, "Output directory")->required();
    prepare->add_option("--vocab-size", prep.vocab_size)->capture_default_str();
    prepare->add_option("--redirect-pattern", patterns,
                        "Regex for answers that redirect to private channels (repeatable)");
    prepare->add_flag("--abort-on-bad-row", abort_on_bad_row);

    sb::RespondOptions resp;
    std::string index_out;
    auto* respond = app.add_subcommand("respond-ir", "Answer test questions with BM25 retrieval");
    respond->add_option("--train", resp.train_path)->required();
    respond->add_option("--test", resp.test_path)->required();
    respond->add_option("--k1", resp.params.k1)->capture_default_str();
    respond->add_option("--b", resp.params.b)->capture_default_str();
    respond->add_option("--fallback", resp.fallback, "Answer when nothing matches");
    respond->add_flag("--english", resp.params.english_analysis,
                      "Stop-word removal and plural stemming");
    respond->add_option("--index-out", index_out, "Also save the index as JSON");
    respond->add_option("--out", resp.out_path)->required();

    sb::EvaluateOptions eval;
    std::string eval_test;
    auto* evaluate = app.add_subcommand("evaluate", "Score a responses file");
    evaluate->add_option("--responses", eval.responses_path)->required();
    evaluate->add_option("--embeddings", eval.embeddings_path,
                         "word2vec text or binary (.bin) file")
        ->required();
    evaluate->add_option("--test", eval_test, "Test split to check coverage against");
    evaluate->add_option("--out", eval.out_dir)->required();

    std::vector<std::string> report_inputs;
    std::string csv_out;
    auto* report = app.add_subcommand("report", "Tabulate evaluation reports");
    report->add_option("--in", report_inputs, "report.json files")->required();
    report->add_option("--csv", csv_out, "Also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (prepare->parsed()) {
            if (!patterns.empty()) {
                prep.redirect_patterns = patterns;
            }
            prep.row_policy = abort_on_bad_row ? sb::RowPolicy::abort : sb::RowPolicy::skip;
            print_prepare_summary(sb::cmd_prepare(prep));
        } else if (respond->parsed()) {
            if (!index_out.empty()) {
                resp.index_out = index_out;
            }
            resp.threads = threads;
            auto n = sb::cmd_respond_ir(resp);
            std::cout << fmt::format("wrote {} responses to {}\n", n, resp.out_path);
        } else if (evaluate->parsed()) {
            if (!eval_test.empty()) {
                eval.test_path = eval_test;
            }
            eval.threads = threads;
            auto r = sb::cmd_evaluate(eval);
            std::cout << sb::cmd_report(std::span(&r, 1)).text;
            if (r.uncovered > 0) {
                std::cout << fmt::format("{} of {} pairs had no embedded tokens on one side\n",
                                         r.uncovered, r.pairs);
            }
        } else if (report->parsed()) {
            std::vector<sb::EvaluationReport> reports;
            for (const auto& path : report_inputs) {
                try {
                    reports.push_back(sb::report_from_json(read_file(path)));
                } catch (const sb::DataError& e) {
                    throw sb::DataError(fmt::format("{}: {}", path, e.what()));
                }
            }
            auto tables = sb::cmd_report(reports);
            std::cout << tables.text;
            if (!csv_out.empty()) {
                std::ofstream out(csv_out, std::ios::binary);
                out << tables.csv;
                if (!out) {
                    throw sb::DataError(fmt::format("cannot write '{}'", csv_out));
                }
            }
        }
    } catch (const sb::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const sb::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return 0;
}
