#include "supportbench/jsonl.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "supportbench/errors.hpp"

namespace supportbench {

namespace {

using nlohmann::ordered_json;

template <typename Parse>
auto read_lines(std::istream& in, Parse&& parse)
{
    std::vector<decltype(parse(std::declval<const ordered_json&>()))> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            out.push_back(parse(ordered_json::parse(line)));
        } catch (const ordered_json::exception& e) {
            throw FormatError(line_no, e.what());
        } catch (const DataError& e) {
            throw FormatError(line_no, e.what());
        }
    }
    return out;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path));
    }
    return out;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path));
    }
    return in;
}

template <typename Read>
auto read_file(const std::string& path, Read&& read)
{
    auto in = open_in(path);
    try {
        return read(in);
    } catch (const FormatError& e) {
        throw DataError(fmt::format("{}: {}", path, e.what()));
    }
}

} // namespace

void write_tuples(std::ostream& out, std::span<const DialogTuple> tuples)
{
    for (const auto& t : tuples) {
        ordered_json j;
        j["dialog_id"] = t.dialog_id;
        j["turn_index"] = t.turn_index;
        j["context"] = t.context;
        j["question"] = t.question;
        j["answer"] = t.answer;
        j["answer_time"] = format_iso8601(t.answer_time);
        out << j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
    }
}

std::vector<DialogTuple> read_tuples(std::istream& in)
{
    return read_lines(in, [](const ordered_json& j) {
        DialogTuple t;
        t.dialog_id = j.at("dialog_id").get<TweetId>();
        t.turn_index = j.at("turn_index").get<std::size_t>();
        t.context = j.at("context").get<std::string>();
        t.question = j.at("question").get<std::string>();
        t.answer = j.at("answer").get<std::string>();
        auto time = j.at("answer_time").get<std::string>();
        auto parsed = parse_iso8601(time);
        if (!parsed) {
            throw DataError(fmt::format("invalid answer_time '{}'", time));
        }
        t.answer_time = *parsed;
        return t;
    });
}

void write_responses(std::ostream& out, std::span<const ResponseRecord> records)
{
    for (const auto& r : records) {
        ordered_json j;
        j["dialog_id"] = r.dialog_id;
        j["turn_index"] = r.turn_index;
        j["context"] = r.context;
        j["question"] = r.question;
        j["gold_answer"] = r.gold_answer;
        j["response"] = r.response;
        j["system"] = r.system;
        out << j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
    }
}

std::vector<ResponseRecord> read_responses(std::istream& in)
{
    return read_lines(in, [](const ordered_json& j) {
        ResponseRecord r;
        r.dialog_id = j.at("dialog_id").get<TweetId>();
        r.turn_index = j.at("turn_index").get<std::size_t>();
        r.context = j.value("context", "");
        r.question = j.value("question", "");
        r.gold_answer = j.at("gold_answer").get<std::string>();
        r.response = j.at("response").get<std::string>();
        r.system = j.at("system").get<std::string>();
        return r;
    });
}

void write_tuples_file(const std::string& path, std::span<const DialogTuple> tuples)
{
    auto out = open_out(path);
    write_tuples(out, tuples);
    if (!out) {
        throw DataError(fmt::format("failed writing '{}'", path));
    }
}

std::vector<DialogTuple> read_tuples_file(const std::string& path)
{
    return read_file(path, [](std::istream& in) { return read_tuples(in); });
}

void write_responses_file(const std::string& path, std::span<const ResponseRecord> records)
{
    auto out = open_out(path);
    write_responses(out, records);
    if (!out) {
        throw DataError(fmt::format("failed writing '{}'", path));
    }
}

std::vector<ResponseRecord> read_responses_file(const std::string& path)
{
    return read_file(path, [](std::istream& in) { return read_responses(in); });
}

} // namespace supportbench
