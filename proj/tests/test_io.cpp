#include <gtest/gtest.h>

#include <bit>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "supportbench/embeddings.hpp"
#include "supportbench/errors.hpp"
#include "supportbench/jsonl.hpp"

using namespace supportbench;

namespace {

struct FixtureRow {
    std::string word;
    std::vector<float> values;
};

// Independent reader for the fixture: whitespace split plus strtof.
std::vector<FixtureRow> read_fixture_rows()
{
    std::ifstream in(fixtures::test_data("embeddings50.txt"));
    std::string line;
    std::getline(in, line); // header
    std::vector<FixtureRow> rows;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        FixtureRow row;
        ls >> row.word;
        std::string num;
        while (ls >> num) {
            row.values.push_back(std::strtof(num.c_str(), nullptr));
        }
        rows.push_back(row);
    }
    return rows;
}

void expect_bitwise(const EmbeddingTable& table, const std::vector<FixtureRow>& rows)
{
    ASSERT_EQ(table.size(), rows.size());
    for (const auto& row : rows) {
        auto v = table.lookup(row.word);
        ASSERT_EQ(v.size(), row.values.size()) << row.word;
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_EQ(std::bit_cast<std::uint32_t>(v[i]), std::bit_cast<std::uint32_t>(row.values[i]))
                << row.word << "[" << i << "]";
        }
    }
}

EmbeddingTable load_text(const std::string& text)
{
    std::istringstream in(text);
    return EmbeddingTable::load(in, EmbeddingFormat::text);
}

} // namespace

// --- embeddings ------------------------------------------------------------

TEST(Embeddings, TwoLineTextFile)
{
    auto t = load_text("cat 0.1 0.2 0.3\ndog -1 0 1e-3\n");
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.dimension(), 3u);
    EXPECT_FLOAT_EQ(t.lookup("dog")[2], 1e-3f);
    EXPECT_TRUE(t.lookup("bird").empty());
}

TEST(Embeddings, WrongWidthReportsLine)
{
    try {
        load_text("3 3\ncat 0.1 0.2 0.3\ndog 1 2\nfox 1 2 3\n");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Embeddings, HeaderCountMustMatch)
{
    EXPECT_THROW(load_text("3 2\na 1 2\nb 3 4\n"), FormatError);
}

TEST(Embeddings, BadNumberAndEmptyFile)
{
    EXPECT_THROW(load_text("a 1 x\n"), FormatError);
    EXPECT_THROW(load_text(""), FormatError);
}

TEST(Embeddings, DuplicatesKeepFirstAndKeysAreLowercased)
{
    auto t = load_text("Apple 1 0\napple 0 1\n");
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(t.lookup("apple")[0], 1.0f);
    EXPECT_TRUE(t.lookup("Apple").empty());

    std::istringstream in("Apple 1 0\n");
    auto cased = EmbeddingTable::load(in, EmbeddingFormat::text, {.lowercase_keys = false});
    EXPECT_FALSE(cased.lookup("Apple").empty());
}

TEST(Embeddings, AddRejectsWrongDimension)
{
    EmbeddingTable t(2);
    EXPECT_THROW(t.add("x", std::vector<float>{1, 2, 3}), std::invalid_argument);
    EXPECT_TRUE(t.add("x", std::vector<float>{1, 2}));
    EXPECT_FALSE(t.add("x", std::vector<float>{3, 4}));
}

TEST(Embeddings, FiftyWordFixtureIsBitwiseExact)
{
    auto rows = read_fixture_rows();
    ASSERT_EQ(rows.size(), 50u);
    auto table = EmbeddingTable::load_file(fixtures::test_data("embeddings50.txt"));
    expect_bitwise(table, rows);
}

TEST(Embeddings, TextAndBinaryRoundTripsAreBitwiseExact)
{
    auto rows = read_fixture_rows();
    auto table = EmbeddingTable::load_file(fixtures::test_data("embeddings50.txt"));

    std::stringstream text;
    table.save_text(text);
    expect_bitwise(EmbeddingTable::load(text, EmbeddingFormat::text), rows);

    std::stringstream binary;
    table.save_binary(binary);
    expect_bitwise(EmbeddingTable::load(binary, EmbeddingFormat::binary), rows);

    fixtures::TempDir dir;
    {
        std::ofstream out(dir / "vectors.bin", std::ios::binary);
        table.save_binary(out);
    }
    expect_bitwise(EmbeddingTable::load_file(dir / "vectors.bin"), rows);
}

TEST(Embeddings, BinaryLayoutIsLittleEndianFloat32)
{
    EmbeddingTable t(2);
    t.add("x", std::vector<float>{1.0f, -2.0f});
    std::stringstream out;
    t.save_binary(out);
    const std::string expected = std::string("1 2\nx ") + std::string("\x00\x00\x80\x3f", 4)
                                 + std::string("\x00\x00\x00\xc0", 4) + "\n";
    EXPECT_EQ(out.str(), expected);
}

TEST(Embeddings, TruncatedBinaryIsRejected)
{
    auto table = EmbeddingTable::load_file(fixtures::test_data("embeddings50.txt"));
    std::stringstream binary;
    table.save_binary(binary);
    auto bytes = binary.str();
    std::istringstream cut(bytes.substr(0, bytes.size() - 7));
    EXPECT_THROW(EmbeddingTable::load(cut, EmbeddingFormat::binary), FormatError);
}

TEST(Embeddings, MissingFileIsDataError)
{
    EXPECT_THROW(EmbeddingTable::load_file("/nonexistent/vectors.txt"), DataError);
}

// --- JSONL -----------------------------------------------------------------

TEST(Jsonl, TuplesRoundTrip)
{
    std::vector<DialogTuple> ts{
        fixtures::tuple(1, 1, "", "why?", "because \"reasons\"\n", fixtures::day(0)),
        fixtures::tuple(9007199254740993, 3, "ctx ünïcode 😀", "q", "a", fixtures::day(3, 4, 5))};
    std::stringstream buf;
    write_tuples(buf, ts);
    EXPECT_EQ(read_tuples(buf), ts);
}

TEST(Jsonl, TupleLineHasDocumentedKeys)
{
    std::vector<DialogTuple> ts{fixtures::tuple(5, 1, "", "q", "a", fixtures::day(30, 22, 10))};
    std::stringstream buf;
    write_tuples(buf, ts);
    EXPECT_EQ(buf.str(), "{\"dialog_id\":5,\"turn_index\":1,\"context\":\"\",\"question\":\"q\","
                         "\"answer\":\"a\",\"answer_time\":\"2017-10-31T22:10:00Z\"}\n");
}

TEST(Jsonl, ResponsesRoundTripAndOptionalFields)
{
    std::vector<ResponseRecord> rs{{1, 1, "c", "q", "gold", "resp", "ir-bm25"}};
    std::stringstream buf;
    write_responses(buf, rs);
    EXPECT_EQ(read_responses(buf), rs);

    std::istringstream minimal(
        R"({"dialog_id":2,"turn_index":1,"gold_answer":"g","response":"r","system":"seq2seq"})"
        "\n\n");
    auto read = read_responses(minimal);
    ASSERT_EQ(read.size(), 1u);
    EXPECT_EQ(read[0].system, "seq2seq");
    EXPECT_EQ(read[0].context, "");
}

TEST(Jsonl, MalformedLinesReportLineNumbers)
{
    std::istringstream bad("{\"dialog_id\":1}\n");
    EXPECT_THROW(read_tuples(bad), FormatError);
    std::istringstream garbage(
        R"({"dialog_id":2,"turn_index":1,"gold_answer":"g","response":"r","system":"s"})"
        "\nnot json\n");
    try {
        read_responses(garbage);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Jsonl, MissingFileIsDataError)
{
    EXPECT_THROW(read_tuples_file("/nonexistent/train.jsonl"), DataError);
}
