#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "supportbench/errors.hpp"
#include "supportbench/normalize.hpp"
#include "supportbench/vocabulary.hpp"

using namespace supportbench;
using T = TokenSequence;

// --- tokenize --------------------------------------------------------------

TEST(Tokenize, MentionAndPunctuation)
{
    EXPECT_EQ(tokenize("Thanks @AppleSupport!"), (T{"thanks", "@applesupport", "!"}));
}

TEST(Tokenize, UrlKeptIntact)
{
    EXPECT_EQ(tokenize("see https://t.co/x"), (T{"see", "https://t.co/x"}));
    EXPECT_EQ(tokenize("go to https://support.apple.com/kb/HT201295."),
              (T{"go", "to", "https://support.apple.com/kb/ht201295", "."}));
    EXPECT_EQ(tokenize("visit www.apple.com/support today"),
              (T{"visit", "www.apple.com/support", "today"}));
    EXPECT_EQ(tokenize("check apple.com"), (T{"check", "apple.com"}));
}

TEST(Tokenize, EmptyAndWhitespace)
{
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize(" \t\n  ").empty());
}

TEST(Tokenize, HashtagsAndEmoticons)
{
    EXPECT_EQ(tokenize("#iOS11 broke it :( <3"), (T{"#ios11", "broke", "it", ":(", "<3"}));
    EXPECT_EQ(tokenize("ok :-) thanks"), (T{"ok", ":-)", "thanks"}));
}

TEST(Tokenize, EmojiAreSeparateTokens)
{
    EXPECT_EQ(tokenize("love it\xF0\x9F\x98\x8D\xF0\x9F\x98\x8D"),
              (T{"love", "it", "\xF0\x9F\x98\x8D", "\xF0\x9F\x98\x8D"}));
    // thumbs up with a skin tone modifier stays one token
    EXPECT_EQ(tokenize("\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD"), (T{"\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD"}));
}

TEST(Tokenize, Clitics)
{
    EXPECT_EQ(tokenize("We're here"), (T{"we", "'re", "here"}));
    EXPECT_EQ(tokenize("I don't know"), (T{"i", "do", "n't", "know"}));
    EXPECT_EQ(tokenize("it won't work"), (T{"it", "won't", "work"}));
    EXPECT_EQ(tokenize("I’ll check"), (T{"i", "'ll", "check"}));
    EXPECT_EQ(tokenize("'bout time"), (T{"'bout", "time"}));
}

TEST(Tokenize, WordInternalPunctuation)
{
    EXPECT_EQ(tokenize("wi-fi on iOS 11.0.3, costs $1,299"),
              (T{"wi-fi", "on", "ios", "11.0.3", ",", "costs", "$", "1,299"}));
    EXPECT_EQ(tokenize("wait..."), (T{"wait", "..."}));
    EXPECT_EQ(tokenize("what?!"), (T{"what", "?", "!"}));
}

TEST(Tokenize, HtmlEntitiesAreDecoded)
{
    EXPECT_EQ(tokenize("Q&amp;A &gt; docs"), (T{"q", "&", "a", ">", "docs"}));
}

TEST(Tokenize, NonAsciiLowercasing)
{
    EXPECT_EQ(tokenize("ÉCRAN Ñandú ΣΟΦΙΑ"), (T{"écran", "ñandú", "σοφια"}));
}

TEST(Tokenize, PlaceholdersSurvive)
{
    EXPECT_EQ(tokenize("hi <user> see <url>"), (T{"hi", "<user>", "see", "<url>"}));
}

TEST(Tokenize, NoTokenHasWhitespace)
{
    std::istringstream in(fixtures::synthetic_csv(5, 3));
    std::string line;
    while (std::getline(in, line)) {
        for (const auto& tok : tokenize(line)) {
            EXPECT_EQ(tok.find_first_of(" \t\r\n"), std::string::npos) << tok;
            EXPECT_FALSE(tok.empty());
        }
    }
}

// --- normalize_tokens ------------------------------------------------------

TEST(Normalize, Contractions)
{
    EXPECT_EQ(normalize_tokens(T{"we", "'re", "here"}), (T{"we", "are", "here"}));
    EXPECT_EQ(normalize_tokens(T{"do", "n't", "go"}), (T{"do", "not", "go"}));
    EXPECT_EQ(normalize_tokens(T{"won't"}), (T{"will", "not"}));
    EXPECT_EQ(normalize_tokens(T{"'bout", "'til"}), (T{"about", "until"}));
}

TEST(Normalize, Placeholders)
{
    EXPECT_EQ(normalize_tokens(T{"https://t.co/x", "@applesupport", "#help"}),
              (T{"<url>", "<user>", "<hashtag>"}));
    EXPECT_EQ(normalize_tokens(T{"<url>"}), (T{"<url>"}));
}

TEST(Normalize, TextEndToEnd)
{
    EXPECT_EQ(normalize_text("@AppleSupport I can't update, see https://t.co/x #fail"),
              (T{"<user>", "i", "can", "not", "update", ",", "see", "<url>", "<hashtag>"}));
}

TEST(Normalize, IdempotentOnFixtureText)
{
    std::istringstream in(fixtures::read_file(fixtures::test_data("tweets7.csv"))
                          + fixtures::synthetic_csv(3, 3));
    std::string line;
    while (std::getline(in, line)) {
        auto once = normalize_text(line);
        EXPECT_EQ(normalize_tokens(once), once);
        for (const auto& tok : once) {
            EXPECT_FALSE(is_url_token(tok)) << tok;
            EXPECT_FALSE(is_mention_token(tok)) << tok;
        }
    }
}

TEST(Normalize, IdempotentOnRandomTokenSoup)
{
    const T pieces{"'re", "n't", "won't", "'bout", "@x", "#y", "http://a.b", "<url>", "hello",
                   "'s", "can't", "'em", "ain't", ":)", "..."};
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    for (int i = 0; i < 300; ++i) {
        T soup(1 + i % 8);
        for (auto& t : soup) {
            t = pieces[pick(rng)];
        }
        auto once = normalize_tokens(soup);
        EXPECT_EQ(normalize_tokens(once), once);
    }
}

TEST(RewriteTable, ShippedFileMatchesBuiltInDefaults)
{
    auto file = RewriteTable::load((std::filesystem::path(SUPPORTBENCH_DATA_DIR) / "rewrites.tsv").string());
    const auto& builtin = RewriteTable::defaults();
    ASSERT_EQ(file.size(), builtin.size());
    for (const char* key : {"'ll", "'d", "'re", "'ve", "n't", "'bout", "'til", "can't"}) {
        ASSERT_NE(file.lookup(key), nullptr) << key;
        EXPECT_EQ(*file.lookup(key), *builtin.lookup(key));
    }
}

TEST(RewriteTable, Extensible)
{
    std::istringstream in("# custom\nu\tyou\nthx\tthank you\n");
    auto table = RewriteTable::parse(in);
    EXPECT_EQ(normalize_tokens(T{"thx", "u"}, table), (T{"thank", "you", "you"}));
}

TEST(RewriteTable, RejectsEntriesThatBreakIdempotence)
{
    RewriteTable t;
    t.add("u", "you");
    EXPECT_THROW(t.add("you", "u"), ConfigError);     // surface appears in a replacement
    EXPECT_THROW(t.add("ya", "u"), ConfigError);      // replacement is itself rewritten
    EXPECT_THROW(t.add("<url>", "link"), ConfigError);
    EXPECT_THROW(t.add("x", "@someone"), ConfigError);
    EXPECT_THROW(t.add("two words", "x"), ConfigError);
}

TEST(RewriteTable, MalformedLineReportsLine)
{
    std::istringstream in("# header\nok\tfine\nbroken-line\n");
    try {
        RewriteTable::parse(in);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

// --- vocabulary ------------------------------------------------------------

TEST(Vocabulary, FrequencyOrder)
{
    std::vector<T> corpus{{"a", "b", "a"}};
    EXPECT_EQ(build_vocabulary(corpus, 1).words(), (T{"a"}));
}

TEST(Vocabulary, TiesByFirstOccurrence)
{
    std::vector<T> corpus{{"a", "b"}, {"b", "c"}, {"b"}};
    EXPECT_EQ(build_vocabulary(corpus, 2).words(), (T{"b", "a"}));
}

TEST(Vocabulary, SpecialsAreFreeAndAlwaysMembers)
{
    std::vector<T> corpus{{"<url>", "<url>", "x"}};
    auto v = build_vocabulary(corpus, 1);
    EXPECT_EQ(v.words(), (T{"x"}));
    for (auto s : special_tokens) {
        EXPECT_TRUE(v.contains(s));
    }
    EXPECT_FALSE(v.contains("X"));
}

TEST(Vocabulary, SmallerCorpusThanLimit)
{
    std::vector<T> corpus{{"z", "y"}};
    EXPECT_EQ(build_vocabulary(corpus, 100).words(), (T{"z", "y"}));
}

TEST(Vocabulary, Errors)
{
    std::vector<T> corpus{{"a"}};
    EXPECT_THROW(build_vocabulary(corpus, 0), ConfigError);
    EXPECT_THROW(build_vocabulary({}, 5), DataError);
}

TEST(Vocabulary, DeterministicAndRoundTrips)
{
    std::vector<T> corpus;
    std::istringstream in(fixtures::synthetic_csv(10, 3));
    std::string line;
    while (std::getline(in, line)) {
        corpus.push_back(normalize_text(line));
    }
    auto v1 = build_vocabulary(corpus, 30);
    auto v2 = build_vocabulary(corpus, 30);
    EXPECT_EQ(v1.words(), v2.words());
    EXPECT_EQ(v1.words().size(), 30u);

    std::stringstream buf;
    v1.save(buf);
    auto loaded = Vocabulary::load(buf);
    EXPECT_EQ(loaded, v1);

    std::stringstream text;
    v1.save(text);
    std::string first;
    std::getline(text, first);
    EXPECT_EQ(first, special_tokens[0]);
}

TEST(Vocabulary, LoadRejectsMissingSpecials)
{
    std::istringstream in("hello\nworld\n");
    EXPECT_THROW(Vocabulary::load(in), FormatError);
}

TEST(ApplyVocabulary, ReplacesOovOnly)
{
    std::vector<T> corpus{{"hello"}};
    auto v = build_vocabulary(corpus, 5);
    EXPECT_EQ(apply_vocabulary(T{"hello", "zzzxq"}, v), (T{"hello", "<unk>"}));
    EXPECT_EQ(apply_vocabulary(T{"<url>"}, v), (T{"<url>"}));
}

TEST(ApplyVocabulary, CountsReplacementsOnFixture)
{
    std::vector<T> corpus{{"my", "phone", "will", "not", "charge", "after", "the"}};
    auto v = build_vocabulary(corpus, 10);
    T sentence{"my", "phone", "will", "not", "charge", "after", "the", "ios", "update", "today"};
    auto out = apply_vocabulary(sentence, v);
    EXPECT_EQ(out.size(), sentence.size());
    EXPECT_EQ(std::count(out.begin(), out.end(), "<unk>"), 3);
    for (const auto& t : out) {
        EXPECT_TRUE(v.contains(t));
    }
}
