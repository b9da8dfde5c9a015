#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace supportbench {

// Lowercase, whitespace-free tokens.
using TokenSequence = std::vector<std::string>;

inline constexpr std::string_view url_token = "<url>";
inline constexpr std::string_view user_token = "<user>";
inline constexpr std::string_view hashtag_token = "<hashtag>";
inline constexpr std::string_view unk_token = "<unk>";
inline constexpr std::string_view pad_token = "<pad>";
inline constexpr std::string_view bos_token = "<s>";
inline constexpr std::string_view eos_token = "</s>";

// Fixed order; this is also the header block of a vocabulary file.
inline constexpr std::string_view special_tokens[] = {
    pad_token, bos_token, eos_token, unk_token, url_token, user_token, hashtag_token};

bool is_special_token(std::string_view token);

// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and basic Cyrillic
// letters; other code points pass through unchanged.
std::string to_lower_utf8(std::string_view text);

// Recognizers shared by the tokenizer and the normalizer.
bool is_url_token(std::string_view token);
bool is_mention_token(std::string_view token);
bool is_hashtag_token(std::string_view token);

// Tweet-aware tokenizer. Keeps URLs, @-mentions, #-hashtags, emoticons, emoji
// and the special placeholders above as single tokens, splits off punctuation
// and English clitics ("we're" -> we 're, "don't" -> do n't), decodes the HTML
// entities found in tweet dumps and lowercases the result.
TokenSequence tokenize(std::string_view raw);

// Data-driven surface -> replacement map applied token by token. A
// replacement may expand to several space-separated tokens.
class RewriteTable {
  public:
    RewriteTable() = default;

    // The contraction and slang rewrites shipped in data/rewrites.tsv.
    static const RewriteTable& defaults();

    // Two-column TSV (`surface<TAB>replacement`); '#' starts a comment line.
    // Throws FormatError on malformed or inconsistent entries.
    static RewriteTable parse(std::istream& in);
    static RewriteTable load(const std::string& path);

    // Throws ConfigError when the entry would break idempotence: a surface
    // that is a placeholder, or a replacement token that is itself rewritten
    // or recognized as a URL, mention or hashtag.
    void add(std::string_view surface, std::string_view replacement);

    [[nodiscard]] const TokenSequence* lookup(std::string_view token) const;
    [[nodiscard]] std::size_t size() const { return m_entries.size(); }

  private:
    std::unordered_map<std::string, TokenSequence> m_entries;
};

// Rewrites contractions and slang, and replaces URLs, mentions and hashtags
// with <url>, <user> and <hashtag>. Idempotent.
TokenSequence normalize_tokens(std::span<const std::string> tokens,
                               const RewriteTable& table = RewriteTable::defaults());

// tokenize followed by normalize_tokens.
TokenSequence normalize_text(std::string_view raw,
                             const RewriteTable& table = RewriteTable::defaults());

} // namespace supportbench
