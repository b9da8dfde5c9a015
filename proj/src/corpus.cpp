#include "supportbench/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <queue>
#include <unordered_map>

#include <fmt/format.h>

#include "supportbench/errors.hpp"

namespace supportbench {

void SplitConfig::validate() const
{
    if (test_window_days <= 0 || train_window_days <= test_window_days) {
        throw ConfigError(fmt::format(
            "split windows must satisfy train > test > 0 (got train={}, test={})",
            train_window_days, test_window_days));
    }
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view col_id = "tweet_id";
constexpr std::string_view col_author = "author_id";
constexpr std::string_view col_inbound = "inbound";
constexpr std::string_view col_created = "created_at";
constexpr std::string_view col_text = "text";
constexpr std::string_view col_reply_to = "in_response_to_tweet_id";

std::optional<TweetId> parse_id(std::string_view s)
{
    // Some exports write ids as floats ("119237.0").
    if (s.size() > 2 && s.substr(s.size() - 2) == ".0") {
        s.remove_suffix(2);
    }
    TweetId v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

} // namespace

TweetReader::TweetReader(std::istream& in) : m_csv(in)
{
    if (!m_csv.next(m_header)) {
        throw DataError("tweet dump is empty (no header row)");
    }
    if (!m_header.empty() && m_header[0].starts_with("\xEF\xBB\xBF")) {
        m_header[0].erase(0, 3);
    }
    auto locate = [this](std::string_view name) {
        auto it = std::find(m_header.begin(), m_header.end(), name);
        if (it == m_header.end()) {
            throw DataError(fmt::format("tweet dump header lacks column `{}`", name));
        }
        return static_cast<std::size_t>(it - m_header.begin());
    };
    m_id_col = locate(col_id);
    m_author_col = locate(col_author);
    m_inbound_col = locate(col_inbound);
    m_created_col = locate(col_created);
    m_text_col = locate(col_text);
    m_reply_col = locate(col_reply_to);
}

std::optional<RowResult> TweetReader::next()
{
    if (!m_csv.next(m_fields)) {
        return std::nullopt;
    }
    ++m_row;
    auto error = [this](std::string_view column, std::string message) -> RowResult {
        return RowError{m_row, m_csv.line_number(), std::string(column), std::move(message)};
    };

    if (m_csv.unterminated_quote()) {
        return error("", "unterminated quoted field");
    }
    if (m_fields.size() > m_header.size()) {
        return error("", fmt::format("expected {} fields, found {}", m_header.size(),
                                     m_fields.size()));
    }
    if (m_fields.size() < m_header.size()) {
        return error(m_header[m_fields.size()], fmt::format("missing column `{}`",
                                                            m_header[m_fields.size()]));
    }

    Tweet t;
    auto id = parse_id(m_fields[m_id_col]);
    if (!id) {
        return error(col_id, fmt::format("invalid tweet id '{}'", m_fields[m_id_col]));
    }
    t.tweet_id = *id;

    t.author_id = m_fields[m_author_col];
    if (t.author_id.empty()) {
        return error(col_author, "empty author id");
    }

    const auto& inbound = m_fields[m_inbound_col];
    if (inbound == "True" || inbound == "true") {
        t.inbound = true;
    } else if (inbound == "False" || inbound == "false") {
        t.inbound = false;
    } else {
        return error(col_inbound, fmt::format("expected True or False, found '{}'", inbound));
    }

    auto created = parse_twitter_time(m_fields[m_created_col]);
    if (!created) {
        return error(col_created,
                     fmt::format("unparseable timestamp '{}'", m_fields[m_created_col]));
    }
    t.created_at = *created;

    t.text = std::move(m_fields[m_text_col]);

    const auto& reply = m_fields[m_reply_col];
    if (!reply.empty()) {
        auto parent = parse_id(reply);
        if (!parent) {
            return error(col_reply_to, fmt::format("invalid tweet id '{}'", reply));
        }
        if (*parent == t.tweet_id) {
            return error(col_reply_to, "tweet replies to itself");
        }
        t.in_response_to = *parent;
    }
    return t;
}

std::string describe(const RowError& error)
{
    if (error.column.empty()) {
        return fmt::format("row {} (line {}): {}", error.row, error.line, error.message);
    }
    return fmt::format("row {} (line {}), column `{}`: {}", error.row, error.line, error.column,
                       error.message);
}

ParsedTweets parse_tweet_stream(std::istream& in, RowPolicy policy)
{
    ParsedTweets out;
    TweetReader reader(in);
    while (auto row = reader.next()) {
        if (auto* tweet = std::get_if<Tweet>(&*row)) {
            out.tweets.push_back(std::move(*tweet));
            continue;
        }
        auto& err = std::get<RowError>(*row);
        if (policy == RowPolicy::abort) {
            throw DataError(describe(err));
        }
        out.errors.push_back(std::move(err));
    }
    return out;
}

// ---------------------------------------------------------------------------

ThreadedDialogs thread_conversations(std::span<const Tweet> tweets, std::string_view brand)
{
    constexpr std::ptrdiff_t no_parent = -1;
    constexpr std::ptrdiff_t cyclic = -2;
    const auto n = static_cast<std::ptrdiff_t>(tweets.size());

    std::unordered_map<TweetId, std::ptrdiff_t> by_id;
    by_id.reserve(tweets.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (!by_id.emplace(tweets[i].tweet_id, i).second) {
            throw DataError(fmt::format("duplicate tweet id {}", tweets[i].tweet_id));
        }
    }

    std::vector<std::ptrdiff_t> parent(tweets.size(), no_parent);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (const auto& p = tweets[i].in_response_to) {
            if (auto it = by_id.find(*p); it != by_id.end()) {
                parent[i] = it->second;
            }
        }
    }

    ThreadedDialogs out;

    // Resolve each tweet's root by walking parent links, memoising the result.
    // A walk that revisits a node of its own path has found a cycle.
    constexpr std::ptrdiff_t unknown = -3;
    std::vector<std::ptrdiff_t> root(tweets.size(), unknown);
    std::vector<char> on_path(tweets.size(), 0);
    std::vector<std::ptrdiff_t> path;
    for (std::ptrdiff_t start = 0; start < n; ++start) {
        path.clear();
        std::ptrdiff_t cur = start;
        std::ptrdiff_t resolved = unknown;
        while (true) {
            if (root[cur] != unknown) {
                resolved = root[cur];
                break;
            }
            if (on_path[cur]) {
                resolved = cyclic;
                out.warnings.push_back(fmt::format(
                    "reply cycle through tweet {}; conversation discarded", tweets[cur].tweet_id));
                break;
            }
            on_path[cur] = 1;
            path.push_back(cur);
            if (parent[cur] == no_parent) {
                resolved = cur;
                break;
            }
            cur = parent[cur];
        }
        for (auto p : path) {
            root[p] = resolved;
            on_path[p] = 0;
        }
    }

    std::unordered_map<std::ptrdiff_t, std::vector<std::ptrdiff_t>> members;
    std::vector<std::ptrdiff_t> roots;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (root[i] == cyclic) {
            continue;
        }
        if (root[i] == i) {
            roots.push_back(i);
        }
        members[root[i]].push_back(i);
    }

    auto earlier = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
        if (tweets[a].created_at != tweets[b].created_at) {
            return tweets[a].created_at < tweets[b].created_at;
        }
        return tweets[a].tweet_id < tweets[b].tweet_id;
    };
    std::sort(roots.begin(), roots.end(), earlier);

    for (auto r : roots) {
        const auto& group = members[r];
        if (group.size() < 2 || !tweets[r].inbound) {
            continue;
        }
        bool brand_replied = std::any_of(group.begin(), group.end(), [&](auto i) {
            return !tweets[i].inbound && tweets[i].author_id == brand;
        });
        if (!brand_replied) {
            continue;
        }

        // Chronological order that never places a reply before its parent,
        // even when timestamps disagree with the reply links.
        std::unordered_map<std::ptrdiff_t, std::vector<std::ptrdiff_t>> children;
        for (auto i : group) {
            if (i != r) {
                children[parent[i]].push_back(i);
            }
        }
        auto later = [&](std::ptrdiff_t a, std::ptrdiff_t b) { return earlier(b, a); };
        std::priority_queue<std::ptrdiff_t, std::vector<std::ptrdiff_t>, decltype(later)> ready(
            later);
        ready.push(r);

        Dialog d;
        d.dialog_id = tweets[r].tweet_id;
        d.brand = std::string(brand);
        d.turns.reserve(group.size());
        while (!ready.empty()) {
            auto i = ready.top();
            ready.pop();
            d.turns.push_back(tweets[i]);
            if (auto it = children.find(i); it != children.end()) {
                for (auto c : it->second) {
                    ready.push(c);
                }
            }
        }
        out.dialogs.push_back(std::move(d));
    }
    return out;
}

std::vector<DialogTuple> extract_dialog_tuples(const Dialog& dialog)
{
    std::unordered_map<TweetId, std::size_t> position;
    for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
        position.emplace(dialog.turns[i].tweet_id, i);
    }

    std::vector<DialogTuple> out;
    for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
        const auto& answer = dialog.turns[i];
        if (answer.inbound || answer.author_id != dialog.brand || !answer.in_response_to) {
            continue;
        }
        auto it = position.find(*answer.in_response_to);
        if (it == position.end() || !dialog.turns[it->second].inbound) {
            continue;
        }
        const auto q = it->second;

        DialogTuple t;
        t.dialog_id = dialog.dialog_id;
        t.turn_index = i;
        for (std::size_t j = 0; j < q; ++j) {
            if (j > 0) {
                t.context.push_back(' ');
            }
            t.context += dialog.turns[j].text;
        }
        t.question = dialog.turns[q].text;
        t.answer = answer.text;
        t.answer_time = answer.created_at;
        out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> default_redirect_patterns()
{
    return {"dm us", "direct message", "send us a dm", "dm your"};
}

RedirectFilter::RedirectFilter(std::vector<std::string> patterns) : m_patterns(std::move(patterns))
{
    if (m_patterns.empty()) {
        throw ConfigError("redirect filter needs at least one pattern");
    }
    m_compiled.reserve(m_patterns.size());
    for (const auto& p : m_patterns) {
        if (p.empty()) {
            throw ConfigError("empty redirect pattern");
        }
        try {
            m_compiled.emplace_back(p, std::regex::ECMAScript | std::regex::icase
                                           | std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw ConfigError(fmt::format("invalid redirect pattern '{}': {}", p, e.what()));
        }
    }
}

bool RedirectFilter::matches(std::string_view answer) const
{
    return std::any_of(m_compiled.begin(), m_compiled.end(), [&](const std::regex& re) {
        return std::regex_search(answer.begin(), answer.end(), re);
    });
}

FilteredTuples filter_redirects(std::vector<DialogTuple> tuples, const RedirectFilter& filter)
{
    FilteredTuples out;
    out.kept.reserve(tuples.size());
    for (auto& t : tuples) {
        if (filter.matches(t.answer)) {
            ++out.removed;
        } else {
            out.kept.push_back(std::move(t));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

TemporalSplit temporal_split(std::span<const DialogTuple> tuples, const SplitConfig& cfg)
{
    cfg.validate();
    if (tuples.empty()) {
        throw EmptySplitError("no dialog tuples to split");
    }
    auto newest = std::max_element(tuples.begin(), tuples.end(), [](const auto& a, const auto& b) {
                      return a.answer_time < b.answer_time;
                  })->answer_time;
    const auto test_start = newest - std::chrono::days{cfg.test_window_days};
    const auto train_start = newest - std::chrono::days{cfg.train_window_days};

    TemporalSplit out;
    for (const auto& t : tuples) {
        if (t.answer_time > test_start) {
            out.test.push_back(t);
        } else if (t.answer_time > train_start) {
            out.train.push_back(t);
        }
    }
    if (out.train.empty()) {
        throw EmptySplitError(fmt::format(
            "training split is empty: no answers in the {} days before the {}-day test window",
            cfg.train_window_days - cfg.test_window_days, cfg.test_window_days));
    }
    return out;
}

} // namespace supportbench
