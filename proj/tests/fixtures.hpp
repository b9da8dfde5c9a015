#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "supportbench/corpus.hpp"
#include "supportbench/timestamp.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline std::string test_data(const std::string& name)
{
    return (fs::path(SUPPORTBENCH_TEST_DATA) / name).string();
}

inline std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag = "sb")
    {
        static int counter = 0;
        std::random_device rd;
        m_path = fs::temp_directory_path()
                 / fmt::format("{}-{}-{}-{}", tag, ::getpid(), counter++, rd());
        fs::create_directories(m_path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(m_path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return m_path; }
    [[nodiscard]] std::string operator/(const std::string& name) const
    {
        return (m_path / name).string();
    }

  private:
    fs::path m_path;
};

inline supportbench::Timestamp day(int d, int hour = 12, int minute = 0)
{
    using namespace std::chrono;
    return sys_days{2017y / October / 1} + days{d} + hours{hour} + minutes{minute};
}

inline supportbench::DialogTuple tuple(std::int64_t id, std::size_t turn, std::string context,
                                       std::string question, std::string answer,
                                       supportbench::Timestamp when)
{
    return {id, turn, std::move(context), std::move(question), std::move(answer), when};
}

// Same 50 words as data/embeddings50.txt.
inline const std::vector<std::string>& fixture_words()
{
    static const std::vector<std::string> words = {
        "the",      "battery",  "phone",    "screen",    "update",  "restart", "settings",
        "charge",   "cable",    "music",    "store",     "apple",   "watch",   "laptop",
        "password", "account",  "backup",   "icloud",    "photos",  "storage", "wifi",
        "bluetooth", "camera",  "app",      "download",  "install", "version", "reset",
        "help",     "support",  "device",   "replace",   "warranty", "repair", "order",
        "delivery", "refund",   "email",    "message",   "call",    "sound",   "speaker",
        "volume",   "keyboard", "mouse",    "display",   "light",   "power",   "button",
        "signal"};
    return words;
}

inline std::string twitter_time(supportbench::Timestamp t)
{
    using namespace std::chrono;
    static const char* names[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
    static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    auto dp = floor<days>(t);
    year_month_day ymd{dp};
    hh_mm_ss hms{t - dp};
    weekday wd{dp};
    return fmt::format("{} {} {:02} {:02}:{:02}:{:02} +0000 {}", names[wd.c_encoding()],
                       months[static_cast<unsigned>(ymd.month()) - 1],
                       static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count(), static_cast<int>(ymd.year()));
}

// A Kaggle-style dump: `dialogs_per_day` conversations per day for `days`
// days. Every conversation is customer question -> brand answer; every third
// one has a follow-up question and answer; every seventh answer redirects to
// private messages. Text uses only fixture_words() plus mentions.
inline std::string synthetic_csv(int days, int dialogs_per_day, unsigned seed = 7)
{
    std::mt19937 rng(seed);
    const auto& words = fixture_words();
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> len(3, 8);
    auto sentence = [&] {
        std::string s;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            s += (i ? " " : "") + words[pick(rng)];
        }
        return s;
    };

    std::string csv = "tweet_id,author_id,inbound,created_at,text,response_tweet_id,"
                      "in_response_to_tweet_id\n";
    std::int64_t id = 1000;
    int conversation = 0;
    for (int d = 0; d < days; ++d) {
        for (int k = 0; k < dialogs_per_day; ++k, ++conversation) {
            std::string customer = fmt::format("cust{}", conversation);
            auto t0 = day(d, 8 + k % 10, k % 60);
            std::int64_t q = id++;
            std::int64_t a = id++;
            csv += fmt::format("{},{},True,{},@BrandSupport {},{},\n", q, customer,
                               twitter_time(t0), sentence(), a);
            std::string answer =
                conversation % 7 == 6 ? "please dm us your " + sentence() : sentence();
            bool follow = conversation % 3 == 2;
            std::int64_t q2 = follow ? id++ : 0;
            csv += fmt::format("{},BrandSupport,False,{},\"@{} {}\",{},{}\n", a,
                               twitter_time(t0 + std::chrono::minutes(20)), customer, answer,
                               follow ? std::to_string(q2) : "", q);
            if (follow) {
                std::int64_t a2 = id++;
                csv += fmt::format("{},{},True,{},@BrandSupport {},{},{}\n", q2, customer,
                                   twitter_time(t0 + std::chrono::minutes(40)), sentence(), a2, a);
                csv += fmt::format("{},BrandSupport,False,{},@{} {},,{}\n", a2,
                                   twitter_time(t0 + std::chrono::minutes(55)), customer,
                                   sentence(), q2);
            }
        }
    }
    return csv;
}

} // namespace fixtures
