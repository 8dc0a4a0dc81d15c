#include <catch2/catch_amalgamated.hpp>

#include "votecast/datetime.hpp"
#include "votecast/text.hpp"

using namespace votecast;

TEST_CASE("tokenize splits on non-word characters and lowercases") {
    CHECK(text::tokenize("Vote TCB!") == std::vector<std::string>{"vote", "tcb"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("#sgpresident @TonyTan ok lah") ==
          std::vector<std::string>{"#sgpresident", "@tonytan", "ok", "lah"});
}

TEST_CASE("tokenize keeps digits and non-ascii letters together") {
    CHECK(text::tokenize("pe2011 results") == std::vector<std::string>{"pe2011", "results"});
    CHECK(text::tokenize("Caf\xC3\xA9 talk") == std::vector<std::string>{"caf\xC3\xA9", "talk"});
    CHECK(text::tokenize("a--b..c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("normalize lowercases, collapses whitespace and trims") {
    CHECK(text::normalize("  TONY   Tan \t lah ") == "tony tan lah");
    CHECK(text::normalize("") == "");
    CHECK(text::normalize(" \t\n ") == "");
}

TEST_CASE("normalize applies NFC so composed and decomposed forms agree") {
    const std::string composed = "caf\xC3\xA9";      // U+00E9
    const std::string decomposed = "cafe\xCC\x81";   // e + U+0301
    CHECK(text::normalize(composed) == text::normalize(decomposed));
    CHECK(text::normalize("CAF\xC3\x89") == text::normalize(decomposed));
}

TEST_CASE("iso8601 parsing handles dates, times and offsets") {
    const Timestamp date = parse_iso8601("2011-08-17");
    CHECK(format_iso8601(date) == "2011-08-17T00:00:00Z");

    const Timestamp utc = parse_iso8601("2011-08-18T10:05:42Z");
    CHECK(format_iso8601(utc) == "2011-08-18T10:05:42Z");

    const Timestamp offset = parse_iso8601("2011-08-18T10:00:00+08:00");
    CHECK(format_iso8601(offset) == "2011-08-18T02:00:00Z");

    CHECK(parse_instant("2011-08-25").date_only);
    CHECK_FALSE(parse_instant("2011-08-25T00:00:00Z").date_only);
}

TEST_CASE("iso8601 parsing rejects malformed inputs") {
    CHECK_THROWS_AS(parse_iso8601("2011-13-01"), DataError);
    CHECK_THROWS_AS(parse_iso8601("2011-02-30"), DataError);
    CHECK_THROWS_AS(parse_iso8601("yesterday"), DataError);
    CHECK_THROWS_AS(parse_iso8601("2011-08-18T25:00:00"), DataError);
    CHECK_THROWS_AS(parse_iso8601("2011-08-18T10:00:00Zjunk"), DataError);
}
