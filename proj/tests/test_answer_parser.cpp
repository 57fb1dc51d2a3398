#include <random>

#include <gtest/gtest.h>

#include <zso/answer_parser.hpp>

namespace {

using zso::TransportStatus;
using zso::VerdictReason;
using zso::VerdictState;

zso::Verdict parse(std::string text, TransportStatus status = TransportStatus::ok())
{
    return zso::parse_response({"7", "model", "fp", std::move(text), status});
}

TEST(ParseResponse, Examples)
{
    EXPECT_EQ(parse("Yes").state, VerdictState::Available);
    EXPECT_EQ(parse("Yes").reason, VerdictReason::MatchedYes);

    const auto no = parse(" no, this part is discontinued.");
    EXPECT_EQ(no.state, VerdictState::Obsolete);
    EXPECT_EQ(no.reason, VerdictReason::MatchedNo);

    const auto refusal = parse("I cannot determine availability from the given features.");
    EXPECT_EQ(refusal.state, VerdictState::Abstain);
    EXPECT_EQ(refusal.reason, VerdictReason::NoMatch);

    EXPECT_EQ(parse("yesterday").reason, VerdictReason::NoMatch);
}

TEST(ParseResponse, KeepsProvenance)
{
    const auto v = parse("No.");
    EXPECT_EQ(v.row_id, "7");
    EXPECT_EQ(v.raw, "No.");
}

TEST(ParseResponse, WordBoundaries)
{
    EXPECT_EQ(parse("nominal").state, VerdictState::Abstain);
    EXPECT_EQ(parse("No").state, VerdictState::Obsolete);
    EXPECT_EQ(parse("YES!").state, VerdictState::Available);
    EXPECT_EQ(parse("yes\nThe diode is available").state, VerdictState::Available);
    EXPECT_EQ(parse("no1").state, VerdictState::Obsolete);
    EXPECT_EQ(parse("yes\xC3\xA9").state, VerdictState::Abstain); // "yesé"
    EXPECT_EQ(parse("").state, VerdictState::Abstain);
    EXPECT_EQ(parse("   ").state, VerdictState::Abstain);
    EXPECT_EQ(parse("1. Yes").state, VerdictState::Available);
}

TEST(ParseResponse, BothCuesAbstain)
{
    for (const char* s : {"yes/no", "Yes / No", "no or yes", "Yes or no?", "yes|no", "no-yes"})
        EXPECT_EQ(parse(s).reason, VerdictReason::NoMatch) << s;
    // A later, separate sentence does not make the answer ambiguous.
    EXPECT_EQ(parse("Yes. No further info.").state, VerdictState::Available);
    EXPECT_EQ(parse("No, no.").state, VerdictState::Obsolete);
}

TEST(ParseResponse, TransportFailuresAbstain)
{
    for (auto st : {TransportStatus::timeout(), TransportStatus::http_error(503), TransportStatus::empty()}) {
        const auto v = parse("Yes", st);
        EXPECT_EQ(v.state, VerdictState::Abstain);
        EXPECT_EQ(v.reason, VerdictReason::TransportFailure);
    }
}

// Random completions: case-insensitivity, leading-punctuation invariance,
// and the state/reason pairing hold for every input.
TEST(ParseResponse, Properties)
{
    std::mt19937 rng(5);
    const std::vector<std::string> pieces = {"yes", "no", "Yes", "NO", "maybe", "or", "/", " ", ",", ".", "the",
                                             "part", "nominal", "yesterday", "\n", "!", "\xC3\xA9", "'", "\""};
    const std::string prefix_chars = " \t\n.,:;\"'";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        const int n = rng() % 6;
        for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];

        const auto v = parse(s);
        EXPECT_EQ(v, [&] {
            auto lowered = parse(zso::text::to_lower(s));
            lowered.raw = s;
            return lowered;
        }()) << s;

        std::string prefixed;
        for (int i = rng() % 5; i > 0; --i) prefixed += prefix_chars[rng() % prefix_chars.size()];
        EXPECT_EQ(parse(prefixed + s).state, v.state) << s;

        switch (v.state) {
        case VerdictState::Available: EXPECT_EQ(v.reason, VerdictReason::MatchedYes); break;
        case VerdictState::Obsolete: EXPECT_EQ(v.reason, VerdictReason::MatchedNo); break;
        case VerdictState::Abstain: EXPECT_EQ(v.reason, VerdictReason::NoMatch); break;
        }
    }
}

} // namespace
