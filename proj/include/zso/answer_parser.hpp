#ifndef ZSO_ANSWER_PARSER_HPP
#define ZSO_ANSWER_PARSER_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>

#include "response.hpp"
#include "types.hpp"

namespace zso {

enum class VerdictState { Available, Obsolete, Abstain };
enum class VerdictReason { MatchedYes, MatchedNo, NoMatch, TransportFailure };

constexpr std::string_view to_string(VerdictState s) noexcept
{
    switch (s) {
    case VerdictState::Available: return "Available";
    case VerdictState::Obsolete: return "Obsolete";
    case VerdictState::Abstain: return "Abstain";
    }
    return "?";
}

constexpr std::string_view to_string(VerdictReason r) noexcept
{
    switch (r) {
    case VerdictReason::MatchedYes: return "matched_yes";
    case VerdictReason::MatchedNo: return "matched_no";
    case VerdictReason::NoMatch: return "no_match";
    case VerdictReason::TransportFailure: return "transport_failure";
    }
    return "?";
}

struct Verdict {
    RowId row_id;
    VerdictState state = VerdictState::Abstain;
    std::string raw;
    VerdictReason reason = VerdictReason::NoMatch;

    std::optional<PartState> predicted() const noexcept
    {
        if (state == VerdictState::Available) return PartState::Available;
        if (state == VerdictState::Obsolete) return PartState::Obsolete;
        return std::nullopt;
    }

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

namespace detail {

// Non-ASCII bytes count as letters so "yesé" is not read as "yes".
inline bool is_letter(char c) noexcept
{
    const auto u = static_cast<unsigned char>(c);
    return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

inline bool is_alternation_char(char c) noexcept
{
    return c == '/' || c == '\\' || c == '|' || c == '-' || text::is_space(c);
}

/// Splits off the next run of letters, skipping `skipped` characters before it.
inline std::string_view next_word(std::string_view& s, std::string_view* skipped = nullptr)
{
    std::size_t i = 0;
    while (i < s.size() && !is_letter(s[i])) ++i;
    if (skipped) *skipped = s.substr(0, i);
    std::size_t j = i;
    while (j < s.size() && is_letter(s[j])) ++j;
    auto word = s.substr(i, j - i);
    s.remove_prefix(j);
    return word;
}

} // namespace detail

/// Reads the leading yes/no of a completion. "yes" means the part is
/// available, "no" that it is obsolete. Leading non-letters are ignored, the
/// cue must be a whole word, and "yes/no" or "yes or no" style answers
/// abstain.
inline Verdict parse_response(const RawResponse& response)
{
    Verdict v;
    v.row_id = response.row_id;
    v.raw = response.completion_text;
    if (!response.status.is_ok()) {
        v.state = VerdictState::Abstain;
        v.reason = VerdictReason::TransportFailure;
        return v;
    }

    const std::string lowered = text::to_lower(response.completion_text);
    std::string_view rest = lowered;
    const auto first = detail::next_word(rest);
    const bool yes = first == "yes";
    const bool no = first == "no";
    if (!yes && !no) {
        v.reason = VerdictReason::NoMatch;
        return v;
    }

    const std::string_view other = yes ? "no" : "yes";
    std::string_view sep;
    auto second = detail::next_word(rest, &sep);
    bool ambiguous = false;
    if (std::all_of(sep.begin(), sep.end(), detail::is_alternation_char)) {
        if (second == other) ambiguous = true;
        else if (second == "or") {
            auto third = detail::next_word(rest, &sep);
            ambiguous = third == other && std::all_of(sep.begin(), sep.end(), text::is_space);
        }
    }
    if (ambiguous) {
        v.reason = VerdictReason::NoMatch;
        return v;
    }

    v.state = yes ? VerdictState::Available : VerdictState::Obsolete;
    v.reason = yes ? VerdictReason::MatchedYes : VerdictReason::MatchedNo;
    return v;
}

} // namespace zso

#endif // ZSO_ANSWER_PARSER_HPP
