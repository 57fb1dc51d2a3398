#ifndef ZSO_TYPES_HPP
#define ZSO_TYPES_HPP

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace zso {

enum class PartState { Available, Obsolete };

constexpr std::string_view to_string(PartState s) noexcept
{
    return s == PartState::Available ? "Available" : "Obsolete";
}

constexpr PartState opposite(PartState s) noexcept
{
    return s == PartState::Available ? PartState::Obsolete : PartState::Available;
}

/// Row identity: the id column's cell, or the 0-based data row position.
using RowId = std::string;

namespace text {

inline bool is_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

inline std::string to_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && to_lower(a) == to_lower(b);
}

} // namespace text

inline std::optional<PartState> parse_part_state(std::string_view s)
{
    const auto t = text::trim(s);
    if (text::iequals(t, "available")) return PartState::Available;
    if (text::iequals(t, "obsolete")) return PartState::Obsolete;
    return std::nullopt;
}

} // namespace zso

#endif // ZSO_TYPES_HPP
