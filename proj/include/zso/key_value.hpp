#ifndef ZSO_KEY_VALUE_HPP
#define ZSO_KEY_VALUE_HPP

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "types.hpp"

namespace zso {

// Flat configuration documents shared by dataset schemas, backend configs and
// run configs:
//
//     # comment
//     key = value
//     feature = Zener Voltage      <- keys may repeat; order is kept
//
// Values run to the end of the line and are trimmed. A value may be empty.
class KeyValueDocument {
public:
    using Entry = std::pair<std::string, std::string>;

    KeyValueDocument() = default;
    explicit KeyValueDocument(std::string source) : source_(std::move(source)) {}

    void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const std::string& source() const noexcept { return source_; }

    bool has(std::string_view key) const
    {
        return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
    }

    std::vector<std::string> get_all(std::string_view key) const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_)
            if (k == key) out.push_back(v);
        return out;
    }

    /// Single-valued key; repeating it is a config error.
    std::optional<std::string> get(std::string_view key) const
    {
        std::optional<std::string> found;
        for (const auto& [k, v] : entries_) {
            if (k != key) continue;
            if (found) fail("key '" + std::string(key) + "' given more than once");
            found = v;
        }
        return found;
    }

    std::string require(std::string_view key) const
    {
        auto v = get(key);
        if (!v) fail("missing required key '" + std::string(key) + "'");
        return *v;
    }

    std::string get_or(std::string_view key, std::string fallback) const
    {
        auto v = get(key);
        return v ? *v : std::move(fallback);
    }

    template <typename Number>
    std::optional<Number> get_number(std::string_view key) const
    {
        auto v = get(key);
        if (!v) return std::nullopt;
        Number out{};
        const char* first = v->data();
        const char* last = v->data() + v->size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || ptr != last)
            fail("key '" + std::string(key) + "' expects a number, got '" + *v + "'");
        return out;
    }

    std::optional<bool> get_bool(std::string_view key) const
    {
        auto v = get(key);
        if (!v) return std::nullopt;
        const auto lv = text::to_lower(*v);
        if (lv == "true" || lv == "yes" || lv == "1" || lv == "on") return true;
        if (lv == "false" || lv == "no" || lv == "0" || lv == "off") return false;
        fail("key '" + std::string(key) + "' expects a boolean, got '" + *v + "'");
    }

    /// Rejects keys outside `allowed` so typos do not pass silently.
    void check_keys(std::initializer_list<std::string_view> allowed) const
    {
        for (const auto& [k, v] : entries_)
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                fail("unknown key '" + k + "'");
    }

    /// Resolves a path value relative to the directory of the document's file.
    std::filesystem::path resolve_path(const std::string& value) const
    {
        std::filesystem::path p(value);
        if (p.is_absolute() || source_.empty()) return p;
        return std::filesystem::path(source_).parent_path() / p;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorCode::InvalidConfig, (source_.empty() ? std::string("<config>") : source_) + ": " + what);
    }

    friend bool operator==(const KeyValueDocument& a, const KeyValueDocument& b) { return a.entries_ == b.entries_; }

private:
    std::string source_;
    std::vector<Entry> entries_;
};

inline bool is_config_key_char(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
           c == '-';
}

inline KeyValueDocument parse_key_values(std::string_view body, std::string source = {})
{
    KeyValueDocument doc(std::move(source));
    std::size_t line_no = 0;
    while (!body.empty()) {
        ++line_no;
        const auto nl = body.find('\n');
        std::string_view line = body.substr(0, nl);
        body = nl == std::string_view::npos ? std::string_view{} : body.substr(nl + 1);

        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) doc.fail("line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = text::trim(line.substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), is_config_key_char))
            doc.fail("line " + std::to_string(line_no) + ": invalid key '" + std::string(key) + "'");
        doc.add(std::string(key), std::string(text::trim(line.substr(eq + 1))));
    }
    return doc;
}

inline KeyValueDocument load_key_values(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str(), path.string());
}

/// Inverse of parse_key_values for documents whose values are already trimmed
/// single lines.
inline std::string render_key_values(const KeyValueDocument& doc)
{
    std::string out;
    for (const auto& [k, v] : doc.entries()) {
        if (k.empty() || !std::all_of(k.begin(), k.end(), is_config_key_char)) doc.fail("cannot render key '" + k + "'");
        if (v.find('\n') != std::string::npos || text::trim(v) != v)
            doc.fail("cannot render value of '" + k + "': not a trimmed single line");
        out += k;
        out += v.empty() ? " =" : " = ";
        out += v;
        out += '\n';
    }
    return out;
}

} // namespace zso

#endif // ZSO_KEY_VALUE_HPP
