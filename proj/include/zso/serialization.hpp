#ifndef ZSO_SERIALIZATION_HPP
#define ZSO_SERIALIZATION_HPP

#include <cctype>
#include <string>
#include <string_view>
#include <utility>

#include "dataset.hpp"
#include "error.hpp"
#include "types.hpp"

namespace zso {

struct SerializedInstance {
    std::string text;
    RowId row_id;
};

/// Renders a record as one "The <column> is <value>." sentence per feature,
/// in feature order, joined by single spaces.
inline SerializedInstance serialize_record(const LabeledRecord& record,
                                           MissingValuePolicy policy = MissingValuePolicy::Skip)
{
    SerializedInstance out{{}, record.row_id};
    for (const auto& [name, value] : record.features) {
        if (value.empty() && policy == MissingValuePolicy::Skip) continue;
        if (!out.text.empty()) out.text += ' ';
        out.text += "The ";
        out.text += name;
        out.text += " is ";
        out.text += value;
        out.text += '.';
    }
    return out;
}

/// Prompt wrapper around a serialization.
///
/// Placeholders: `{serialization}` (exactly once), `{noun}`, and `{Noun}` for
/// the noun with its first letter uppercased. The rendered prompt must end
/// with the `Answer:` cue.
class PromptTemplate {
public:
    static constexpr std::string_view kSerialization = "{serialization}";
    static constexpr std::string_view kNoun = "{noun}";
    static constexpr std::string_view kNounCapitalized = "{Noun}";
    static constexpr std::string_view kAnswerCue = "Answer:";

    // Serialized sentences already end in '.', so no period follows the
    // placeholder here.
    static constexpr std::string_view kDefaultForm =
        "{Noun} features: {serialization} Question: Is this {noun} available? Yes or no? Answer:";

    PromptTemplate(std::string entity_noun, std::string question_form = std::string(kDefaultForm))
        : entity_noun_(std::move(entity_noun)), form_(std::move(question_form))
    {
        if (count(form_, kSerialization) != 1)
            throw Error(ErrorCode::TemplateMissingPlaceholder, "template needs exactly one {serialization}");
        auto trimmed = text::trim(form_);
        if (trimmed.size() < kAnswerCue.size() || trimmed.substr(trimmed.size() - kAnswerCue.size()) != kAnswerCue)
            throw Error(ErrorCode::TemplateMissingPlaceholder, "template must end with 'Answer:'");
    }

    const std::string& entity_noun() const noexcept { return entity_noun_; }
    const std::string& question_form() const noexcept { return form_; }

    std::string render(std::string_view serialization) const
    {
        std::string out;
        out.reserve(form_.size() + serialization.size() + 2 * entity_noun_.size());
        std::string_view rest = form_;
        while (!rest.empty()) {
            if (rest.front() == '{') {
                if (rest.substr(0, kSerialization.size()) == kSerialization) {
                    out += serialization;
                    rest.remove_prefix(kSerialization.size());
                    continue;
                }
                if (rest.substr(0, kNoun.size()) == kNoun) {
                    out += entity_noun_;
                    rest.remove_prefix(kNoun.size());
                    continue;
                }
                if (rest.substr(0, kNounCapitalized.size()) == kNounCapitalized) {
                    out += capitalize(entity_noun_);
                    rest.remove_prefix(kNounCapitalized.size());
                    continue;
                }
            }
            out += rest.front();
            rest.remove_prefix(1);
        }
        // Drop anything after the cue (e.g. a trailing newline from a template file).
        while (!out.empty() && text::is_space(out.back())) out.pop_back();
        return out;
    }

    static std::string capitalize(std::string_view s)
    {
        std::string out(s);
        if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
        return out;
    }

private:
    static std::size_t count(std::string_view hay, std::string_view needle)
    {
        std::size_t n = 0;
        for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size()))
            ++n;
        return n;
    }

    std::string entity_noun_;
    std::string form_;
};

inline std::string build_prompt(const SerializedInstance& instance, const PromptTemplate& tmpl)
{
    return tmpl.render(instance.text);
}

inline std::string build_prompt(const LabeledRecord& record, const DatasetSchema& schema, const PromptTemplate& tmpl)
{
    return build_prompt(serialize_record(record, schema.missing_values), tmpl);
}

} // namespace zso

#endif // ZSO_SERIALIZATION_HPP
