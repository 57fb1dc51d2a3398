#ifndef ZSO_DATASET_HPP
#define ZSO_DATASET_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "key_value.hpp"
#include "types.hpp"

namespace zso {

enum class MissingValuePolicy {
    Skip,          // drop the sentence for an empty cell
    VerbatimEmpty, // keep it as "The X is ."
};

inline std::string_view to_string(MissingValuePolicy p) noexcept
{
    return p == MissingValuePolicy::Skip ? "skip" : "verbatim-empty";
}

inline std::optional<MissingValuePolicy> parse_missing_value_policy(std::string_view s)
{
    if (s == "skip") return MissingValuePolicy::Skip;
    if (s == "verbatim-empty") return MissingValuePolicy::VerbatimEmpty;
    return std::nullopt;
}

/// Declarative description of one tabular dataset. Label keys are stored
/// trimmed and lowercased; matching against cells is case-insensitive.
struct DatasetSchema {
    std::string name;
    std::string entity_noun;
    std::vector<std::string> feature_columns;
    std::string label_column;
    std::vector<std::pair<std::string, PartState>> label_map;
    PartState positive_class = PartState::Available;
    std::optional<std::string> id_column;
    MissingValuePolicy missing_values = MissingValuePolicy::Skip;
    std::optional<std::filesystem::path> data_path;

    void add_label(std::string_view raw, PartState state)
    {
        label_map.emplace_back(text::to_lower(text::trim(raw)), state);
    }

    std::optional<PartState> map_label(std::string_view raw) const
    {
        const auto key = text::to_lower(text::trim(raw));
        for (const auto& [k, v] : label_map)
            if (k == key) return v;
        return std::nullopt;
    }

    void validate() const
    {
        auto bad = [&](const std::string& what) { throw Error(ErrorCode::InvalidSchema, name + ": " + what); };
        if (name.empty()) bad("name is empty");
        if (entity_noun.empty()) bad("entity_noun is empty");
        if (feature_columns.empty()) bad("feature_columns is empty");
        std::unordered_set<std::string> seen;
        for (const auto& c : feature_columns)
            if (!seen.insert(c).second) bad("duplicate feature column '" + c + "'");
        if (label_column.empty()) bad("label_column is empty");
        if (seen.count(label_column)) bad("label column '" + label_column + "' is also a feature column");
        bool has_available = false;
        bool has_obsolete = false;
        std::unordered_map<std::string, PartState> keys;
        for (const auto& [raw, state] : label_map) {
            auto [it, inserted] = keys.emplace(raw, state);
            if (!inserted && it->second != state) bad("label '" + raw + "' maps to both states");
            (state == PartState::Available ? has_available : has_obsolete) = true;
        }
        if (keys.size() < 2 || !has_available || !has_obsolete)
            bad("label_map needs at least two raw values covering both states");
    }

    friend bool operator==(const DatasetSchema&, const DatasetSchema&) = default;
};

/// Parses a schema document. Keys:
///   name, entity_noun, label_column, positive_class, id_column, data,
///   missing_values (skip | verbatim-empty),
///   feature = <column>            (repeated, in prompt order)
///   label = <raw value> -> <Available|Obsolete>   (repeated)
inline DatasetSchema schema_from_config(const KeyValueDocument& doc)
{
    doc.check_keys({"name", "entity_noun", "feature", "label_column", "label", "positive_class", "id_column", "data",
                    "missing_values"});
    DatasetSchema s;
    s.name = doc.require("name");
    s.entity_noun = doc.require("entity_noun");
    s.feature_columns = doc.get_all("feature");
    s.label_column = doc.require("label_column");
    for (const auto& entry : doc.get_all("label")) {
        const auto arrow = entry.rfind("->");
        if (arrow == std::string::npos) doc.fail("label entry '" + entry + "' is not 'raw -> State'");
        const auto state = parse_part_state(entry.substr(arrow + 2));
        if (!state) doc.fail("label entry '" + entry + "' has an unknown state");
        s.add_label(entry.substr(0, arrow), *state);
    }
    if (auto pc = doc.get("positive_class")) {
        auto state = parse_part_state(*pc);
        if (!state) doc.fail("positive_class must be Available or Obsolete");
        s.positive_class = *state;
    }
    if (auto id = doc.get("id_column"); id && !id->empty()) s.id_column = *id;
    if (auto mv = doc.get("missing_values")) {
        auto policy = parse_missing_value_policy(*mv);
        if (!policy) doc.fail("missing_values must be skip or verbatim-empty");
        s.missing_values = *policy;
    }
    if (auto data = doc.get("data"); data && !data->empty()) s.data_path = doc.resolve_path(*data);
    s.validate();
    return s;
}

inline KeyValueDocument schema_to_config(const DatasetSchema& s)
{
    KeyValueDocument doc;
    doc.add("name", s.name);
    doc.add("entity_noun", s.entity_noun);
    for (const auto& f : s.feature_columns) doc.add("feature", f);
    doc.add("label_column", s.label_column);
    for (const auto& [raw, state] : s.label_map) doc.add("label", raw + " -> " + std::string(to_string(state)));
    doc.add("positive_class", std::string(to_string(s.positive_class)));
    if (s.id_column) doc.add("id_column", *s.id_column);
    doc.add("missing_values", std::string(to_string(s.missing_values)));
    if (s.data_path) doc.add("data", s.data_path->generic_string());
    return doc;
}

inline DatasetSchema load_schema(const std::filesystem::path& path)
{
    return schema_from_config(load_key_values(path));
}

struct LabeledRecord {
    RowId row_id;
    std::vector<std::pair<std::string, std::string>> features; // schema order
    PartState label = PartState::Available;

    friend bool operator==(const LabeledRecord&, const LabeledRecord&) = default;
};

/// Parses CSV text under `schema`. Cells are trimmed at both ends and
/// otherwise kept verbatim; empty feature cells are kept as empty text.
inline std::vector<LabeledRecord> parse_dataset(std::string_view content, const DatasetSchema& schema)
{
    const auto rows = csv::parse(content);
    if (rows.empty()) throw Error(ErrorCode::EmptyDataset, schema.name + ": no header row");

    const auto& header = rows.front().fields;
    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (text::trim(header[i]) == name) return i;
        throw Error(ErrorCode::MissingColumn, name);
    };

    std::vector<std::size_t> feature_idx;
    feature_idx.reserve(schema.feature_columns.size());
    for (const auto& c : schema.feature_columns) feature_idx.push_back(column_index(c));
    const std::size_t label_idx = column_index(schema.label_column);
    const std::optional<std::size_t> id_idx =
        schema.id_column ? std::optional<std::size_t>(column_index(*schema.id_column)) : std::nullopt;

    std::vector<LabeledRecord> out;
    out.reserve(rows.size() - 1);
    std::unordered_set<RowId> ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            throw LineError(ErrorCode::MalformedCsv, row.line,
                            "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(row.fields.size()));
        LabeledRecord rec;
        rec.row_id = id_idx ? std::string(text::trim(row.fields[*id_idx])) : std::to_string(r - 1);
        if (!ids.insert(rec.row_id).second) throw Error(ErrorCode::DuplicateRowId, rec.row_id);

        const auto& raw_label = row.fields[label_idx];
        auto label = schema.map_label(raw_label);
        if (!label)
            throw Error(ErrorCode::UnmappableLabel,
                        "row " + rec.row_id + ": '" + std::string(text::trim(raw_label)) + "'");
        rec.label = *label;

        rec.features.reserve(feature_idx.size());
        for (std::size_t k = 0; k < feature_idx.size(); ++k)
            rec.features.emplace_back(schema.feature_columns[k], std::string(text::trim(row.fields[feature_idx[k]])));
        out.push_back(std::move(rec));
    }
    if (out.empty()) throw Error(ErrorCode::EmptyDataset, schema.name + ": no data rows");
    return out;
}

inline std::vector<LabeledRecord> load_dataset(const std::filesystem::path& path, const DatasetSchema& schema)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str(), schema);
}

/// Class balance of a dataset. The obsolete share is kept in hundredths of a
/// percent so it is exact.
struct DatasetStats {
    std::uint64_t n_total = 0;
    std::uint64_t n_obsolete = 0;
    std::uint64_t n_available = 0;
    std::uint64_t pct_obsolete_centi = 0;

    double pct_obsolete() const noexcept { return static_cast<double>(pct_obsolete_centi) / 100.0; }

    friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

/// Percentage of `part` in `whole`, in hundredths, rounded half-up.
constexpr std::uint64_t percent_centi_half_up(std::uint64_t part, std::uint64_t whole) noexcept
{
    return (20000 * part + whole) / (2 * whole);
}

template <typename Labels>
DatasetStats summarize_labels(const Labels& labels)
{
    DatasetStats st;
    for (PartState s : labels) {
        ++st.n_total;
        (s == PartState::Obsolete ? st.n_obsolete : st.n_available) += 1;
    }
    if (st.n_total == 0) throw Error(ErrorCode::EmptyDataset, "cannot summarize an empty dataset");
    st.pct_obsolete_centi = percent_centi_half_up(st.n_obsolete, st.n_total);
    return st;
}

inline DatasetStats summarize(const std::vector<LabeledRecord>& records)
{
    std::vector<PartState> labels;
    labels.reserve(records.size());
    for (const auto& r : records) labels.push_back(r.label);
    return summarize_labels(labels);
}

/// "68.41" style rendering of the obsolete share.
inline std::string format_percent(const DatasetStats& st)
{
    std::string frac = std::to_string(st.pct_obsolete_centi % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return std::to_string(st.pct_obsolete_centi / 100) + "." + frac;
}

} // namespace zso

#endif // ZSO_DATASET_HPP
