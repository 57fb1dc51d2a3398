#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include <zso/dataset.hpp>

#include "support/published_results.hpp"

namespace {

using zso::ErrorCode;
using zso::PartState;

const std::filesystem::path kData = ZSO_TEST_DATA_DIR;

zso::DatasetSchema tiny_schema()
{
    zso::DatasetSchema s;
    s.name = "tiny";
    s.entity_noun = "diode";
    s.feature_columns = {"v"};
    s.label_column = "state";
    s.add_label("obsolete", PartState::Obsolete);
    s.add_label("active", PartState::Available);
    return s;
}

ErrorCode error_code(auto&& f)
{
    try {
        f();
    } catch (const zso::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

TEST(Csv, QuotedFieldsEmbeddedNewlinesAndCrlf)
{
    const auto rows = zso::csv::parse("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\r\n\"multi\nline\",2\r\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"x, y", "he said \"hi\""}));
    EXPECT_EQ(rows[2].fields, (std::vector<std::string>{"multi\nline", "2"}));
    EXPECT_EQ(rows[2].line, 3u);
}

TEST(Csv, TrailingEmptyFieldAndBom)
{
    const auto rows = zso::csv::parse("\xEF\xBB\xBF" "a,b\n1,\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].fields[0], "a");
    EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"1", ""}));
}

TEST(Csv, MalformedInputReportsLine)
{
    try {
        zso::csv::parse("a,b\n1,2\n\"open,3\n");
        FAIL();
    } catch (const zso::LineError& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedCsv);
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_EQ(error_code([] { zso::csv::parse("a\n\"x\"y\n"); }), ErrorCode::MalformedCsv);
    EXPECT_EQ(error_code([] { zso::csv::parse("a\nx\"y\n"); }), ErrorCode::MalformedCsv);
}

TEST(Csv, QuoteRoundTrip)
{
    for (std::string field : {"plain", "with,comma", "with \"quote\"", "multi\nline", ""}) {
        const auto rows = zso::csv::parse("h\n" + zso::csv::quote(field) + ",x\n");
        ASSERT_EQ(rows.size(), 2u);
        EXPECT_EQ(rows[1].fields[0], field);
    }
}

TEST(Schema, ValidationRules)
{
    auto s = tiny_schema();
    EXPECT_NO_THROW(s.validate());

    auto dup = s;
    dup.feature_columns = {"v", "v"};
    EXPECT_EQ(error_code([&] { dup.validate(); }), ErrorCode::InvalidSchema);

    auto overlap = s;
    overlap.feature_columns = {"v", "state"};
    EXPECT_EQ(error_code([&] { overlap.validate(); }), ErrorCode::InvalidSchema);

    auto empty = s;
    empty.feature_columns.clear();
    EXPECT_EQ(error_code([&] { empty.validate(); }), ErrorCode::InvalidSchema);

    auto one_state = s;
    one_state.label_map = {{"a", PartState::Obsolete}, {"b", PartState::Obsolete}};
    EXPECT_EQ(error_code([&] { one_state.validate(); }), ErrorCode::InvalidSchema);

    auto conflict = s;
    conflict.add_label("OBSOLETE", PartState::Available);
    EXPECT_EQ(error_code([&] { conflict.validate(); }), ErrorCode::InvalidSchema);
}

TEST(Schema, ConfigRoundTrip)
{
    auto s = tiny_schema();
    s.id_column = "part";
    s.positive_class = PartState::Obsolete;
    s.missing_values = zso::MissingValuePolicy::VerbatimEmpty;
    s.feature_columns = {"v", "Zener Voltage", "Package"};
    s.data_path = "data/diodes.csv";
    const auto doc = zso::schema_to_config(s);
    const auto back = zso::schema_from_config(zso::parse_key_values(zso::render_key_values(doc)));
    EXPECT_EQ(back, s);
}

TEST(Schema, ShippedSchemasLoad)
{
    const auto arrow = zso::load_schema(kData / "arrow_sample.schema");
    EXPECT_EQ(arrow.entity_noun, "diode");
    EXPECT_EQ(arrow.positive_class, PartState::Available);
    EXPECT_EQ(arrow.id_column, "Part Number");
    const auto gsm = zso::load_schema(kData / "gsm_sample.schema");
    EXPECT_EQ(gsm.positive_class, PartState::Obsolete);
    EXPECT_EQ(gsm.map_label(" Cancelled "), PartState::Obsolete);

    for (const char* shipped : {"arrow.schema", "gsm_arena.schema"})
        EXPECT_NO_THROW(zso::load_schema(std::filesystem::path(ZSO_TEST_DATA_DIR) / "../../configs" / shipped))
            << shipped;
}

TEST(Schema, UnknownKeyIsRejected)
{
    EXPECT_EQ(error_code([] {
                  zso::schema_from_config(zso::parse_key_values(
                      "name=a\nentity_noun=x\nfeature=f\nlabel_column=l\nlabel=a->Available\nlabel=b->Obsolete\n"
                      "labels=c->Obsolete\n"));
              }),
              ErrorCode::InvalidConfig);
}

TEST(LoadDataset, TwoRowExample)
{
    const auto recs = zso::parse_dataset("v,state\n5.1V,obsolete\n3.3V,active\n", tiny_schema());
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].label, PartState::Obsolete);
    EXPECT_EQ(recs[1].label, PartState::Available);
    EXPECT_EQ(recs[0].row_id, "0");
    EXPECT_EQ(recs[1].row_id, "1");
    EXPECT_EQ(recs[0].features, (std::vector<std::pair<std::string, std::string>>{{"v", "5.1V"}}));
}

TEST(LoadDataset, CellsTrimmedLabelsCaseInsensitive)
{
    const auto recs = zso::parse_dataset("state , v\n  OBSOLETE , 5.1 V \nActive,\n", tiny_schema());
    EXPECT_EQ(recs[0].features[0].second, "5.1 V");
    EXPECT_EQ(recs[0].label, PartState::Obsolete);
    EXPECT_EQ(recs[1].features[0].second, "");
    EXPECT_EQ(recs[1].label, PartState::Available);
}

TEST(LoadDataset, Errors)
{
    const auto s = tiny_schema();
    EXPECT_EQ(error_code([&] { zso::parse_dataset("v,state\n", s); }), ErrorCode::EmptyDataset);
    EXPECT_EQ(error_code([&] { zso::parse_dataset("", s); }), ErrorCode::EmptyDataset);
    EXPECT_EQ(error_code([&] { zso::parse_dataset("v,other\n1,active\n", s); }), ErrorCode::MissingColumn);
    EXPECT_EQ(error_code([&] { zso::parse_dataset("v,state\n1,unknown\n", s); }), ErrorCode::UnmappableLabel);
    EXPECT_EQ(error_code([&] { zso::parse_dataset("v,state\n1,active,extra\n", s); }), ErrorCode::MalformedCsv);
    EXPECT_EQ(error_code([&] { zso::load_dataset("/nonexistent.csv", s); }), ErrorCode::IoError);

    auto with_id = s;
    with_id.id_column = "id";
    EXPECT_EQ(error_code([&] { zso::parse_dataset("id,v,state\na,1,active\na,2,active\n", with_id); }),
              ErrorCode::DuplicateRowId);
}

TEST(LoadDataset, MalformedCsvCarriesLine)
{
    try {
        zso::parse_dataset("v,state\n1,active\n2\n", tiny_schema());
        FAIL();
    } catch (const zso::LineError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadDataset, SampleFilesKeepOrderAndIds)
{
    const auto schema = zso::load_schema(kData / "arrow_sample.schema");
    const auto recs = zso::load_dataset(*schema.data_path, schema);
    ASSERT_EQ(recs.size(), 12u);
    EXPECT_EQ(recs.front().row_id, "BZX84C5V1");
    EXPECT_EQ(recs[6].row_id, "AZ23C10");
    EXPECT_EQ(recs[6].features.back().second, "Dual, Common Anode");
    EXPECT_EQ(recs[6].features[3].second, ""); // empty Tolerance cell kept
    for (const auto& r : recs) {
        ASSERT_EQ(r.features.size(), schema.feature_columns.size());
        for (std::size_t i = 0; i < r.features.size(); ++i) EXPECT_EQ(r.features[i].first, schema.feature_columns[i]);
    }
    // Deterministic: a second load is structurally identical.
    EXPECT_EQ(zso::load_dataset(*schema.data_path, schema), recs);
}

TEST(Summarize, Examples)
{
    using zso::DatasetStats;
    EXPECT_EQ(zso::summarize_labels(std::vector{PartState::Obsolete, PartState::Available}),
              (DatasetStats{2, 1, 1, 5000}));
    EXPECT_DOUBLE_EQ(zso::summarize_labels(std::vector{PartState::Obsolete, PartState::Available}).pct_obsolete(),
                     50.0);
    EXPECT_EQ(error_code([] { zso::summarize({}); }), ErrorCode::EmptyDataset);
}

std::vector<zso::LabeledRecord> synthetic(std::uint64_t obsolete, std::uint64_t available)
{
    std::vector<zso::LabeledRecord> out;
    for (std::uint64_t i = 0; i < obsolete + available; ++i)
        out.push_back({std::to_string(i), {{"f", "x"}}, i < obsolete ? PartState::Obsolete : PartState::Available});
    return out;
}

TEST(Summarize, PublishedClassBalance)
{
    using zso::testing::kArrow;
    using zso::testing::kGsmArena;
    for (const auto& ds : {kArrow, kGsmArena}) {
        const auto st = zso::summarize(synthetic(ds.n_obsolete, ds.n_available));
        EXPECT_EQ(st.n_total, ds.n_total);
        EXPECT_EQ(st.n_obsolete, ds.n_obsolete);
        EXPECT_EQ(st.n_available, ds.n_available);
        EXPECT_DOUBLE_EQ(st.pct_obsolete(), ds.pct_obsolete);
    }
    EXPECT_EQ(zso::format_percent(zso::summarize(synthetic(kArrow.n_obsolete, kArrow.n_available))), "68.41");
}

TEST(Summarize, HalfUpRounding)
{
    // 1/8 = 12.5% exactly; 1/16 = 6.25%; 1/32 = 3.125% -> 3.13; 1/3 = 33.333.. -> 33.33
    EXPECT_EQ(zso::percent_centi_half_up(1, 8), 1250u);
    EXPECT_EQ(zso::percent_centi_half_up(1, 32), 313u);
    EXPECT_EQ(zso::percent_centi_half_up(1, 3), 3333u);
    EXPECT_EQ(zso::percent_centi_half_up(2, 3), 6667u);
}

// summarize agrees with independent counting on random label lists.
TEST(Summarize, MatchesBruteForceCounting)
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 500;
        std::vector<PartState> labels(n);
        for (auto& l : labels) l = rng() % 3 == 0 ? PartState::Available : PartState::Obsolete;
        const auto st = zso::summarize_labels(labels);
        std::uint64_t obs = 0;
        for (auto l : labels) obs += l == PartState::Obsolete;
        EXPECT_EQ(st.n_total, n);
        EXPECT_EQ(st.n_obsolete, obs);
        EXPECT_EQ(st.n_available, n - obs);
        EXPECT_EQ(st.n_total, st.n_obsolete + st.n_available);
        const double pct = 100.0 * double(obs) / double(n);
        EXPECT_NEAR(st.pct_obsolete(), std::floor(pct * 100.0 + 0.5) / 100.0, 1e-9);
    }
}

} // namespace
