#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <zso/serialization.hpp>

namespace {

using zso::LabeledRecord;
using zso::MissingValuePolicy;
using zso::PromptTemplate;

const std::filesystem::path kData = ZSO_TEST_DATA_DIR;

LabeledRecord record(std::vector<std::pair<std::string, std::string>> features)
{
    return {"r", std::move(features), zso::PartState::Available};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(SerializeRecord, SingleFeature)
{
    EXPECT_EQ(zso::serialize_record(record({{"Voltage", "5.1 V"}})).text, "The Voltage is 5.1 V.");
}

TEST(SerializeRecord, NoFeaturesIsEmpty)
{
    EXPECT_EQ(zso::serialize_record(record({})).text, "");
}

TEST(SerializeRecord, MissingValuePolicies)
{
    const auto r = record({{"a", "1"}, {"b", ""}, {"c", "3"}});
    EXPECT_EQ(zso::serialize_record(r, MissingValuePolicy::Skip).text, "The a is 1. The c is 3.");
    EXPECT_EQ(zso::serialize_record(r, MissingValuePolicy::VerbatimEmpty).text, "The a is 1. The b is . The c is 3.");
}

TEST(SerializeRecord, KeepsRowId)
{
    EXPECT_EQ(zso::serialize_record(record({{"a", "1"}})).row_id, "r");
}

TEST(BuildPrompt, DefaultTemplateHasSinglePeriodBeforeQuestion)
{
    const zso::SerializedInstance s{"The Voltage is 5.1 V.", "0"};
    EXPECT_EQ(zso::build_prompt(s, PromptTemplate("diode")),
              "Diode features: The Voltage is 5.1 V. Question: Is this diode available? Yes or no? Answer:");
}

TEST(BuildPrompt, ContainsSerializationExactlyOnce)
{
    const zso::SerializedInstance s{"The Brand is Nokia. The Model is 3310.", "0"};
    const auto p = zso::build_prompt(s, PromptTemplate("phone"));
    EXPECT_EQ(p.find(s.text), p.rfind(s.text));
    EXPECT_NE(p.find(s.text), std::string::npos);
    EXPECT_TRUE(p.starts_with("Phone features: "));
    EXPECT_TRUE(p.ends_with("Is this phone available? Yes or no? Answer:"));
}

TEST(BuildPrompt, EmptySerializationStillEndsWithCue)
{
    const auto p = zso::build_prompt(zso::SerializedInstance{"", "0"}, PromptTemplate("diode"));
    EXPECT_EQ(p, "Diode features:  Question: Is this diode available? Yes or no? Answer:");
}

TEST(BuildPrompt, CustomTemplates)
{
    const PromptTemplate t("diode", "Part: {serialization}\nIs this {noun} still sold? {Noun}? Answer:\n");
    EXPECT_EQ(zso::build_prompt(zso::SerializedInstance{"The a is 1.", "0"}, t),
              "Part: The a is 1.\nIs this diode still sold? Diode? Answer:");

    EXPECT_THROW(PromptTemplate("diode", "no placeholder Answer:"), zso::Error);
    EXPECT_THROW(PromptTemplate("diode", "{serialization} {serialization} Answer:"), zso::Error);
    EXPECT_THROW(PromptTemplate("diode", "{serialization} Is it available?"), zso::Error);
    try {
        PromptTemplate("diode", "nothing");
    } catch (const zso::Error& e) {
        EXPECT_EQ(e.code(), zso::ErrorCode::TemplateMissingPlaceholder);
    }
}

TEST(BuildPrompt, CapitalizesOnlyFirstLetter)
{
    EXPECT_EQ(PromptTemplate::capitalize("smart phone"), "Smart phone");
    EXPECT_EQ(PromptTemplate::capitalize(""), "");
}

// Splitting a serialization on ". The " gives back the non-skipped pairs
// whenever no value contains that separator.
TEST(SerializeRecord, SplitRoundTripProperty)
{
    std::mt19937 rng(3);
    const std::string alphabet = "abc XYZ019.,-/%";
    auto word = [&](std::size_t max) {
        std::string s(rng() % max, 'x');
        for (auto& c : s) c = alphabet[rng() % alphabet.size()];
        return std::string(zso::text::trim(s));
    };
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::pair<std::string, std::string>> feats;
        const int n = rng() % 6;
        for (int i = 0; i < n; ++i) {
            std::string name = "col" + std::to_string(i);
            std::string value = rng() % 4 == 0 ? "" : word(10);
            if (value.find(". The ") != std::string::npos) value.clear();
            feats.emplace_back(name, value);
        }
        const auto text = zso::serialize_record(record(feats)).text;

        std::vector<std::pair<std::string, std::string>> expected;
        for (const auto& f : feats)
            if (!f.second.empty()) expected.push_back(f);

        std::vector<std::pair<std::string, std::string>> parsed;
        if (!text.empty()) {
            std::string_view rest(text);
            ASSERT_TRUE(rest.starts_with("The "));
            rest.remove_prefix(4);
            ASSERT_TRUE(rest.ends_with("."));
            rest.remove_suffix(1);
            for (;;) {
                const auto cut = rest.find(". The ");
                auto sentence = rest.substr(0, cut);
                const auto is = sentence.find(" is ");
                parsed.emplace_back(std::string(sentence.substr(0, is)), std::string(sentence.substr(is + 4)));
                if (cut == std::string_view::npos) break;
                rest.remove_prefix(cut + 6);
            }
        }
        EXPECT_EQ(parsed, expected) << text;
    }
}

TEST(BuildPrompt, LengthGrowsLinearlyWithFeatureText)
{
    const PromptTemplate t("diode");
    const auto base = zso::build_prompt(record({{"a", "x"}}), zso::DatasetSchema{}, t).size();
    for (std::size_t k = 1; k < 50; ++k) {
        const auto len = zso::build_prompt(record({{"a", std::string(k, 'x')}}), zso::DatasetSchema{}, t).size();
        EXPECT_EQ(len, base + (k - 1));
    }
}

void check_goldens(const char* schema_file, const char* golden_dir)
{
    const auto schema = zso::load_schema(kData / schema_file);
    const auto records = zso::load_dataset(*schema.data_path, schema);
    const PromptTemplate tmpl(schema.entity_noun);
    ASSERT_GE(records.size(), 10u);
    for (const auto& r : records) {
        const auto golden = kData / "golden" / golden_dir / (r.row_id + ".txt");
        ASSERT_TRUE(std::filesystem::exists(golden)) << golden;
        EXPECT_EQ(zso::build_prompt(r, schema, tmpl), slurp(golden)) << golden;
    }
}

TEST(GoldenPrompts, Arrow) { check_goldens("arrow_sample.schema", "arrow"); }
TEST(GoldenPrompts, GsmArena) { check_goldens("gsm_sample.schema", "gsm_arena"); }

} // namespace
