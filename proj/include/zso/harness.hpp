#ifndef ZSO_HARNESS_HPP
#define ZSO_HARNESS_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "answer_parser.hpp"
#include "dataset.hpp"
#include "dispatch.hpp"
#include "gateway.hpp"
#include "key_value.hpp"
#include "metrics.hpp"
#include "response_cache.hpp"
#include "selection.hpp"
#include "serialization.hpp"

namespace zso {

enum class ReportFormat { Json, Csv, Markdown };

inline std::optional<ReportFormat> parse_report_format(std::string_view s)
{
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "markdown" || s == "md") return ReportFormat::Markdown;
    return std::nullopt;
}

/// Knobs shared by every (model, dataset) evaluation in a run.
struct EvaluationOptions {
    std::optional<std::string> question_form; // custom prompt template
    AbstentionPolicy policy = AbstentionPolicy::ExcludeAbstain;
    std::optional<PartState> positive_class;  // overrides each schema's choice
    std::optional<std::size_t> max_in_flight; // overrides each backend's choice
    std::optional<std::size_t> row_limit;     // evaluate only this many leading rows
    VoteOptions voting;
};

struct RunConfig {
    std::vector<std::filesystem::path> dataset_schemas;
    std::vector<BackendConfig> backends;
    EvaluationOptions options;
    std::filesystem::path cache_path;
    std::filesystem::path output_dir = "out";
    std::set<ReportFormat> formats = {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown};
    bool strict_ties = false;

    void validate() const
    {
        if (dataset_schemas.empty()) throw Error(ErrorCode::InvalidConfig, "run needs at least one dataset");
        if (backends.empty()) throw Error(ErrorCode::InvalidConfig, "run needs at least one backend");
        std::set<std::string> ids;
        for (const auto& b : backends) {
            b.validate();
            if (!ids.insert(b.model_id).second)
                throw Error(ErrorCode::InvalidConfig, "model_id " + b.model_id + " used by two backends");
        }
        if (options.max_in_flight && *options.max_in_flight < 1)
            throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
    }
};

/// Run documents reuse the schema file syntax. Keys:
///   dataset = <schema file>   (repeated)
///   backend = <backend file>  (repeated)
///   template_file, abstention_policy, positive_class, cache, output_dir,
///   max_in_flight, row_limit, formats (comma list), strict_ties, tie_break
inline RunConfig run_config_from_config(const KeyValueDocument& doc)
{
    doc.check_keys({"dataset", "backend", "template_file", "abstention_policy", "positive_class", "cache",
                    "output_dir", "max_in_flight", "row_limit", "formats", "strict_ties", "tie_break"});
    RunConfig c;
    for (const auto& d : doc.get_all("dataset")) c.dataset_schemas.push_back(doc.resolve_path(d));
    for (const auto& b : doc.get_all("backend")) c.backends.push_back(load_backend(doc.resolve_path(b)));
    if (auto t = doc.get("template_file")) {
        std::ifstream in(doc.resolve_path(*t), std::ios::binary);
        if (!in) doc.fail("cannot read template_file " + *t);
        std::ostringstream ss;
        ss << in.rdbuf();
        c.options.question_form = ss.str();
    }
    if (auto p = doc.get("abstention_policy")) {
        auto policy = parse_abstention_policy(*p);
        if (!policy) doc.fail("unknown abstention_policy '" + *p + "'");
        c.options.policy = *policy;
    }
    if (auto p = doc.get("positive_class")) {
        auto state = parse_part_state(*p);
        if (!state) doc.fail("positive_class must be Available or Obsolete");
        c.options.positive_class = *state;
    }
    if (auto p = doc.get("cache")) c.cache_path = doc.resolve_path(*p);
    if (auto p = doc.get("output_dir")) c.output_dir = doc.resolve_path(*p);
    c.options.max_in_flight = doc.get_number<std::size_t>("max_in_flight");
    c.options.row_limit = doc.get_number<std::size_t>("row_limit");
    if (auto f = doc.get("formats")) {
        c.formats.clear();
        std::string_view rest = *f;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = text::trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (item.empty()) continue;
            auto fmt = parse_report_format(item);
            if (!fmt) doc.fail("unknown report format '" + std::string(item) + "'");
            c.formats.insert(*fmt);
        }
    }
    c.strict_ties = doc.get_bool("strict_ties").value_or(false);
    c.options.voting.lexicographic_tie_break = doc.get_bool("tie_break").value_or(false);
    return c;
}

struct DatasetInput {
    DatasetSchema schema;
    std::vector<LabeledRecord> records;
};

struct DatasetSection {
    std::string name;
    DatasetStats stats;     // over the whole file
    std::size_t rows_evaluated = 0;
    PartState positive_class = PartState::Available;

    friend bool operator==(const DatasetSection&, const DatasetSection&) = default;
};

struct ModelRun {
    MetricsReport metrics;
    std::vector<Verdict> verdicts; // record order

    friend bool operator==(const ModelRun&, const ModelRun&) = default;
};

/// Facts about how the run went that may differ between reruns.
struct RunMetadata {
    std::string config_fingerprint;
    std::string started_at;
    std::string finished_at;
    std::map<std::string, std::size_t> backend_attempts; // model -> attempts that reached a backend
    std::size_t cache_entries = 0;
    bool replay = false;
};

struct RunReport {
    std::vector<DatasetSection> datasets;
    std::vector<ModelRun> results;                           // dataset-major, then model config order
    std::map<std::string, std::optional<VoteTally>> tallies; // none when only one model ran
    RunMetadata meta;

    const ModelRun* find(std::string_view model, std::string_view dataset) const
    {
        for (const auto& r : results)
            if (r.metrics.model_id == model && r.metrics.dataset_name == dataset) return &r;
        return nullptr;
    }

    bool any_tie() const
    {
        for (const auto& [name, t] : tallies)
            if (t && t->is_tie()) return true;
        return false;
    }
};

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Prompts for the first `limit` rows of a dataset (or all of them).
inline std::vector<WorkItem> render_prompts(const DatasetInput& input, const EvaluationOptions& options,
                                            std::optional<std::size_t> limit = std::nullopt)
{
    const PromptTemplate tmpl = options.question_form ? PromptTemplate(input.schema.entity_noun, *options.question_form)
                                                      : PromptTemplate(input.schema.entity_noun);
    std::size_t n = input.records.size();
    if (limit) n = std::min(n, *limit);
    std::vector<WorkItem> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = input.records[i];
        items.push_back({rec.row_id, build_prompt(rec, input.schema, tmpl)});
    }
    return items;
}

/// Scores every backend on every dataset: models one after another, rows of
/// a model concurrently. Aggregation only starts once all rows are back and
/// works in record order.
inline RunReport evaluate(const std::vector<DatasetInput>& datasets, const std::vector<Backend*>& backends,
                          ResponseCache& cache, const EvaluationOptions& options = {})
{
    RunReport report;
    report.meta.started_at = utc_timestamp();

    std::vector<std::vector<WorkItem>> prompts;
    for (const auto& d : datasets) {
        DatasetSection section;
        section.name = d.schema.name;
        section.stats = summarize(d.records);
        section.positive_class = options.positive_class.value_or(d.schema.positive_class);
        prompts.push_back(render_prompts(d, options, options.row_limit));
        section.rows_evaluated = prompts.back().size();
        report.datasets.push_back(std::move(section));
    }

    // results[dataset][model]
    std::vector<std::vector<ModelRun>> grid(datasets.size(), std::vector<ModelRun>(backends.size()));
    for (std::size_t m = 0; m < backends.size(); ++m) {
        Backend& backend = *backends[m];
        const std::size_t in_flight = options.max_in_flight.value_or(backend.config().max_in_flight);
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            const auto responses = dispatch_all(prompts[d], backend, cache, in_flight);

            ModelRun run;
            run.verdicts.reserve(responses.size());
            std::uint64_t abstained = 0;
            std::uint64_t no_match = 0;
            std::uint64_t transport = 0;
            for (const auto& r : responses) {
                run.verdicts.push_back(parse_response(r));
                const auto& v = run.verdicts.back();
                if (v.state == VerdictState::Abstain) {
                    ++abstained;
                    (v.reason == VerdictReason::TransportFailure ? transport : no_match) += 1;
                }
            }
            std::vector<GroundTruth> truth;
            truth.reserve(responses.size());
            for (std::size_t i = 0; i < responses.size(); ++i)
                truth.push_back({datasets[d].records[i].row_id, datasets[d].records[i].label});

            const auto cm = build_confusion(run.verdicts, truth, report.datasets[d].positive_class, options.policy);
            run.metrics = make_report(backend.config().model_id, datasets[d].schema.name, cm, abstained,
                                      responses.size());
            run.metrics.abstain_no_match = no_match;
            run.metrics.abstain_transport = transport;
            grid[d][m] = std::move(run);
        }
    }

    for (std::size_t d = 0; d < datasets.size(); ++d) {
        std::vector<MetricsReport> for_vote;
        for (auto& run : grid[d]) {
            for_vote.push_back(run.metrics);
            report.results.push_back(std::move(run));
        }
        std::optional<VoteTally> tally;
        if (for_vote.size() >= 2) tally = vote(for_vote, options.voting);
        report.tallies[datasets[d].schema.name] = std::move(tally);
    }
    report.meta.finished_at = utc_timestamp();
    return report;
}

inline std::vector<DatasetInput> load_inputs(const std::vector<std::filesystem::path>& schema_paths)
{
    std::vector<DatasetInput> inputs;
    std::set<std::string> names;
    for (const auto& p : schema_paths) {
        DatasetInput in{load_schema(p), {}};
        if (!in.schema.data_path) throw Error(ErrorCode::InvalidConfig, p.string() + ": schema has no 'data' path");
        if (!names.insert(in.schema.name).second)
            throw Error(ErrorCode::InvalidConfig, "dataset name " + in.schema.name + " used twice");
        in.records = load_dataset(*in.schema.data_path, in.schema);
        inputs.push_back(std::move(in));
    }
    return inputs;
}

/// SHA-256 over a canonical JSON rendering of everything that shapes results.
inline std::string config_fingerprint(const RunConfig& config)
{
    nlohmann::json j;
    for (const auto& p : config.dataset_schemas) j["datasets"].push_back(p.generic_string());
    for (const auto& b : config.backends) {
        j["backends"].push_back({{"kind", b.kind == BackendKind::Stub ? "stub" : "http_completion"},
                                 {"model_id", b.model_id},
                                 {"endpoint_url", b.endpoint_url},
                                 {"max_new_tokens", b.max_new_tokens},
                                 {"max_retries", b.max_retries},
                                 {"stub_default", b.stub_default ? *b.stub_default : ""},
                                 {"stub_table", b.stub_table}});
    }
    const auto& o = config.options;
    j["template"] = o.question_form.value_or("");
    j["policy"] = to_string(o.policy);
    j["positive_class"] = o.positive_class ? std::string(to_string(*o.positive_class)) : "";
    j["row_limit"] = o.row_limit ? static_cast<long long>(*o.row_limit) : -1;
    j["tie_break"] = o.voting.lexicographic_tie_break;
    return sha256_hex(j.dump());
}

using BackendFactory = std::function<std::unique_ptr<Backend>(const BackendConfig&)>;

/// Loads datasets, builds backends (cache-only ones when `replay` is set),
/// opens the cache and evaluates.
inline RunReport run_evaluation(const RunConfig& config, const BackendFactory& factory = make_backend,
                                bool replay = false)
{
    config.validate();
    const auto inputs = load_inputs(config.dataset_schemas);
    std::vector<std::unique_ptr<Backend>> owned;
    std::vector<Backend*> backends;
    for (const auto& b : config.backends) {
        owned.push_back(replay ? std::make_unique<OfflineBackend>(b) : factory(b));
        backends.push_back(owned.back().get());
    }
    if (replay && (config.cache_path.empty() || !std::filesystem::exists(config.cache_path)))
        throw Error(ErrorCode::IoError, "replay needs an existing cache file");
    ResponseCache cache(config.cache_path);

    // Count attempts via a thin wrapper so the number is known for any backend.
    struct Counting final : Backend {
        Backend& inner;
        std::atomic<std::size_t> attempts{0};
        explicit Counting(Backend& b) : Backend(b.config()), inner(b) {}
        Attempt attempt(std::string_view prompt) override
        {
            ++attempts;
            return inner.attempt(prompt);
        }
    };
    std::vector<std::unique_ptr<Counting>> counters;
    std::vector<Backend*> counted;
    for (auto* b : backends) {
        counters.push_back(std::make_unique<Counting>(*b));
        counted.push_back(counters.back().get());
    }

    RunReport report = evaluate(inputs, counted, cache, config.options);
    report.meta.config_fingerprint = config_fingerprint(config);
    report.meta.replay = replay;
    for (const auto& c : counters) report.meta.backend_attempts[c->config().model_id] = c->attempts.load();
    report.meta.cache_entries = cache.size();
    return report;
}

} // namespace zso

#endif // ZSO_HARNESS_HPP
