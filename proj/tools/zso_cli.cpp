// zso: zero-shot obsolescence classification harness.
//
//   zso run    --config run.conf [overrides...]   evaluate every model on every dataset
//   zso replay --config run.conf                  same, answering only from the cache
//   zso stats  --dataset arrow.schema             class balance of datasets
//   zso vote   --report out/report.json           redo model selection on a report

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <zso/zso.hpp>

namespace {

struct RunFlags {
    std::string config;
    std::vector<std::string> datasets;
    std::vector<std::string> backends;
    std::string template_file;
    std::string policy;
    std::string positive_class;
    std::string cache;
    std::string out;
    std::optional<std::size_t> max_in_flight;
    std::optional<std::size_t> limit;
    std::vector<std::string> formats;
    bool strict = false;
    bool tie_break = false;
    std::optional<std::size_t> dry_run;
};

void add_run_flags(CLI::App& cmd, RunFlags& f)
{
    cmd.add_option("-c,--config", f.config, "Run config file");
    cmd.add_option("-d,--dataset", f.datasets, "Dataset schema file (repeatable)");
    cmd.add_option("-b,--backend", f.backends, "Backend config file (repeatable)");
    cmd.add_option("--template", f.template_file, "Prompt template file");
    cmd.add_option("--policy", f.policy, "exclude_abstain | abstain_as_negative | abstain_as_positive");
    cmd.add_option("--positive-class", f.positive_class, "Available | Obsolete (overrides schemas)");
    cmd.add_option("--cache", f.cache, "Response cache (JSON Lines)");
    cmd.add_option("-o,--out", f.out, "Output directory");
    cmd.add_option("--max-in-flight", f.max_in_flight, "Concurrent requests per model")->check(CLI::PositiveNumber);
    cmd.add_option("--limit", f.limit, "Evaluate only the first N rows of each dataset");
    cmd.add_option("--format", f.formats, "json, csv, markdown (repeatable; 'none' for no files)")->delimiter(',');
    cmd.add_flag("--strict", f.strict, "Exit with status 2 when a dataset vote ends in a tie");
    cmd.add_flag("--tie-break", f.tie_break, "Break vote ties by model id");
    cmd.add_option("--dry-run", f.dry_run, "Print the first N prompts of each dataset and exit");
}

zso::RunConfig build_config(const RunFlags& f)
{
    zso::RunConfig c;
    if (!f.config.empty()) c = zso::run_config_from_config(zso::load_key_values(f.config));
    for (const auto& d : f.datasets) c.dataset_schemas.emplace_back(d);
    for (const auto& b : f.backends) c.backends.push_back(zso::load_backend(b));
    if (!f.template_file.empty()) {
        std::ifstream in(f.template_file, std::ios::binary);
        if (!in) throw zso::Error(zso::ErrorCode::IoError, "cannot read " + f.template_file);
        c.options.question_form = std::string(std::istreambuf_iterator<char>(in), {});
    }
    if (!f.policy.empty()) {
        auto p = zso::parse_abstention_policy(f.policy);
        if (!p) throw zso::Error(zso::ErrorCode::InvalidConfig, "unknown policy " + f.policy);
        c.options.policy = *p;
    }
    if (!f.positive_class.empty()) {
        auto s = zso::parse_part_state(f.positive_class);
        if (!s) throw zso::Error(zso::ErrorCode::InvalidConfig, "unknown positive class " + f.positive_class);
        c.options.positive_class = *s;
    }
    if (!f.cache.empty()) c.cache_path = f.cache;
    if (!f.out.empty()) c.output_dir = f.out;
    if (f.max_in_flight) c.options.max_in_flight = f.max_in_flight;
    if (f.limit) c.options.row_limit = f.limit;
    if (!f.formats.empty()) {
        c.formats.clear();
        for (const auto& name : f.formats) {
            if (name == "none") continue;
            auto fmt = zso::parse_report_format(name);
            if (!fmt) throw zso::Error(zso::ErrorCode::InvalidConfig, "unknown format " + name);
            c.formats.insert(*fmt);
        }
    }
    if (f.strict) c.strict_ties = true;
    if (f.tie_break) c.options.voting.lexicographic_tie_break = true;
    return c;
}

void print_summary(const zso::RunReport& report)
{
    for (const auto& run : report.results) {
        const auto& m = run.metrics;
        std::cout << m.model_id << " / " << m.dataset_name << ": accuracy " << zso::display_accuracy(m.accuracy)
                  << ", precision " << zso::display_ratio(m.precision) << ", recall " << zso::display_ratio(m.recall)
                  << ", f1 " << zso::display_ratio(m.f1) << ", auc " << zso::display_ratio(m.auc)
                  << ", abstained " << m.cm.abstentions << "\n";
    }
    for (const auto& [name, tally] : report.tallies) {
        if (!tally) continue;
        std::cout << "winner " << name << ": ";
        if (tally->winner) std::cout << *tally->winner << (tally->tie_broken ? " (tie broken)" : "") << "\n";
        else {
            std::cout << "tie:";
            for (const auto& t : tally->tied) std::cout << " " << t;
            std::cout << "\n";
        }
    }
}

int do_run(const RunFlags& flags, bool replay)
{
    const auto config = build_config(flags);
    config.validate();
    if (flags.dry_run) {
        for (const auto& input : zso::load_inputs(config.dataset_schemas))
            for (const auto& item : zso::render_prompts(input, config.options, *flags.dry_run))
                std::cout << "[" << input.schema.name << " #" << item.row_id << "] " << item.prompt << "\n";
        return 0;
    }
    const auto report = zso::run_evaluation(config, zso::make_backend, replay);
    for (const auto& p : zso::emit_report(report, config.formats, config.output_dir)) std::cerr << "wrote " << p.string() << "\n";
    print_summary(report);
    return config.strict_ties && report.any_tie() ? 2 : 0;
}

int do_stats(const std::vector<std::string>& schemas, const std::string& data_override)
{
    std::cout << "| Dataset | N | N0 (obsolete) | N1 (available) | % obsolete |\n|---|---|---|---|---|\n";
    for (const auto& path : schemas) {
        auto schema = zso::load_schema(path);
        std::filesystem::path data = data_override.empty() ? schema.data_path.value_or("") : std::filesystem::path(data_override);
        if (data.empty()) throw zso::Error(zso::ErrorCode::InvalidConfig, path + ": no data path");
        const auto st = zso::summarize(zso::load_dataset(data, schema));
        std::cout << "| " << schema.name << " | " << st.n_total << " | " << st.n_obsolete << " | " << st.n_available
                  << " | " << zso::format_percent(st) << " |\n";
    }
    return 0;
}

int do_vote(const std::string& report_path, bool tie_break, bool strict)
{
    std::ifstream in(report_path, std::ios::binary);
    if (!in) throw zso::Error(zso::ErrorCode::IoError, "cannot read " + report_path);
    const auto json = nlohmann::json::parse(in);
    bool tie = false;
    for (const auto& [dataset, reports] : zso::reports_by_dataset(json)) {
        if (reports.size() < 2) {
            std::cout << dataset << ": single model, no vote\n";
            continue;
        }
        const auto tally = zso::vote(reports, {tie_break});
        std::cout << dataset << ":";
        for (const auto& [model, n] : tally.votes) std::cout << " " << model << "=" << n;
        if (tally.winner) std::cout << " -> " << *tally.winner << (tally.tie_broken ? " (tie broken)" : "") << "\n";
        else {
            std::cout << " -> tie\n";
            tie = true;
        }
    }
    return strict && tie ? 2 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zero-shot obsolescence classification harness"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Evaluate every backend on every dataset");
    add_run_flags(*run, run_flags);

    RunFlags replay_flags;
    auto* replay = app.add_subcommand("replay", "Score from the response cache only, without network access");
    add_run_flags(*replay, replay_flags);

    std::vector<std::string> stats_schemas;
    std::string stats_data;
    auto* stats = app.add_subcommand("stats", "Print dataset class balance");
    stats->add_option("-d,--dataset", stats_schemas, "Dataset schema file (repeatable)")->required();
    stats->add_option("--data", stats_data, "CSV file overriding the schema's data path");

    std::string vote_report;
    bool vote_tie_break = false;
    bool vote_strict = false;
    auto* vote = app.add_subcommand("vote", "Re-run model selection over an existing report.json");
    vote->add_option("-r,--report", vote_report, "Path to report.json")->required();
    vote->add_flag("--tie-break", vote_tie_break, "Break ties by model id");
    vote->add_flag("--strict", vote_strict, "Exit with status 2 on a tie");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return do_run(run_flags, false);
        if (*replay) return do_run(replay_flags, true);
        if (*stats) return do_stats(stats_schemas, stats_data);
        if (*vote) return do_vote(vote_report, vote_tie_break, vote_strict);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
