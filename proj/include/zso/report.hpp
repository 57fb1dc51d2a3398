#ifndef ZSO_REPORT_HPP
#define ZSO_REPORT_HPP

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness.hpp"

namespace zso {

inline constexpr int kReportSchemaVersion = 1;

namespace report_detail {

inline nlohmann::json opt(const std::optional<double>& v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::optional<double> opt_from(const nlohmann::json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

/// Shortest text that reads back to the same double.
inline std::string shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string file_token(std::string_view s)
{
    std::string out;
    for (char c : s) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                          c == '-' || c == '_';
        out += keep ? c : '_';
    }
    return out;
}

} // namespace report_detail

inline nlohmann::json to_json(const ConfusionMatrix& cm)
{
    return {{"tp", cm.tp},
            {"fp", cm.fp},
            {"fn", cm.fn},
            {"tn", cm.tn},
            {"abstentions", cm.abstentions},
            {"positive_class", std::string(to_string(cm.positive_class))}};
}

inline nlohmann::json to_json(const MetricsReport& r)
{
    using report_detail::opt;
    nlohmann::json j;
    j["model_id"] = r.model_id;
    j["dataset"] = r.dataset_name;
    j["confusion"] = to_json(r.cm);
    j["accuracy"] = opt(r.accuracy);
    j["precision"] = opt(r.precision);
    j["recall"] = opt(r.recall);
    j["f1"] = opt(r.f1);
    j["fpr"] = opt(r.fpr);
    j["auc"] = opt(r.auc);
    j["abstention_rate"] = r.abstention_rate;
    j["abstentions_by_reason"] = {{"no_match", r.abstain_no_match}, {"transport_failure", r.abstain_transport}};
    j["roc"] = nlohmann::json::array();
    for (const auto& p : r.roc) j["roc"].push_back({p.fpr, p.tpr});
    return j;
}

inline MetricsReport metrics_from_json(const nlohmann::json& j)
{
    using report_detail::opt_from;
    MetricsReport r;
    r.model_id = j.at("model_id").get<std::string>();
    r.dataset_name = j.at("dataset").get<std::string>();
    const auto& c = j.at("confusion");
    r.cm.tp = c.at("tp").get<std::uint64_t>();
    r.cm.fp = c.at("fp").get<std::uint64_t>();
    r.cm.fn = c.at("fn").get<std::uint64_t>();
    r.cm.tn = c.at("tn").get<std::uint64_t>();
    r.cm.abstentions = c.at("abstentions").get<std::uint64_t>();
    auto pc = parse_part_state(c.at("positive_class").get<std::string>());
    if (!pc) throw Error(ErrorCode::InvalidConfig, "report has a bad positive_class");
    r.cm.positive_class = *pc;
    r.accuracy = opt_from(j, "accuracy");
    r.precision = opt_from(j, "precision");
    r.recall = opt_from(j, "recall");
    r.f1 = opt_from(j, "f1");
    r.fpr = opt_from(j, "fpr");
    r.auc = opt_from(j, "auc");
    r.abstention_rate = j.at("abstention_rate").get<double>();
    if (auto a = j.find("abstentions_by_reason"); a != j.end()) {
        r.abstain_no_match = a->at("no_match").get<std::uint64_t>();
        r.abstain_transport = a->at("transport_failure").get<std::uint64_t>();
    }
    for (const auto& p : j.at("roc")) r.roc.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return r;
}

inline nlohmann::json to_json(const VoteTally& t)
{
    nlohmann::json j;
    j["dataset"] = t.dataset_name;
    j["votes"] = t.votes;
    j["leaders"] = t.leaders;
    j["winner"] = t.winner ? nlohmann::json(*t.winner) : nlohmann::json(nullptr);
    j["tied"] = t.tied;
    j["tie_broken"] = t.tie_broken;
    return j;
}

/// Canonical report: sorted keys, shortest round-trip floats, and nothing
/// that varies between reruns (timestamps and counters live in meta.json).
inline nlohmann::json to_json(const RunReport& report)
{
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["datasets"] = nlohmann::json::array();
    for (const auto& d : report.datasets) {
        j["datasets"].push_back({{"name", d.name},
                                 {"n_total", d.stats.n_total},
                                 {"n_obsolete", d.stats.n_obsolete},
                                 {"n_available", d.stats.n_available},
                                 {"pct_obsolete", d.stats.pct_obsolete()},
                                 {"rows_evaluated", d.rows_evaluated},
                                 {"positive_class", std::string(to_string(d.positive_class))}});
    }
    j["results"] = nlohmann::json::array();
    for (const auto& run : report.results) {
        auto r = to_json(run.metrics);
        r["verdicts"] = nlohmann::json::array();
        for (const auto& v : run.verdicts)
            r["verdicts"].push_back({{"row_id", v.row_id},
                                     {"state", std::string(to_string(v.state))},
                                     {"reason", std::string(to_string(v.reason))},
                                     {"raw", v.raw}});
        j["results"].push_back(std::move(r));
    }
    j["votes"] = nlohmann::json::object();
    for (const auto& [name, tally] : report.tallies)
        j["votes"][name] = tally ? to_json(*tally) : nlohmann::json(nullptr);
    return j;
}

inline std::string canonical_json(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

inline nlohmann::json meta_json(const RunReport& report)
{
    nlohmann::json j;
    j["config_fingerprint"] = report.meta.config_fingerprint;
    j["started_at"] = report.meta.started_at;
    j["finished_at"] = report.meta.finished_at;
    j["backend_attempts"] = report.meta.backend_attempts;
    j["cache_entries"] = report.meta.cache_entries;
    j["replay"] = report.meta.replay;
    nlohmann::json breakdown = nlohmann::json::object();
    for (const auto& run : report.results)
        breakdown[run.metrics.model_id][run.metrics.dataset_name] = {
            {"no_match", run.metrics.abstain_no_match}, {"transport_failure", run.metrics.abstain_transport}};
    j["abstentions_by_reason"] = breakdown;
    return j;
}

/// Metric reports grouped by dataset, read back from a canonical report.
inline std::map<std::string, std::vector<MetricsReport>> reports_by_dataset(const nlohmann::json& report)
{
    std::map<std::string, std::vector<MetricsReport>> out;
    for (const auto& r : report.at("results")) {
        auto m = metrics_from_json(r);
        out[m.dataset_name].push_back(std::move(m));
    }
    return out;
}

/// (model, dataset, metric, value) rows; undefined values are left empty.
inline std::string metrics_csv(const RunReport& report)
{
    using report_detail::shortest;
    std::ostringstream out;
    out << "model,dataset,metric,value\n";
    for (const auto& run : report.results) {
        const auto& m = run.metrics;
        const std::string prefix = csv::quote(m.model_id) + "," + csv::quote(m.dataset_name) + ",";
        auto row = [&](const char* name, const std::string& value) { out << prefix << name << "," << value << "\n"; };
        auto opt = [&](const char* name, const std::optional<double>& v) { row(name, v ? shortest(*v) : ""); };
        opt("accuracy", m.accuracy);
        opt("precision", m.precision);
        opt("recall", m.recall);
        opt("f1", m.f1);
        opt("fpr", m.fpr);
        opt("auc", m.auc);
        row("abstention_rate", shortest(m.abstention_rate));
        row("tp", std::to_string(m.cm.tp));
        row("fp", std::to_string(m.cm.fp));
        row("fn", std::to_string(m.cm.fn));
        row("tn", std::to_string(m.cm.tn));
        row("abstentions", std::to_string(m.cm.abstentions));
    }
    return out.str();
}

inline std::string roc_csv(const MetricsReport& m)
{
    std::string out = "fpr,tpr\n";
    for (const auto& p : m.roc) out += report_detail::shortest(p.fpr) + "," + report_detail::shortest(p.tpr) + "\n";
    return out;
}

/// Results grid in display precision: one row per (model, dataset), grouped by model.
inline std::string markdown_report(const RunReport& report)
{
    std::ostringstream out;
    out << "# Evaluation report\n\n## Datasets\n\n";
    out << "| Dataset | N | Obsolete | Available | % obsolete | Rows evaluated | Positive class |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& d : report.datasets)
        out << "| " << d.name << " | " << d.stats.n_total << " | " << d.stats.n_obsolete << " | "
            << d.stats.n_available << " | " << format_percent(d.stats) << " | " << d.rows_evaluated << " | "
            << to_string(d.positive_class) << " |\n";

    out << "\n## Results\n\n";
    out << "| Model | Dataset | Accuracy | Precision | Recall | F1 | AUC | Abstention |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    std::vector<std::string> models;
    for (const auto& run : report.results)
        if (std::find(models.begin(), models.end(), run.metrics.model_id) == models.end())
            models.push_back(run.metrics.model_id);
    for (const auto& model : models) {
        for (const auto& run : report.results) {
            const auto& m = run.metrics;
            if (m.model_id != model) continue;
            out << "| " << m.model_id << " | " << m.dataset_name << " | " << display_accuracy(m.accuracy) << " | "
                << display_ratio(m.precision) << " | " << display_ratio(m.recall) << " | " << display_ratio(m.f1)
                << " | " << display_ratio(m.auc) << " | " << format_fixed(m.abstention_rate, 4) << " |\n";
        }
    }

    out << "\n## Model selection\n\n";
    for (const auto& [name, tally] : report.tallies) {
        out << "- " << name << ": ";
        if (!tally) {
            out << "single model, no vote\n";
            continue;
        }
        if (tally->winner)
            out << tally->winner.value() << " (" << tally->votes.at(*tally->winner) << "/" << kVotingMetrics.size()
                << " votes" << (tally->tie_broken ? ", tie broken by model id" : "") << ")";
        else {
            out << "tie between";
            for (const auto& t : tally->tied) out << " " << t;
        }
        out << "\n";
    }
    return out.str();
}

/// Writes through a temporary file and a rename so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, path.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, path.string() + ": " + ec.message());
}

inline std::string roc_file_name(const MetricsReport& m)
{
    return "roc_" + report_detail::file_token(m.model_id) + "_" + report_detail::file_token(m.dataset_name) + ".csv";
}

/// Writes the requested formats plus ROC data and meta.json into `outdir`.
/// Nothing is written for an empty format set.
inline std::vector<std::filesystem::path> emit_report(const RunReport& report, const std::set<ReportFormat>& formats,
                                                      const std::filesystem::path& outdir)
{
    std::vector<std::filesystem::path> written;
    if (formats.empty()) return written;
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw Error(ErrorCode::IoError, outdir.string() + ": " + ec.message());

    auto put = [&](const std::filesystem::path& name, const std::string& content) {
        write_file_atomic(outdir / name, content);
        written.push_back(outdir / name);
    };
    if (formats.count(ReportFormat::Json)) put("report.json", canonical_json(report));
    if (formats.count(ReportFormat::Markdown)) put("report.md", markdown_report(report));
    if (formats.count(ReportFormat::Csv)) put("metrics.csv", metrics_csv(report));
    for (const auto& run : report.results)
        if (!run.metrics.roc.empty()) put(roc_file_name(run.metrics), roc_csv(run.metrics));
    put("meta.json", meta_json(report).dump(2) + "\n");
    return written;
}

} // namespace zso

#endif // ZSO_REPORT_HPP
