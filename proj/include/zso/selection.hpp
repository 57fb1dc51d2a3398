#ifndef ZSO_SELECTION_HPP
#define ZSO_SELECTION_HPP

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "metrics.hpp"

namespace zso {

enum class VotingMetric { Accuracy, Precision, Recall, F1, Auc };

inline constexpr std::array<VotingMetric, 5> kVotingMetrics = {VotingMetric::Accuracy, VotingMetric::Precision,
                                                               VotingMetric::Recall, VotingMetric::F1,
                                                               VotingMetric::Auc};

constexpr std::string_view to_string(VotingMetric m) noexcept
{
    switch (m) {
    case VotingMetric::Accuracy: return "accuracy";
    case VotingMetric::Precision: return "precision";
    case VotingMetric::Recall: return "recall";
    case VotingMetric::F1: return "f1";
    case VotingMetric::Auc: return "auc";
    }
    return "?";
}

inline const std::optional<double>& metric_value(const MetricsReport& r, VotingMetric m) noexcept
{
    switch (m) {
    case VotingMetric::Accuracy: return r.accuracy;
    case VotingMetric::Precision: return r.precision;
    case VotingMetric::Recall: return r.recall;
    case VotingMetric::F1: return r.f1;
    case VotingMetric::Auc: break;
    }
    return r.auc;
}

struct VoteTally {
    std::string dataset_name;
    std::map<std::string, int> votes;                         // every model, including zero-vote ones
    std::map<std::string, std::vector<std::string>> leaders;  // metric -> models at its maximum
    std::optional<std::string> winner;                        // set when unique or tie-broken
    std::vector<std::string> tied;                            // models sharing the top count, when more than one
    bool tie_broken = false;

    bool is_tie() const noexcept { return tied.size() > 1 && !tie_broken; }

    friend bool operator==(const VoteTally&, const VoteTally&) = default;
};

struct VoteOptions {
    /// Resolve a top-count tie by the lexicographically smallest model id.
    bool lexicographic_tie_break = false;
};

/// One vote per metric to every report at that metric's maximum (exact
/// comparison). Reports with an undefined metric sit out that metric. The
/// model with most votes wins; ties are reported unless tie-breaking is asked for.
inline VoteTally vote(std::span<const MetricsReport> reports, VoteOptions options = {})
{
    if (reports.size() < 2) throw Error(ErrorCode::TooFewReports, "voting needs at least two reports");
    VoteTally tally;
    tally.dataset_name = reports.front().dataset_name;
    for (const auto& r : reports) {
        if (r.dataset_name != tally.dataset_name)
            throw Error(ErrorCode::MixedDatasets, r.dataset_name + " vs " + tally.dataset_name);
        if (!tally.votes.emplace(r.model_id, 0).second)
            throw Error(ErrorCode::InvalidConfig, "model " + r.model_id + " appears twice");
    }

    for (VotingMetric m : kVotingMetrics) {
        std::optional<double> best;
        for (const auto& r : reports)
            if (const auto& v = metric_value(r, m); v && (!best || *v > *best)) best = v;
        if (!best) continue;
        auto& leaders = tally.leaders[std::string(to_string(m))];
        for (const auto& r : reports) {
            if (const auto& v = metric_value(r, m); v && *v == *best) {
                ++tally.votes[r.model_id];
                leaders.push_back(r.model_id);
            }
        }
        std::sort(leaders.begin(), leaders.end());
    }

    int top = 0;
    for (const auto& [model, n] : tally.votes) top = std::max(top, n);
    for (const auto& [model, n] : tally.votes)
        if (n == top) tally.tied.push_back(model); // std::map keeps these sorted

    if (tally.tied.size() == 1) {
        tally.winner = tally.tied.front();
        tally.tied.clear();
    } else if (options.lexicographic_tie_break) {
        tally.winner = tally.tied.front();
        tally.tie_broken = true;
    }
    return tally;
}

} // namespace zso

#endif // ZSO_SELECTION_HPP
