#ifndef ZSO_METRICS_HPP
#define ZSO_METRICS_HPP

#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "answer_parser.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "types.hpp"

namespace zso {

enum class AbstentionPolicy { ExcludeAbstain, AbstainAsNegative, AbstainAsPositive };

constexpr std::string_view to_string(AbstentionPolicy p) noexcept
{
    switch (p) {
    case AbstentionPolicy::ExcludeAbstain: return "exclude_abstain";
    case AbstentionPolicy::AbstainAsNegative: return "abstain_as_negative";
    case AbstentionPolicy::AbstainAsPositive: return "abstain_as_positive";
    }
    return "?";
}

inline std::optional<AbstentionPolicy> parse_abstention_policy(std::string_view s)
{
    if (s == "exclude_abstain") return AbstentionPolicy::ExcludeAbstain;
    if (s == "abstain_as_negative") return AbstentionPolicy::AbstainAsNegative;
    if (s == "abstain_as_positive") return AbstentionPolicy::AbstainAsPositive;
    return std::nullopt;
}

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    std::uint64_t abstentions = 0;
    PartState positive_class = PartState::Available;

    std::uint64_t scored() const noexcept { return tp + fp + fn + tn; }
    std::uint64_t total() const noexcept { return scored() + abstentions; }

    /// Same predictions read with the other class as positive.
    ConfusionMatrix with_swapped_positive() const noexcept
    {
        return {tn, fn, fp, tp, abstentions, opposite(positive_class)};
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct GroundTruth {
    RowId row_id;
    PartState label = PartState::Available;
};

inline std::vector<GroundTruth> ground_truth(const std::vector<LabeledRecord>& records)
{
    std::vector<GroundTruth> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.row_id, r.label});
    return out;
}

/// Tallies verdicts against labels matched by row id. Under ExcludeAbstain an
/// abstaining row only bumps `abstentions`; the other policies score it as a
/// prediction of the negative or positive class.
inline ConfusionMatrix build_confusion(std::span<const Verdict> verdicts, std::span<const GroundTruth> labels,
                                       PartState positive_class,
                                       AbstentionPolicy policy = AbstentionPolicy::ExcludeAbstain)
{
    if (verdicts.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(verdicts.size()) + " verdicts vs " +
                                                   std::to_string(labels.size()) + " labels");
    std::unordered_map<std::string_view, std::pair<PartState, bool>> truth;
    truth.reserve(labels.size());
    for (const auto& g : labels)
        if (!truth.emplace(g.row_id, std::pair{g.label, false}).second)
            throw Error(ErrorCode::UnknownRowAlignment, "duplicate label row " + g.row_id);

    ConfusionMatrix cm;
    cm.positive_class = positive_class;
    for (const auto& v : verdicts) {
        auto it = truth.find(v.row_id);
        if (it == truth.end()) throw Error(ErrorCode::UnknownRowAlignment, "no label for row " + v.row_id);
        if (it->second.second) throw Error(ErrorCode::UnknownRowAlignment, "row " + v.row_id + " has two verdicts");
        it->second.second = true;

        std::optional<PartState> predicted = v.predicted();
        if (!predicted) {
            if (policy == AbstentionPolicy::ExcludeAbstain) {
                ++cm.abstentions;
                continue;
            }
            predicted = policy == AbstentionPolicy::AbstainAsPositive ? positive_class : opposite(positive_class);
        }
        const bool actual_pos = it->second.first == positive_class;
        const bool predicted_pos = *predicted == positive_class;
        if (predicted_pos) (actual_pos ? cm.tp : cm.fp) += 1;
        else (actual_pos ? cm.fn : cm.tn) += 1;
    }
    return cm;
}

class UndefinedMetric : public Error {
public:
    explicit UndefinedMetric(std::string metric)
        : Error(ErrorCode::UndefinedMetric, metric + " has a zero denominator"), metric_(std::move(metric))
    {
    }
    const std::string& metric() const noexcept { return metric_; }

private:
    std::string metric_;
};

namespace detail {
inline double ratio(std::uint64_t num, std::uint64_t den, const char* metric)
{
    if (den == 0) throw UndefinedMetric(metric);
    return static_cast<double>(num) / static_cast<double>(den);
}
} // namespace detail

/// (TP + TN) / (TP + TN + FP + FN)
inline double accuracy(const ConfusionMatrix& cm) { return detail::ratio(cm.tp + cm.tn, cm.scored(), "accuracy"); }

/// TP / (TP + FP)
inline double precision(const ConfusionMatrix& cm) { return detail::ratio(cm.tp, cm.tp + cm.fp, "precision"); }

/// TP / (TP + FN), the true positive rate.
inline double recall(const ConfusionMatrix& cm) { return detail::ratio(cm.tp, cm.tp + cm.fn, "recall"); }

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1(const ConfusionMatrix& cm)
{
    const double p = precision(cm);
    const double r = recall(cm);
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

/// FP / (FP + TN)
inline double fpr(const ConfusionMatrix& cm) { return detail::ratio(cm.fp, cm.fp + cm.tn, "fpr"); }

/// Trapezoidal area under (0,0) -> (FPR, TPR) -> (1,1), i.e. (TPR + 1 - FPR) / 2.
inline double auc_single_point(const ConfusionMatrix& cm)
{
    const double tpr = recall(cm);
    const double x = fpr(cm);
    return (tpr + 1.0 - x) / 2.0;
}

struct RocPoint {
    double fpr = 0;
    double tpr = 0;
    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

inline std::vector<RocPoint> roc_points(const ConfusionMatrix& cm)
{
    return {{0.0, 0.0}, {fpr(cm), recall(cm)}, {1.0, 1.0}};
}

/// Metric bundle for one (model, dataset) pair. An empty optional means the
/// metric is undefined for this matrix.
struct MetricsReport {
    std::string model_id;
    std::string dataset_name;
    ConfusionMatrix cm;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> fpr;
    std::optional<double> auc;
    double abstention_rate = 0;
    std::uint64_t abstain_no_match = 0;
    std::uint64_t abstain_transport = 0;
    std::vector<RocPoint> roc; // empty when the rates are undefined

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

namespace detail {
template <typename F>
std::optional<double> defined(F&& f, const ConfusionMatrix& cm)
{
    try {
        return f(cm);
    } catch (const UndefinedMetric&) {
        return std::nullopt;
    }
}
} // namespace detail

/// `abstention_rate` is abstentions over all evaluated rows, whatever policy
/// built the matrix; pass the raw abstain count when scoring abstentions.
inline MetricsReport make_report(std::string model_id, std::string dataset_name, const ConfusionMatrix& cm,
                                 std::uint64_t abstained, std::uint64_t evaluated_rows)
{
    MetricsReport r;
    r.model_id = std::move(model_id);
    r.dataset_name = std::move(dataset_name);
    r.cm = cm;
    r.accuracy = detail::defined(accuracy, cm);
    r.precision = detail::defined(precision, cm);
    r.recall = detail::defined(recall, cm);
    r.f1 = detail::defined(f1, cm);
    r.fpr = detail::defined(fpr, cm);
    r.auc = detail::defined(auc_single_point, cm);
    r.abstention_rate =
        evaluated_rows == 0 ? 0.0 : static_cast<double>(abstained) / static_cast<double>(evaluated_rows);
    if (r.fpr && r.recall) r.roc = roc_points(cm);
    return r;
}

inline MetricsReport make_report(std::string model_id, std::string dataset_name, const ConfusionMatrix& cm)
{
    return make_report(std::move(model_id), std::move(dataset_name), cm, cm.abstentions, cm.total());
}

/// Fixed-point text for human-readable tables.
inline std::string format_fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Table-style display: accuracy as a percentage with 2 decimals, the rest
/// with 3 decimals; undefined values render as "n/a".
inline std::string display_accuracy(const std::optional<double>& v)
{
    return v ? format_fixed(100.0 * *v, 2) : "n/a";
}

inline std::string display_ratio(const std::optional<double>& v) { return v ? format_fixed(*v, 3) : "n/a"; }

} // namespace zso

#endif // ZSO_METRICS_HPP
