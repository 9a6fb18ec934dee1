// Evaluation: confusion counts and precision/recall/F1 with Split as the
// positive class, ROC/AUC in per-class, micro and macro variants, repeated
// -run summary statistics, and the conversion of diarization output vectors
// into boundary / within-segment error counts.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scd/baselines.hpp"
#include "scd/common.hpp"
#include "scd/features.hpp"
#include "scd/nn.hpp"

namespace scd {

struct ConfusionMatrix {
    std::size_t tp = 0;  // predicted Split, gold Split
    std::size_t fp = 0;  // predicted Split, gold Same
    std::size_t fn = 0;  // predicted Same, gold Split
    std::size_t tn = 0;  // predicted Same, gold Same
    std::size_t total() const { return tp + fp + fn + tn; }
};

inline ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> gold) {
    if (predicted.size() != gold.size())
        throw ValidationError("predicted and gold label counts differ: " +
                              std::to_string(predicted.size()) + " vs " +
                              std::to_string(gold.size()));
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool p = predicted[i] == Label::Split;
        const bool g = gold[i] == Label::Split;
        if (p && g) ++cm.tp;
        else if (p && !g) ++cm.fp;
        else if (!p && g) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Set when the corresponding denominator was 0 and the value was
    // reported as 0 by convention.
    bool precision_degenerate = false;
    bool recall_degenerate = false;
};

inline PRF prf(const ConfusionMatrix& cm) {
    PRF out;
    const std::size_t p_den = cm.tp + cm.fp;
    const std::size_t r_den = cm.tp + cm.fn;
    if (p_den == 0) out.precision_degenerate = true;
    else out.precision = static_cast<double>(cm.tp) / static_cast<double>(p_den);
    if (r_den == 0) out.recall_degenerate = true;
    else out.recall = static_cast<double>(cm.tp) / static_cast<double>(r_den);
    const double f_den = out.precision + out.recall;
    out.f1 = f_den > 0.0 ? 2.0 * out.precision * out.recall / f_den : 0.0;
    return out;
}

// Same confusion matrix viewed with Same as the positive class.
inline ConfusionMatrix flip_positive(const ConfusionMatrix& cm) {
    return {cm.tn, cm.fn, cm.fp, cm.tp};
}

enum class RocVariant { Split, Same, Micro, Macro };

inline const char* roc_variant_name(RocVariant v) {
    switch (v) {
        case RocVariant::Split: return "split";
        case RocVariant::Same: return "same";
        case RocVariant::Micro: return "micro";
        default: return "macro";
    }
}

struct RocCurve {
    RocVariant variant = RocVariant::Split;
    // False when the positive or negative side is empty, which leaves the
    // curve undefined; points are then empty and auc is meaningless.
    bool defined = false;
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), fpr non-decreasing
    double auc = 0.0;
};

// Threshold sweep over the distinct scores in descending order, tied scores
// grouped into one step; area by the trapezoidal rule. Equals the
// Mann-Whitney pairwise statistic with ties counted one half.
inline RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& is_positive,
                          RocVariant variant) {
    if (scores.size() != is_positive.size())
        throw ValidationError("score and label counts differ");
    for (double s : scores)
        if (!std::isfinite(s)) throw ValidationError("scores must be finite");
    RocCurve curve;
    curve.variant = variant;
    std::size_t n_pos = 0;
    for (bool b : is_positive) n_pos += b ? 1 : 0;
    const std::size_t n_neg = is_positive.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) return curve;

    curve.defined = true;
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    curve.points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (is_positive[order[i]]) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                                  static_cast<double>(tp) / static_cast<double>(n_pos));
    }
    for (std::size_t j = 1; j < curve.points.size(); ++j) {
        const auto& [x0, y0] = curve.points[j - 1];
        const auto& [x1, y1] = curve.points[j];
        curve.auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    return curve;
}

namespace detail {

// TPR at a given FPR: the max TPR among exact-FPR points (vertical segments
// collapse to their top), linear interpolation between neighbors otherwise.
inline double tpr_at_fpr(const RocCurve& curve, double fpr) {
    double exact = -1.0;
    for (const auto& [x, y] : curve.points)
        if (x == fpr) exact = std::max(exact, y);
    if (exact >= 0.0) return exact;
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    for (const auto& [x, y] : curve.points) {
        if (x < fpr) {
            x0 = x;
            y0 = y;
        } else {
            x1 = x;
            y1 = y;
            break;
        }
    }
    return y0 + (y1 - y0) * (fpr - x0) / (x1 - x0);
}

}  // namespace detail

struct RocSet {
    RocCurve split;
    RocCurve same;
    RocCurve micro;
    RocCurve macro;
};

// All four variants from one score vector (the predicted Split probability):
// per-class curves score Split by p and Same by 1-p; micro pools both
// classes' (score, indicator) pairs; macro averages the two per-class curves
// on a fixed 101-point FPR grid.
inline RocSet roc_set(std::span<const double> split_scores, std::span<const Label> labels) {
    if (split_scores.size() != labels.size())
        throw ValidationError("score and label counts differ");
    RocSet set;
    std::vector<bool> is_split(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) is_split[i] = labels[i] == Label::Split;

    set.split = roc_curve(split_scores, is_split, RocVariant::Split);

    std::vector<double> same_scores(split_scores.size());
    std::vector<bool> is_same(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        same_scores[i] = 1.0 - split_scores[i];
        is_same[i] = !is_split[i];
    }
    set.same = roc_curve(same_scores, is_same, RocVariant::Same);

    std::vector<double> pooled_scores;
    std::vector<bool> pooled_positive;
    pooled_scores.reserve(2 * labels.size());
    pooled_positive.reserve(2 * labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pooled_scores.push_back(split_scores[i]);
        pooled_positive.push_back(is_split[i]);
        pooled_scores.push_back(same_scores[i]);
        pooled_positive.push_back(is_same[i]);
    }
    set.micro = roc_curve(pooled_scores, pooled_positive, RocVariant::Micro);

    set.macro.variant = RocVariant::Macro;
    if (set.split.defined && set.same.defined) {
        set.macro.defined = true;
        for (int g = 0; g <= 100; ++g) {
            const double f = static_cast<double>(g) / 100.0;
            set.macro.points.emplace_back(
                f, (detail::tpr_at_fpr(set.split, f) + detail::tpr_at_fpr(set.same, f)) / 2.0);
        }
        for (std::size_t j = 1; j < set.macro.points.size(); ++j) {
            const auto& [x0, y0] = set.macro.points[j - 1];
            const auto& [x1, y1] = set.macro.points[j];
            set.macro.auc += (x1 - x0) * (y0 + y1) / 2.0;
        }
    }
    return set;
}

struct DiarizationErrors {
    std::size_t type1 = 0;        // segment classified unlike its utterance's first segment
    std::size_t type2 = 0;        // missed boundary: last of u_i equals first of u_{i+1}
    std::size_t boundary_tp = 0;  // detected boundary between consecutive utterances
    std::size_t within_tn = 0;    // within-utterance segments matching the first segment
};

// Converts per-utterance classification vectors c_1..c_U (one speaker id per
// segment) into boundary/within error counts. Within an utterance, every
// segment after the first that disagrees with the first is a type-1 error.
// Between utterances, an undetected change (last id of one equals first id
// of the next) is a type-2 error.
inline DiarizationErrors diarization_to_cpd(const std::vector<std::vector<long long>>& vectors) {
    if (vectors.empty()) throw ValidationError("need at least one utterance vector");
    for (std::size_t i = 0; i < vectors.size(); ++i)
        if (vectors[i].empty())
            throw ValidationError("utterance vector " + std::to_string(i + 1) + " is empty");
    DiarizationErrors e;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto& c = vectors[i];
        for (std::size_t j = 1; j < c.size(); ++j)
            (c[j] != c[0] ? e.type1 : e.within_tn)++;
        if (i + 1 < vectors.size())
            (c.back() == vectors[i + 1][0] ? e.type2 : e.boundary_tp)++;
    }
    return e;
}

// Boundary-detection PRF: true positives are detected boundaries, misses are
// type-2 errors, false alarms are type-1 errors.
inline PRF diarization_prf(const DiarizationErrors& e) {
    return prf(ConfusionMatrix{e.boundary_tp, e.type1, e.type2, e.within_tn});
}

inline std::vector<std::vector<long long>> parse_diarization_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("diarization input: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("diarization input must be an array of integer arrays");
    std::vector<std::vector<long long>> out;
    for (const auto& inner : j) {
        if (!inner.is_array())
            throw ParseError("diarization input must be an array of integer arrays");
        std::vector<long long> vec;
        for (const auto& v : inner) {
            if (!v.is_number_integer())
                throw ParseError("diarization segment ids must be integers");
            vec.push_back(v.get<long long>());
        }
        out.push_back(std::move(vec));
    }
    return out;
}

struct EvalReport {
    ConfusionMatrix confusion;  // Split positive
    PRF prf_split;
    PRF prf_same;
    double accuracy = 0.0;
    RocSet roc;
    std::size_t n_same = 0;
    std::size_t n_split = 0;
    std::optional<double> oov_rate;
};

// Core scoring path: predictions are score > threshold, curves come from the
// raw scores.
inline EvalReport evaluate_scores(std::span<const double> split_scores,
                                  std::span<const Label> labels, double threshold = 0.5) {
    if (labels.empty()) throw ValidationError("cannot evaluate an empty test set");
    if (split_scores.size() != labels.size())
        throw ValidationError("score and label counts differ");
    EvalReport report;
    std::vector<Label> predicted(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        predicted[i] = split_scores[i] > threshold ? Label::Split : Label::Same;
    report.confusion = confusion(predicted, labels);
    report.prf_split = prf(report.confusion);
    report.prf_same = prf(flip_positive(report.confusion));
    report.accuracy = static_cast<double>(report.confusion.tp + report.confusion.tn) /
                      static_cast<double>(report.confusion.total());
    report.roc = roc_set(split_scores, labels);
    for (Label l : labels) (l == Label::Split ? report.n_split : report.n_same)++;
    return report;
}

inline std::vector<double> model_split_scores(const Model& model, const Dataset& ds) {
    const auto probs = predict(model, ds.features);
    std::vector<double> scores(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) scores[i] = probs[i].p_split;
    return scores;
}

inline EvalReport evaluate_model(const Model& model, const Dataset& ds, double threshold = 0.5) {
    return evaluate_scores(model_split_scores(model, ds), ds.labels, threshold);
}

inline EvalReport evaluate_knn(const KnnIndex& index, const Dataset& ds, double threshold = 0.5) {
    return evaluate_scores(knn_scores(index, ds.features), ds.labels, threshold);
}

inline EvalReport evaluate_majority(std::size_t train_same, std::size_t train_split,
                                    const Dataset& ds, double threshold = 0.5) {
    const double score = majority_label(train_same, train_split) == Label::Split ? 1.0 : 0.0;
    const std::vector<double> scores(ds.rows(), score);
    return evaluate_scores(scores, ds.labels, threshold);
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

inline Stats mean_stddev(std::span<const double> values) {
    if (values.empty()) throw ValidationError("cannot summarize zero values");
    Stats s;
    // Identical inputs must summarize to stddev exactly 0; the accumulation
    // below can be off by an ulp when the count is not a power of two.
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
        s.mean = values.front();
        return s;
    }
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(values.size()));
    return s;
}

namespace detail {

inline nlohmann::json prf_to_json(const PRF& p) {
    return {{"precision", p.precision},
            {"recall", p.recall},
            {"f1", p.f1},
            {"precision_degenerate", p.precision_degenerate},
            {"recall_degenerate", p.recall_degenerate}};
}

inline nlohmann::json roc_to_json(const RocCurve& c, bool include_points) {
    nlohmann::json j{{"variant", roc_variant_name(c.variant)}, {"defined", c.defined}};
    if (c.defined) {
        j["auc"] = c.auc;
        if (include_points) {
            auto points = nlohmann::json::array();
            for (const auto& [x, y] : c.points) points.push_back({x, y});
            j["points"] = points;
        }
    }
    return j;
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvalReport& r, bool include_roc_points = false) {
    nlohmann::json j;
    j["confusion"] = {{"tp", r.confusion.tp},
                      {"fp", r.confusion.fp},
                      {"fn", r.confusion.fn},
                      {"tn", r.confusion.tn}};
    j["accuracy"] = r.accuracy;
    j["prf"] = {{"split", detail::prf_to_json(r.prf_split)},
                {"same", detail::prf_to_json(r.prf_same)}};
    j["class_counts"] = {{"same", r.n_same}, {"split", r.n_split}};
    j["roc"] = {{"split", detail::roc_to_json(r.roc.split, include_roc_points)},
                {"same", detail::roc_to_json(r.roc.same, include_roc_points)},
                {"micro", detail::roc_to_json(r.roc.micro, include_roc_points)},
                {"macro", detail::roc_to_json(r.roc.macro, include_roc_points)}};
    if (r.oov_rate) j["oov_rate"] = *r.oov_rate;
    return j;
}

}  // namespace scd
