#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "scd/eval.hpp"

using namespace scd;

namespace {

std::vector<Label> labels_from(const std::string& tags) {
    std::vector<Label> out;
    for (char c : tags) out.push_back(c == 'P' ? Label::Split : Label::Same);
    return out;
}

double mann_whitney_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < scores.size(); ++i)
        (positive[i] ? pos : neg).push_back(scores[i]);
    double wins = 0.0;
    for (double p : pos)
        for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace

TEST_CASE("confusion counts the four cells") {
    const auto gold = labels_from("PPPPPSSSSS");
    const auto predicted = labels_from("PPPPSPSSSS");
    ConfusionMatrix cm = confusion(predicted, gold);
    CHECK(cm.tp == 4);
    CHECK(cm.fn == 1);
    CHECK(cm.fp == 1);
    CHECK(cm.tn == 4);
    CHECK(cm.total() == 10);

    const auto shorter = labels_from("PP");
    CHECK_THROWS_AS(confusion(shorter, gold), ValidationError);
}

TEST_CASE("prf matches hand arithmetic") {
    PRF p = prf(ConfusionMatrix{4, 1, 1, 4});
    CHECK(p.precision == 0.8);
    CHECK(p.recall == 0.8);
    CHECK(p.f1 == Catch::Approx(0.8).epsilon(1e-15));
    CHECK_FALSE(p.precision_degenerate);
    CHECK_FALSE(p.recall_degenerate);

    PRF skewed = prf(ConfusionMatrix{3, 1, 2, 0});
    CHECK(skewed.precision == 0.75);
    CHECK(skewed.recall == 0.6);
    CHECK(skewed.f1 == Catch::Approx(2.0 * 0.75 * 0.6 / 1.35).epsilon(1e-15));
}

TEST_CASE("prf flags degenerate denominators") {
    // Nothing predicted positive.
    PRF no_pred = prf(ConfusionMatrix{0, 0, 3, 7});
    CHECK(no_pred.precision == 0.0);
    CHECK(no_pred.precision_degenerate);
    CHECK_FALSE(no_pred.recall_degenerate);
    CHECK(no_pred.f1 == 0.0);

    // No gold positives.
    PRF no_gold = prf(ConfusionMatrix{0, 2, 0, 8});
    CHECK(no_gold.recall_degenerate);
    CHECK(no_gold.f1 == 0.0);
}

TEST_CASE("flip_positive views Same as the positive class") {
    ConfusionMatrix cm{4, 1, 2, 3};
    ConfusionMatrix flipped = flip_positive(cm);
    CHECK(flipped.tp == 3);
    CHECK(flipped.fp == 2);
    CHECK(flipped.fn == 1);
    CHECK(flipped.tn == 4);
    CHECK(flipped.total() == cm.total());
}

TEST_CASE("roc_curve reproduces a hand-built sweep") {
    const std::vector<double> scores = {0.9, 0.5, 0.4, 0.1};
    const std::vector<bool> positive = {true, false, true, false};
    RocCurve curve = roc_curve(scores, positive, RocVariant::Split);
    REQUIRE(curve.defined);
    REQUIRE(curve.points.size() == 5);
    CHECK(curve.points[0] == std::make_pair(0.0, 0.0));
    CHECK(curve.points[1] == std::make_pair(0.0, 0.5));
    CHECK(curve.points[2] == std::make_pair(0.5, 0.5));
    CHECK(curve.points[3] == std::make_pair(0.5, 1.0));
    CHECK(curve.points[4] == std::make_pair(1.0, 1.0));
    CHECK(curve.auc == Catch::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("roc_curve groups tied scores into one step") {
    const std::vector<double> scores(6, 0.5);
    const std::vector<bool> positive = {true, true, true, false, false, false};
    RocCurve curve = roc_curve(scores, positive, RocVariant::Split);
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[1] == std::make_pair(1.0, 1.0));
    CHECK(curve.auc == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("roc_curve is 1 for perfect separation and undefined for one class") {
    const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
    RocCurve perfect = roc_curve(scores, {true, true, false, false}, RocVariant::Split);
    CHECK(perfect.auc == Catch::Approx(1.0).epsilon(1e-15));

    RocCurve undefined = roc_curve(scores, {true, true, true, true}, RocVariant::Split);
    CHECK_FALSE(undefined.defined);
    CHECK(undefined.points.empty());

    const std::vector<double> bad = {0.5, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(roc_curve(bad, {true, false}, RocVariant::Split), ValidationError);
}

TEST_CASE("trapezoid auc equals the pairwise comparison statistic") {
    Rng rng(17);
    for (int iter = 0; iter < 20; ++iter) {
        const std::size_t n = 50 + rng.uniform_int(150);
        std::vector<double> scores(n);
        std::vector<bool> positive(n);
        bool any_pos = false, any_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Quantized scores force plenty of ties.
            scores[i] = static_cast<double>(rng.uniform_int(21)) / 20.0;
            positive[i] = rng.uniform_int(2) == 1;
            (positive[i] ? any_pos : any_neg) = true;
        }
        if (!any_pos || !any_neg) continue;
        RocCurve curve = roc_curve(scores, positive, RocVariant::Split);
        const double mw = mann_whitney_auc(scores, positive);
        CHECK(std::abs(curve.auc - mw) <= 1e-10);
    }
}

TEST_CASE("tpr_at_fpr takes vertical maxima and interpolates between points") {
    RocCurve curve;
    curve.defined = true;
    curve.points = {{0.0, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
    CHECK(detail::tpr_at_fpr(curve, 0.0) == 0.5);
    CHECK(detail::tpr_at_fpr(curve, 0.5) == 1.0);
    CHECK(detail::tpr_at_fpr(curve, 1.0) == 1.0);
    CHECK(detail::tpr_at_fpr(curve, 0.25) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(detail::tpr_at_fpr(curve, 0.75) == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("per-class roc curves share their auc") {
    Rng rng(23);
    const std::size_t n = 200;
    std::vector<double> scores(n);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = static_cast<double>(rng.uniform_int(11)) / 10.0;
        labels[i] = rng.uniform_int(2) == 1 ? Label::Split : Label::Same;
    }
    RocSet set = roc_set(scores, labels);
    REQUIRE(set.split.defined);
    REQUIRE(set.same.defined);
    CHECK(set.split.auc == Catch::Approx(set.same.auc).epsilon(1e-12));
    CHECK(set.micro.defined);
    CHECK(set.macro.defined);
    REQUIRE(set.macro.points.size() == 101);
    CHECK(set.macro.points.front().first == 0.0);
    CHECK(set.macro.points.back().first == 1.0);
}

TEST_CASE("micro pooling stays defined when the labels are one-sided") {
    const std::vector<double> scores = {0.9, 0.2, 0.7};
    const std::vector<Label> labels(3, Label::Same);
    RocSet set = roc_set(scores, labels);
    CHECK_FALSE(set.split.defined);
    CHECK_FALSE(set.same.defined);
    CHECK_FALSE(set.macro.defined);
    // The pooled view still has 3 positives and 3 negatives.
    CHECK(set.micro.defined);
}

TEST_CASE("a perfect classifier scores 1 in every roc variant") {
    const std::vector<double> scores = {0.9, 0.95, 0.05, 0.1};
    const auto labels = labels_from("PPSS");
    RocSet set = roc_set(scores, labels);
    CHECK(set.split.auc == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(set.same.auc == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(set.micro.auc == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(set.macro.auc == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diarization vectors convert to boundary and within counts") {
    // Second utterance starts with the same id the first ended with.
    DiarizationErrors e = diarization_to_cpd({{1, 1, 2}, {2, 2}});
    CHECK(e.type1 == 1);
    CHECK(e.type2 == 1);
    CHECK(e.boundary_tp == 0);
    CHECK(e.within_tn == 2);

    DiarizationErrors clean = diarization_to_cpd({{1}, {2}, {1}});
    CHECK(clean.type1 == 0);
    CHECK(clean.type2 == 0);
    CHECK(clean.boundary_tp == 2);
    CHECK(clean.within_tn == 0);

    CHECK_THROWS_AS(diarization_to_cpd({}), ValidationError);
    CHECK_THROWS_AS(diarization_to_cpd({{1, 2}, {}}), ValidationError);
}

TEST_CASE("diarization counts satisfy the bookkeeping identities") {
    Rng rng(31);
    for (int iter = 0; iter < 30; ++iter) {
        const std::size_t n_utt = 1 + rng.uniform_int(8);
        std::vector<std::vector<long long>> vectors(n_utt);
        std::size_t total_segments = 0;
        for (auto& v : vectors) {
            const std::size_t len = 1 + rng.uniform_int(5);
            total_segments += len;
            for (std::size_t j = 0; j < len; ++j)
                v.push_back(static_cast<long long>(rng.uniform_int(3)));
        }
        DiarizationErrors e = diarization_to_cpd(vectors);
        CHECK(e.type1 + e.within_tn == total_segments - n_utt);
        CHECK(e.type2 + e.boundary_tp == n_utt - 1);
    }
}

TEST_CASE("diarization prf treats boundaries as positives") {
    DiarizationErrors e;
    e.boundary_tp = 3;
    e.type1 = 1;
    e.type2 = 2;
    e.within_tn = 10;
    PRF p = diarization_prf(e);
    CHECK(p.precision == 0.75);
    CHECK(p.recall == 0.6);
}

TEST_CASE("parse_diarization_json") {
    auto v = parse_diarization_json("[[1, 2], [3]]");
    REQUIRE(v.size() == 2);
    CHECK(v[0] == std::vector<long long>{1, 2});
    CHECK(v[1] == std::vector<long long>{3});

    CHECK_THROWS_AS(parse_diarization_json("{\"a\": 1}"), ParseError);
    CHECK_THROWS_AS(parse_diarization_json("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_diarization_json("[[1.5]]"), ParseError);
    CHECK_THROWS_AS(parse_diarization_json("not json"), ParseError);
}

TEST_CASE("evaluate_scores thresholds strictly and reports counts") {
    const std::vector<double> scores = {0.9, 0.5, 0.3, 0.7, 0.2};
    const auto labels = labels_from("PPSPS");
    EvalReport report = evaluate_scores(scores, labels, 0.5);
    // Score 0.5 is not above the threshold, so row 2 predicts Same.
    CHECK(report.confusion.tp == 2);
    CHECK(report.confusion.fn == 1);
    CHECK(report.confusion.fp == 0);
    CHECK(report.confusion.tn == 2);
    CHECK(report.accuracy == 0.8);
    CHECK(report.n_split == 3);
    CHECK(report.n_same == 2);
    CHECK(report.prf_split.recall == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(report.prf_same.recall == 1.0);
    CHECK_FALSE(report.oov_rate.has_value());

    EvalReport lower = evaluate_scores(scores, labels, 0.25);
    CHECK(lower.confusion.tp == 3);
    CHECK(lower.confusion.fp == 1);

    CHECK_THROWS_AS(evaluate_scores({}, {}, 0.5), ValidationError);
}

TEST_CASE("evaluate_majority scores a constant predictor") {
    const auto labels = labels_from("PPPSS");
    Dataset ds;
    ds.features = Matrix(5, 1);
    ds.labels = labels;

    EvalReport split_side = evaluate_majority(2, 10, ds);
    CHECK(split_side.confusion.tp == 3);
    CHECK(split_side.confusion.fp == 2);
    CHECK(split_side.prf_split.recall == 1.0);
    CHECK(split_side.prf_split.precision == 0.6);

    EvalReport same_side = evaluate_majority(10, 2, ds);
    CHECK(same_side.confusion.tp == 0);
    CHECK(same_side.prf_split.precision_degenerate);
}

TEST_CASE("mean_stddev is the population statistic") {
    const std::vector<double> values = {0.8, 1.0};
    Stats s = mean_stddev(values);
    CHECK(s.mean == Catch::Approx(0.9).epsilon(1e-15));
    CHECK(s.stddev == Catch::Approx(0.1).epsilon(1e-12));

    const std::vector<double> one = {0.5};
    CHECK(mean_stddev(one).stddev == 0.0);
    CHECK_THROWS_AS(mean_stddev({}), ValidationError);

    // Identical repeated measurements summarize to exactly zero spread, even
    // at counts where summing then dividing would drift by an ulp.
    const std::vector<double> constant(10, 0.7236842105263158);
    Stats c = mean_stddev(constant);
    CHECK(c.mean == 0.7236842105263158);
    CHECK(c.stddev == 0.0);
}

TEST_CASE("report_to_json carries the whole report") {
    const std::vector<double> scores = {0.9, 0.1};
    const auto labels = labels_from("PS");
    EvalReport report = evaluate_scores(scores, labels);
    report.oov_rate = 0.125;

    nlohmann::json j = report_to_json(report);
    CHECK(j["confusion"]["tp"] == 1);
    CHECK(j["confusion"]["tn"] == 1);
    CHECK(j["accuracy"] == 1.0);
    CHECK(j["prf"]["split"]["f1"] == 1.0);
    CHECK(j["class_counts"]["split"] == 1);
    CHECK(j["roc"]["split"]["defined"] == true);
    CHECK(j["roc"]["split"]["auc"] == 1.0);
    CHECK(j["oov_rate"] == 0.125);
    CHECK_FALSE(j["roc"]["split"].contains("points"));

    nlohmann::json with_points = report_to_json(report, true);
    CHECK(with_points["roc"]["split"]["points"].is_array());
}
