#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "centervec/metrics.hpp"
#include "support/metric_oracle.hpp"
#include "support/oracles.hpp"

using namespace cvec;

namespace {

LabelMap nonempty_random_map(std::mt19937& rng, int max_dim, int max_labels, double density) {
    std::uniform_int_distribution<int> dim(1, max_dim);
    while (true) {
        const LabelMap map = oracle::random_label_map(rng, dim(rng), dim(rng), max_labels, density);
        for (std::int64_t i = 0; i < map.size(); ++i) {
            if (map[i] != 0) return map;
        }
    }
}

}  // namespace

TEST_CASE("best_match: identity matches every instance at IoU one") {
    LabelMap gt(4, 4, 0);
    gt.at(0, 0) = 1;
    gt.at(0, 1) = 1;
    gt.at(3, 3) = 2;
    const MatchAssignment match = best_match(gt, gt);
    REQUIRE(match.pairs.size() == 2);
    for (const auto& pair : match.pairs) {
        CHECK(pair.gt_label == pair.pred_label);
        CHECK(pair.intersection == pair.union_size);
    }
    CHECK(match.unmatched_preds.empty());
}

TEST_CASE("best_match: two-pixel instances overlapping by one") {
    LabelMap gt(2, 4, 0);
    gt.at(0, 0) = 1;
    gt.at(0, 1) = 1;
    LabelMap pred(2, 4, 0);
    pred.at(0, 1) = 1;
    pred.at(0, 2) = 1;
    const MatchAssignment match = best_match(gt, pred);
    REQUIRE(match.pairs.size() == 1);
    CHECK(match.pairs[0].pred_label == 1);
    CHECK(match.pairs[0].intersection == 1);
    CHECK(match.pairs[0].union_size == 3);
}

TEST_CASE("best_match: one prediction may be best for several ground truths") {
    LabelMap gt(1, 2, 0);
    gt.at(0, 0) = 1;
    gt.at(0, 1) = 2;
    LabelMap pred(1, 2, 0);
    pred.at(0, 0) = 1;
    pred.at(0, 1) = 1;
    const MatchAssignment match = best_match(gt, pred);
    REQUIRE(match.pairs.size() == 2);
    CHECK(match.pairs[0].pred_label == 1);
    CHECK(match.pairs[1].pred_label == 1);
    CHECK(match.unmatched_preds.empty());
    CHECK(aji(gt, pred, AjiMode::literal) == doctest::Approx(0.5));
}

TEST_CASE("best_match: zero-overlap ground truth matches nothing") {
    LabelMap gt(2, 2, 0);
    gt.at(0, 0) = 1;
    LabelMap pred(2, 2, 0);
    pred.at(1, 1) = 1;
    const MatchAssignment match = best_match(gt, pred);
    REQUIRE(match.pairs.size() == 1);
    CHECK(match.pairs[0].pred_label == 0);
    CHECK(match.pairs[0].union_size == 1);
    CHECK(match.unmatched_preds == std::set<std::uint32_t>{1});
}

TEST_CASE("aji: identity and the 4-pixel overlap example") {
    LabelMap gt(3, 3, 0);
    for (int c = 0; c < 3; ++c) gt.at(0, c) = 1;
    gt.at(1, 0) = 1;
    CHECK(aji(gt, gt) == 1.0);

    LabelMap a(1, 6, 0);
    LabelMap b(1, 6, 0);
    for (int c = 0; c < 4; ++c) a.at(0, c) = 1;
    for (int c = 2; c < 6; ++c) b.at(0, c) = 1;
    CHECK(aji(a, b) == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("aji: error when ground truth has no instance") {
    LabelMap gt(2, 2, 0);
    LabelMap pred(2, 2, 0);
    pred.at(0, 0) = 1;
    CHECK_THROWS_AS(aji(gt, pred), std::invalid_argument);
    CHECK_THROWS_AS(best_match(gt, pred), std::invalid_argument);
}

TEST_CASE("aji: literal and used-flag modes match their oracles exactly") {
    std::mt19937 rng(71);
    for (int round = 0; round < 1000; ++round) {
        const LabelMap gt = nonempty_random_map(rng, 10, 4, 0.35);
        const LabelMap pred =
            oracle::random_label_map(rng, gt.height(), gt.width(), 4, 0.35);
        REQUIRE(aji(gt, pred, AjiMode::literal) == metric_oracle::aji(gt, pred, false));
        REQUIRE(aji(gt, pred, AjiMode::used_flag) == metric_oracle::aji(gt, pred, true));
    }
}

TEST_CASE("global_iou and dice: conventions and oracle equality") {
    LabelMap gt(2, 2, 0);
    gt.at(0, 0) = 1;
    CHECK(global_iou(gt, gt) == 1.0);
    CHECK(dice(gt, gt) == 1.0);

    LabelMap disjoint(2, 2, 0);
    disjoint.at(1, 1) = 1;
    CHECK(global_iou(gt, disjoint) == 0.0);
    CHECK(dice(gt, disjoint) == 0.0);

    const LabelMap empty(2, 2, 0);
    CHECK(global_iou(empty, empty) == 1.0);
    CHECK(dice(empty, empty) == 1.0);

    std::mt19937 rng(73);
    for (int round = 0; round < 500; ++round) {
        const LabelMap a = nonempty_random_map(rng, 10, 4, 0.4);
        const LabelMap b = oracle::random_label_map(rng, a.height(), a.width(), 4, 0.4);
        REQUIRE(global_iou(a, b) == metric_oracle::global_iou(a, b));
        REQUIRE(dice(a, b) == metric_oracle::dice(a, b));

        // Dice = 2*IOU / (1 + IOU) for set overlap.
        const double iou = global_iou(a, b);
        CHECK(dice(a, b) == doctest::Approx(2.0 * iou / (1.0 + iou)));
    }
}

TEST_CASE("evaluate: identity scores ones, merge error dents only AJI") {
    LabelMap gt(4, 6, 0);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 3; ++c) gt.at(r, c) = 1;
        for (int c = 3; c < 6; ++c) gt.at(r, c) = 2;
    }
    const MetricReport self = evaluate(gt, gt);
    CHECK(self.aji == 1.0);
    CHECK(self.iou == 1.0);
    CHECK(self.dice == 1.0);

    LabelMap merged(4, 6, 0);
    for (std::int64_t i = 0; i < merged.size(); ++i) merged[i] = 1;
    const MetricReport report = evaluate(gt, merged);
    CHECK(report.iou == 1.0);
    CHECK(report.dice == 1.0);
    CHECK(report.aji < 1.0);
    // Both 12-pixel halves best-match the single 24-pixel prediction:
    // numerator 12+12, denominator 24+24.
    CHECK(report.aji == doctest::Approx(0.5));
    CHECK(report.aji == metric_oracle::aji(gt, merged, false));
}

TEST_CASE("evaluate: bound chain aji <= iou <= dice on random maps") {
    std::mt19937 rng(79);
    for (int round = 0; round < 1000; ++round) {
        const LabelMap gt = nonempty_random_map(rng, 10, 4, 0.35);
        const LabelMap pred =
            oracle::random_label_map(rng, gt.height(), gt.width(), 4, 0.35);
        const MetricReport report = evaluate(gt, pred);
        REQUIRE(report.aji <= report.iou);
        REQUIRE(report.iou <= report.dice);
    }
}

TEST_CASE("metrics: invariant under consistent relabeling") {
    std::mt19937 rng(83);
    for (int round = 0; round < 200; ++round) {
        const LabelMap gt = nonempty_random_map(rng, 9, 4, 0.4);
        const LabelMap pred_sized =
            oracle::random_label_map(rng, gt.height(), gt.width(), 4, 0.4);

        auto remap = [](const LabelMap& map, std::uint32_t mult) {
            LabelMap out(map.shape(), 0);
            for (std::int64_t i = 0; i < map.size(); ++i) {
                out[i] = map[i] == 0 ? 0 : map[i] * mult + 3;
            }
            return out;
        };
        const LabelMap gt2 = remap(gt, 7);
        const LabelMap pred2 = remap(pred_sized, 5);
        CHECK(aji(gt, pred_sized) == aji(gt2, pred2));
        CHECK(global_iou(gt, pred_sized) == global_iou(gt2, pred2));
        CHECK(dice(gt, pred_sized) == dice(gt2, pred2));
    }
}
