#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "centervec/raster.hpp"

namespace cvec {

/// Best-match assignment from ground-truth to predicted instances.
/// pred_label 0 means the ground-truth instance matched nothing (no
/// prediction overlaps it); such rows carry intersection 0 and union equal
/// to the instance's area.
struct MatchAssignment {
    struct Pair {
        std::uint32_t gt_label = 0;
        std::uint32_t pred_label = 0;
        std::int64_t intersection = 0;
        std::int64_t union_size = 0;
    };
    std::vector<Pair> pairs;                    ///< one row per gt label, ascending
    std::set<std::uint32_t> unmatched_preds;    ///< predictions never selected
};

enum class AjiMode {
    /// The formula as printed: the per-instance argmax is independent, so
    /// one prediction may be the best match of several ground truths.
    literal,
    /// Each prediction is consumed by its first assignment (ascending gt
    /// label order) and becomes unavailable to later ground truths; the
    /// common reference implementation.
    used_flag,
};

/// Bundle of all three metrics plus the assignment behind the AJI value.
struct MetricReport {
    double aji = 0.0;
    double iou = 0.0;
    double dice = 0.0;
    MatchAssignment assignment;
};

/// For each ground-truth instance, the prediction maximizing pairwise IoU.
/// Comparisons are exact (integer cross-multiplication); ties break toward
/// the smaller prediction label. A zero-overlap ground truth matches
/// nothing. Throws std::invalid_argument if gt has no instance.
MatchAssignment best_match(const LabelMap& gt, const LabelMap& pred);

/// Aggregated Jaccard Index: matched intersections over matched unions plus
/// the areas of never-matched predictions.
double aji(const LabelMap& gt, const LabelMap& pred, AjiMode mode = AjiMode::literal);

/// Foreground-set IoU, ignoring instance identity. 1.0 when both
/// foregrounds are empty (documented convention).
double global_iou(const LabelMap& gt, const LabelMap& pred);

/// Foreground Dice. 1.0 when both foregrounds are empty.
double dice(const LabelMap& gt, const LabelMap& pred);

/// All three metrics (literal-mode AJI) plus the assignment. Verifies the
/// bound chain aji <= iou <= dice before returning.
MetricReport evaluate(const LabelMap& gt, const LabelMap& pred);

}  // namespace cvec
