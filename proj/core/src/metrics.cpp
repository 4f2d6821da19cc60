#include "centervec/metrics.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace cvec {

namespace {

void require_same_shape(const LabelMap& gt, const LabelMap& pred) {
    if (!(gt.shape() == pred.shape())) {
        throw std::invalid_argument("shape mismatch: gt vs pred label maps");
    }
}

struct OverlapTable {
    std::map<std::uint32_t, std::int64_t> gt_area;
    std::map<std::uint32_t, std::int64_t> pred_area;
    // intersection counts keyed per gt label, preds kept in ascending order
    std::map<std::uint32_t, std::map<std::uint32_t, std::int64_t>> inter;
};

OverlapTable build_table(const LabelMap& gt, const LabelMap& pred) {
    OverlapTable t;
    for (std::int64_t i = 0; i < gt.size(); ++i) {
        const std::uint32_t g = gt[i];
        const std::uint32_t p = pred[i];
        if (g != 0) ++t.gt_area[g];
        if (p != 0) ++t.pred_area[p];
        if (g != 0 && p != 0) ++t.inter[g][p];
    }
    return t;
}

// a/b > c/d on nonnegative integers with positive denominators.
bool rational_greater(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return a * d > c * b;
}

}  // namespace

MatchAssignment best_match(const LabelMap& gt, const LabelMap& pred) {
    require_same_shape(gt, pred);
    const OverlapTable table = build_table(gt, pred);
    if (table.gt_area.empty()) {
        throw std::invalid_argument("best_match: ground truth has no instance");
    }

    MatchAssignment out;
    std::set<std::uint32_t> matched;
    for (const auto& [g, area_g] : table.gt_area) {
        MatchAssignment::Pair pair;
        pair.gt_label = g;
        std::int64_t best_i = 0;
        std::int64_t best_u = 1;  // IoU 0/1; any positive overlap beats it
        const auto it = table.inter.find(g);
        if (it != table.inter.end()) {
            for (const auto& [p, inter] : it->second) {  // ascending p: ties keep first
                const std::int64_t uni = area_g + table.pred_area.at(p) - inter;
                if (rational_greater(inter, uni, best_i, best_u)) {
                    best_i = inter;
                    best_u = uni;
                    pair.pred_label = p;
                }
            }
        }
        if (pair.pred_label != 0) {
            pair.intersection = best_i;
            pair.union_size = best_u;
            matched.insert(pair.pred_label);
        } else {
            pair.intersection = 0;
            pair.union_size = area_g;
        }
        out.pairs.push_back(pair);
    }
    for (const auto& [p, area] : table.pred_area) {
        if (!matched.count(p)) out.unmatched_preds.insert(p);
    }
    return out;
}

double aji(const LabelMap& gt, const LabelMap& pred, AjiMode mode) {
    require_same_shape(gt, pred);
    const OverlapTable table = build_table(gt, pred);
    if (table.gt_area.empty()) {
        throw std::invalid_argument("aji: ground truth has no instance");
    }

    std::int64_t num = 0;
    std::int64_t den = 0;
    std::set<std::uint32_t> used;

    if (mode == AjiMode::literal) {
        const MatchAssignment assignment = best_match(gt, pred);
        for (const auto& pair : assignment.pairs) {
            num += pair.intersection;
            den += pair.union_size;
            if (pair.pred_label != 0) used.insert(pair.pred_label);
        }
    } else {
        // Ascending gt order; a prediction consumed once is unavailable to
        // later ground truths.
        for (const auto& [g, area_g] : table.gt_area) {
            std::int64_t best_i = 0;
            std::int64_t best_u = 1;
            std::uint32_t best_p = 0;
            const auto it = table.inter.find(g);
            if (it != table.inter.end()) {
                for (const auto& [p, inter] : it->second) {
                    if (used.count(p)) continue;
                    const std::int64_t uni = area_g + table.pred_area.at(p) - inter;
                    if (rational_greater(inter, uni, best_i, best_u)) {
                        best_i = inter;
                        best_u = uni;
                        best_p = p;
                    }
                }
            }
            if (best_p != 0) {
                num += best_i;
                den += best_u;
                used.insert(best_p);
            } else {
                den += area_g;
            }
        }
    }

    for (const auto& [p, area] : table.pred_area) {
        if (!used.count(p)) den += area;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double global_iou(const LabelMap& gt, const LabelMap& pred) {
    require_same_shape(gt, pred);
    std::int64_t inter = 0;
    std::int64_t uni = 0;
    for (std::int64_t i = 0; i < gt.size(); ++i) {
        const bool g = gt[i] != 0;
        const bool p = pred[i] != 0;
        if (g && p) ++inter;
        if (g || p) ++uni;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double dice(const LabelMap& gt, const LabelMap& pred) {
    require_same_shape(gt, pred);
    std::int64_t inter = 0;
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < gt.size(); ++i) {
        const bool g = gt[i] != 0;
        const bool p = pred[i] != 0;
        if (g && p) ++inter;
        total += (g ? 1 : 0) + (p ? 1 : 0);
    }
    if (total == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

MetricReport evaluate(const LabelMap& gt, const LabelMap& pred) {
    MetricReport report;
    report.assignment = best_match(gt, pred);
    report.aji = aji(gt, pred, AjiMode::literal);
    report.iou = global_iou(gt, pred);
    report.dice = dice(gt, pred);
    if (!(report.aji <= report.iou && report.iou <= report.dice)) {
        throw std::logic_error("metric bound chain violated: aji=" +
                               std::to_string(report.aji) + " iou=" +
                               std::to_string(report.iou) + " dice=" +
                               std::to_string(report.dice));
    }
    return report;
}

}  // namespace cvec
