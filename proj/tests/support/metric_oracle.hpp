// Independent metric implementations built on explicit pixel sets and
// all-pairs enumeration. The exact rational comparisons and tie-breaks
// mirror the metric definitions, not the library code.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "centervec/raster.hpp"

namespace metric_oracle {

using cvec::LabelMap;
using PixelSet = std::set<std::int64_t>;

inline std::map<std::uint32_t, PixelSet> instance_sets(const LabelMap& map) {
    std::map<std::uint32_t, PixelSet> sets;
    for (std::int64_t i = 0; i < map.size(); ++i) {
        if (map[i] != 0) sets[map[i]].insert(i);
    }
    return sets;
}

inline std::int64_t intersection_size(const PixelSet& a, const PixelSet& b) {
    std::vector<std::int64_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<std::int64_t>(common.size());
}

inline double aji(const LabelMap& gt, const LabelMap& pred, bool used_flag) {
    const auto gt_sets = instance_sets(gt);
    const auto pred_sets = instance_sets(pred);
    std::int64_t num = 0;
    std::int64_t den = 0;
    std::set<std::uint32_t> used;
    for (const auto& [g, gset] : gt_sets) {
        std::int64_t best_i = 0;
        std::int64_t best_u = 1;
        std::uint32_t best_p = 0;
        for (const auto& [p, pset] : pred_sets) {
            if (used_flag && used.count(p)) continue;
            const std::int64_t inter = intersection_size(gset, pset);
            const std::int64_t uni =
                static_cast<std::int64_t>(gset.size() + pset.size()) - inter;
            if (inter * best_u > best_i * uni) {
                best_i = inter;
                best_u = uni;
                best_p = p;
            }
        }
        if (best_p != 0) {
            num += best_i;
            den += best_u;
            used.insert(best_p);
        } else {
            den += static_cast<std::int64_t>(gset.size());
        }
    }
    for (const auto& [p, pset] : pred_sets) {
        if (!used.count(p)) den += static_cast<std::int64_t>(pset.size());
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

inline double global_iou(const LabelMap& gt, const LabelMap& pred) {
    PixelSet g, p;
    for (std::int64_t i = 0; i < gt.size(); ++i) {
        if (gt[i] != 0) g.insert(i);
        if (pred[i] != 0) p.insert(i);
    }
    std::vector<std::int64_t> uni;
    std::set_union(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(uni));
    if (uni.empty()) return 1.0;
    return static_cast<double>(intersection_size(g, p)) / static_cast<double>(uni.size());
}

inline double dice(const LabelMap& gt, const LabelMap& pred) {
    PixelSet g, p;
    for (std::int64_t i = 0; i < gt.size(); ++i) {
        if (gt[i] != 0) g.insert(i);
        if (pred[i] != 0) p.insert(i);
    }
    if (g.empty() && p.empty()) return 1.0;
    return 2.0 * static_cast<double>(intersection_size(g, p)) /
           static_cast<double>(g.size() + p.size());
}

}  // namespace metric_oracle
