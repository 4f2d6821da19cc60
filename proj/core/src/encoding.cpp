#include "centervec/encoding.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace cvec {

namespace {

void validate(const EncodeParams& params) {
    if (params.erosion_radius < 1) {
        throw std::invalid_argument("erosion_radius must be >= 1");
    }
    if (!(params.center_distance_threshold >= 0.0)) {
        throw std::invalid_argument("center_distance_threshold must be >= 0");
    }
}

struct InstanceBox {
    int r0, c0, r1, c1;  // inclusive
};

std::map<std::uint32_t, InstanceBox> bounding_boxes(const LabelMap& gt) {
    std::map<std::uint32_t, InstanceBox> boxes;
    for (int r = 0; r < gt.height(); ++r) {
        for (int c = 0; c < gt.width(); ++c) {
            const std::uint32_t label = gt.at(r, c);
            if (label == 0) continue;
            auto [it, inserted] = boxes.try_emplace(label, InstanceBox{r, c, r, c});
            if (!inserted) {
                it->second.r0 = std::min(it->second.r0, r);
                it->second.c0 = std::min(it->second.c0, c);
                it->second.r1 = std::max(it->second.r1, r);
                it->second.c1 = std::max(it->second.c1, c);
            }
        }
    }
    return boxes;
}

}  // namespace

BinaryMask make_inside_mask(const LabelMap& gt) {
    BinaryMask out(gt.shape(), 0);
    for (std::int64_t i = 0; i < gt.size(); ++i) {
        out[i] = gt[i] != 0 ? 1 : 0;
    }
    return out;
}

CenterMaskResult make_center_mask(const LabelMap& gt, const EncodeParams& params) {
    validate(params);
    CenterMaskResult result{BinaryMask(gt.shape(), 0), {}};

    // Everything outside an instance's bounding box is background for that
    // instance, so a box crop with a one-pixel background margin computes the
    // same erosion and distances as the full raster would.
    const int margin = 1;
    for (const auto& [label, box] : bounding_boxes(gt)) {
        const int r0 = std::max(0, box.r0 - margin);
        const int c0 = std::max(0, box.c0 - margin);
        const int r1 = std::min(gt.height() - 1, box.r1 + margin);
        const int c1 = std::min(gt.width() - 1, box.c1 + margin);
        BinaryMask crop(r1 - r0 + 1, c1 - c0 + 1, 0);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                crop.at(r - r0, c - c0) = gt.at(r, c) == label ? 1 : 0;
            }
        }
        const BinaryMask eroded = erode(crop, params.erosion_radius);
        const Raster<std::int64_t> sq = squared_distance_transform(eroded);
        const double t2 = params.center_distance_threshold * params.center_distance_threshold;
        bool any = false;
        for (int r = 0; r < crop.height(); ++r) {
            for (int c = 0; c < crop.width(); ++c) {
                // Strict inequality: pixels exactly at the threshold are out.
                if (eroded.at(r, c) && static_cast<double>(sq.at(r, c)) > t2) {
                    result.mask.at(r + r0, c + c0) = 1;
                    any = true;
                }
            }
        }
        if (!any) result.empty_center_labels.push_back(label);
    }
    return result;
}

std::vector<Centroid> compute_centroids(const LabelMap& gt) {
    struct Accum {
        std::int64_t sum_col = 0;
        std::int64_t sum_row = 0;
        std::int64_t count = 0;
    };
    std::map<std::uint32_t, Accum> acc;
    for (int r = 0; r < gt.height(); ++r) {
        for (int c = 0; c < gt.width(); ++c) {
            const std::uint32_t label = gt.at(r, c);
            if (label == 0) continue;
            auto& a = acc[label];
            a.sum_col += c;
            a.sum_row += r;
            ++a.count;
        }
    }
    if (acc.empty()) {
        throw std::invalid_argument("compute_centroids: label map has no instance");
    }
    std::vector<Centroid> out;
    out.reserve(acc.size());
    for (const auto& [label, a] : acc) {
        out.push_back({label, static_cast<double>(a.sum_col) / a.count,
                       static_cast<double>(a.sum_row) / a.count});
    }
    return out;
}

VectorField make_center_vector(const LabelMap& gt, const std::vector<Centroid>& centroids) {
    std::map<std::uint32_t, const Centroid*> by_label;
    for (const auto& c : centroids) by_label[c.instance_label] = &c;

    VectorField out(gt.shape());
    for (int r = 0; r < gt.height(); ++r) {
        for (int c = 0; c < gt.width(); ++c) {
            const std::uint32_t label = gt.at(r, c);
            if (label == 0) continue;
            const auto it = by_label.find(label);
            if (it == by_label.end()) {
                throw std::invalid_argument("make_center_vector: no centroid for label " +
                                            std::to_string(label));
            }
            out.dx.at(r, c) = c - it->second->cx;
            out.dy.at(r, c) = r - it->second->cy;
        }
    }
    return out;
}

EncodedTargets encode_targets(const LabelMap& gt, const EncodeParams& params) {
    validate(params);
    EncodedTargets targets;
    targets.inside = make_inside_mask(gt);

    CenterMaskResult center = make_center_mask(gt, params);
    targets.center = std::move(center.mask);
    targets.empty_center_labels = std::move(center.empty_center_labels);

    const bool any_instance =
        std::any_of(gt.data().begin(), gt.data().end(), [](std::uint32_t v) { return v != 0; });
    if (any_instance) {
        targets.centroids = compute_centroids(gt);
        targets.vectors = make_center_vector(gt, targets.centroids);
    } else {
        targets.vectors = VectorField(gt.shape());
    }
    targets.validity = targets.inside;
    return targets;
}

}  // namespace cvec
