#include "centervec/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cvec {

namespace {

void validate(const DecodeParams& params) {
    if (!(params.inside_threshold >= 0.0 && params.inside_threshold <= 1.0) ||
        !(params.center_threshold >= 0.0 && params.center_threshold <= 1.0)) {
        throw std::invalid_argument("decode thresholds must lie in [0, 1]");
    }
    if (params.min_instance_area < 0) {
        throw std::invalid_argument("min_instance_area must be >= 0");
    }
}

void require_same_shape(const RasterShape& a, const RasterShape& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string("shape mismatch: ") + what);
    }
}

}  // namespace

BinaryMask binarize(const ScalarField& field, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("binarize threshold must lie in [0, 1]");
    }
    BinaryMask out(field.shape(), 0);
    for (std::int64_t i = 0; i < field.size(); ++i) {
        out[i] = field[i] >= threshold ? 1 : 0;
    }
    return out;
}

SuppressionResult suppress_false_positives(const BinaryMask& inside, const BinaryMask& center,
                                           Connectivity conn) {
    require_same_shape(inside.shape(), center.shape(), "inside vs center");
    const LabelMap components = connected_components(inside, conn);

    std::set<std::uint32_t> keep;
    std::set<std::uint32_t> all;
    for (std::int64_t i = 0; i < components.size(); ++i) {
        if (components[i] == 0) continue;
        all.insert(components[i]);
        if (center[i]) keep.insert(components[i]);
    }

    SuppressionResult result{BinaryMask(inside.shape(), 0),
                             static_cast<int>(all.size() - keep.size())};
    for (std::int64_t i = 0; i < components.size(); ++i) {
        if (components[i] != 0 && keep.count(components[i])) result.mask[i] = 1;
    }
    return result;
}

CenterRegions extract_center_regions(const BinaryMask& center, Connectivity conn) {
    CenterRegions regions;
    regions.labels = connected_components(center, conn);
    regions.count = count_labels(regions.labels);
    return regions;
}

std::pair<LabelMap, DecodeReport> assign_pixels(const BinaryMask& inside,
                                                const CenterRegions& regions,
                                                const VectorField& vectors) {
    require_same_shape(inside.shape(), regions.labels.shape(), "inside vs regions");
    require_same_shape(inside.shape(), vectors.shape(), "inside vs vectors");

    const bool any_inside =
        std::any_of(inside.data().begin(), inside.data().end(), [](std::uint8_t v) { return v != 0; });
    if (any_inside && regions.count == 0) {
        throw std::invalid_argument(
            "assign_pixels: inside mask is nonempty but there are no center regions");
    }

    LabelMap out(inside.shape(), 0);
    DecodeReport report;

    // Collected lazily: the site list is only needed once a fallback occurs.
    std::vector<PixelCoord> sites;
    std::vector<std::uint32_t> site_labels;
    auto nearest_site_label = [&](int row, int col) {
        if (sites.empty()) {
            for (int r = 0; r < regions.labels.height(); ++r) {
                for (int c = 0; c < regions.labels.width(); ++c) {
                    if (regions.labels.at(r, c) != 0) {
                        sites.push_back({r, c});
                        site_labels.push_back(regions.labels.at(r, c));
                    }
                }
            }
        }
        std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
        std::uint32_t best = 0;
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const std::int64_t dr = sites[i].row - row;
            const std::int64_t dc = sites[i].col - col;
            const std::int64_t d2 = dr * dr + dc * dc;
            if (d2 < best_d2) {  // sites are in raster order: first hit wins ties
                best_d2 = d2;
                best = site_labels[i];
            }
        }
        return best;
    };

    for (int r = 0; r < inside.height(); ++r) {
        for (int c = 0; c < inside.width(); ++c) {
            if (!inside.at(r, c)) continue;
            const std::uint32_t own_region = regions.labels.at(r, c);
            if (own_region != 0) {
                out.at(r, c) = own_region;
                continue;
            }
            // The vector points from the pixel to its center, so the center
            // estimate is pixel minus vector. x is the column, y the row.
            const long tx = std::lround(c - vectors.dx.at(r, c));
            const long ty = std::lround(r - vectors.dy.at(r, c));
            std::uint32_t label = 0;
            if (ty >= 0 && ty < inside.height() && tx >= 0 && tx < inside.width()) {
                label = regions.labels.at(static_cast<int>(ty), static_cast<int>(tx));
            }
            if (label == 0) {
                label = nearest_site_label(r, c);
                ++report.fallback_pixels;
            }
            out.at(r, c) = label;
        }
    }
    return {std::move(out), report};
}

RefineResult refine(const LabelMap& instances, const DecodeParams& params, Connectivity conn) {
    validate(params);
    RefineResult result;
    LabelMap working = instances;

    // Background components under the complementary connectivity; a
    // component that misses the border and touches exactly one instance
    // label (instance adjacency judged with `conn`) is that instance's hole.
    {
        BinaryMask background(instances.shape(), 0);
        for (std::int64_t i = 0; i < instances.size(); ++i) {
            background[i] = instances[i] == 0 ? 1 : 0;
        }
        const LabelMap bg_components = connected_components(background, complement(conn));

        const int h = instances.height();
        const int w = instances.width();
        std::map<std::uint32_t, std::set<std::uint32_t>> adjacent;  // bg comp -> instance labels
        std::set<std::uint32_t> touches_border;
        const auto& offsets = detail::neighbor_offsets(conn);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const std::uint32_t bg = bg_components.at(r, c);
                if (bg == 0) continue;
                if (r == 0 || r == h - 1 || c == 0 || c == w - 1) touches_border.insert(bg);
                for (const auto& d : offsets) {
                    const int nr = r + d.row;
                    const int nc = c + d.col;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    const std::uint32_t label = instances.at(nr, nc);
                    if (label != 0) adjacent[bg].insert(label);
                }
            }
        }

        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const std::uint32_t bg = bg_components.at(r, c);
                if (bg == 0 || touches_border.count(bg)) continue;
                const auto it = adjacent.find(bg);
                if (it != adjacent.end() && it->second.size() == 1) {
                    working.at(r, c) = *it->second.begin();
                    ++result.holes_filled;
                }
            }
        }
    }

    // Area filter, then contiguous relabel in raster-scan order of each
    // instance's first pixel.
    std::map<std::uint32_t, int> areas;
    for (std::int64_t i = 0; i < working.size(); ++i) {
        if (working[i] != 0) ++areas[working[i]];
    }
    std::map<std::uint32_t, std::uint32_t> relabel;
    std::uint32_t next = 0;
    result.labels = LabelMap(working.shape(), 0);
    for (std::int64_t i = 0; i < working.size(); ++i) {
        const std::uint32_t old = working[i];
        if (old == 0) continue;
        if (areas[old] < params.min_instance_area) continue;
        auto [it, inserted] = relabel.try_emplace(old, next + 1);
        if (inserted) ++next;
        result.labels[i] = it->second;
    }
    result.dropped_instances = static_cast<int>(areas.size() - relabel.size());
    return result;
}

std::pair<LabelMap, DecodeReport> decode_instances(const ScalarField& inside_prob,
                                                   const ScalarField& center_prob,
                                                   const VectorField& vectors,
                                                   const DecodeParams& params) {
    validate(params);
    require_same_shape(inside_prob.shape(), center_prob.shape(), "inside vs center");
    require_same_shape(inside_prob.shape(), vectors.shape(), "inside vs vectors");

    const BinaryMask inside = binarize(inside_prob, params.inside_threshold);
    const BinaryMask center = binarize(center_prob, params.center_threshold);

    SuppressionResult suppressed =
        suppress_false_positives(inside, center, params.connectivity);
    DecodeReport report;
    report.suppressed_components = suppressed.removed_components;

    const bool any_inside = std::any_of(suppressed.mask.data().begin(),
                                        suppressed.mask.data().end(),
                                        [](std::uint8_t v) { return v != 0; });
    if (!any_inside) {
        return {LabelMap(inside_prob.shape(), 0), report};
    }

    const CenterRegions regions = extract_center_regions(center, params.connectivity);
    auto [assigned, assign_report] = assign_pixels(suppressed.mask, regions, vectors);
    report.fallback_pixels = assign_report.fallback_pixels;

    RefineResult refined = refine(assigned, params, params.connectivity);
    report.holes_filled = refined.holes_filled;
    return {std::move(refined.labels), report};
}

}  // namespace cvec
