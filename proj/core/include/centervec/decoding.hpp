#pragma once

#include <cstdint>
#include <utility>

#include "centervec/raster.hpp"

namespace cvec {

/// Parameters of instance differentiation. Thresholds let the decoder accept
/// probability fields; already-binary masks pass through unchanged at the
/// 0.5 defaults.
struct DecodeParams {
    double inside_threshold = 0.5;
    double center_threshold = 0.5;
    Connectivity connectivity = Connectivity::eight;
    /// Instances smaller than this many pixels are dropped in refinement.
    int min_instance_area = 0;
};

/// Connected components of the center mask; each region seeds one instance.
struct CenterRegions {
    LabelMap labels;
    int count = 0;
};

/// Observability counters for the decode pipeline steps.
struct DecodeReport {
    int suppressed_components = 0;  ///< inside components removed (no center overlap)
    int fallback_pixels = 0;        ///< pixels assigned via nearest-center fallback
    int holes_filled = 0;           ///< pixels flipped by per-instance hole filling
};

/// Pixel true iff value >= threshold.
BinaryMask binarize(const ScalarField& field, double threshold);

struct SuppressionResult {
    BinaryMask mask;
    int removed_components = 0;
};

/// Removes inside components that contain no center pixel. This is the
/// false-positive suppression step: a predicted nucleus with no predicted
/// center is discarded wholesale.
SuppressionResult suppress_false_positives(const BinaryMask& inside, const BinaryMask& center,
                                           Connectivity conn);

/// Connected-component analysis of the center mask, deterministic
/// raster-scan labeling.
CenterRegions extract_center_regions(const BinaryMask& center, Connectivity conn);

/// Assigns every inside pixel to a center region. Center pixels take their
/// own region's label directly. Other pixels follow their displacement
/// vector: the target (round(x - dx), round(y - dy)) decides, with rounding
/// half away from zero. Targets that are out of bounds or not on any region
/// fall back to the nearest region by set distance.
/// Throws std::invalid_argument if inside is nonempty but regions is empty.
std::pair<LabelMap, DecodeReport> assign_pixels(const BinaryMask& inside,
                                                const CenterRegions& regions,
                                                const VectorField& vectors);

struct RefineResult {
    LabelMap labels;
    int holes_filled = 0;
    int dropped_instances = 0;
};

/// Fills holes fully enclosed by a single instance (holes bordered by two
/// instances stay open), drops instances below min_instance_area, and
/// relabels contiguously 1..K in raster-scan order.
RefineResult refine(const LabelMap& instances, const DecodeParams& params, Connectivity conn);

/// Full instance differentiation: binarize both fields, suppress false
/// positives, extract center regions, assign pixels, refine. Deterministic
/// for fixed inputs. When nothing survives suppression the result is an
/// all-zero map plus the report.
std::pair<LabelMap, DecodeReport> decode_instances(const ScalarField& inside_prob,
                                                   const ScalarField& center_prob,
                                                   const VectorField& vectors,
                                                   const DecodeParams& params);

}  // namespace cvec
