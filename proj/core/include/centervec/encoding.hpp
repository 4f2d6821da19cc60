#pragma once

#include <cstdint>
#include <vector>

#include "centervec/raster.hpp"

namespace cvec {

/// Parameters of the training-target construction.
struct EncodeParams {
    /// Radius of the Euclidean-disk erosion applied per instance.
    int erosion_radius = 1;
    /// Pixels of the eroded instance whose distance to its boundary is
    /// strictly greater than this threshold form the center region.
    double center_distance_threshold = 2.0;
    /// Connectivity used when instance structure matters downstream.
    Connectivity connectivity = Connectivity::eight;
};

/// Geometric center of one instance: mean of its pixel coordinates,
/// real-valued (never rounded at encode time).
struct Centroid {
    std::uint32_t instance_label = 0;
    double cx = 0.0;  ///< mean column index
    double cy = 0.0;  ///< mean row index
};

/// The three training targets plus bookkeeping. `validity` marks pixels
/// where the vector targets are defined (exactly the inside pixels); the
/// vector channels are stored as 0 elsewhere so every field stays finite.
struct EncodedTargets {
    BinaryMask inside;
    BinaryMask center;
    VectorField vectors;
    BinaryMask validity;
    std::vector<Centroid> centroids;
    /// Instances whose center region came out empty (small nuclei eaten by
    /// erosion + thresholding). They keep their inside pixels; callers
    /// choose what to do about them.
    std::vector<std::uint32_t> empty_center_labels;
};

/// Center mask plus the labels whose center region vanished.
struct CenterMaskResult {
    BinaryMask mask;
    std::vector<std::uint32_t> empty_center_labels;
};

/// True wherever the label is nonzero.
BinaryMask make_inside_mask(const LabelMap& gt);

/// Per instance independently: erode the instance's own binary mask, take
/// the distance transform inside the eroded mask, and keep pixels strictly
/// beyond the threshold. The union over instances is the center mask.
/// Computing per instance is what separates the center regions of touching
/// nuclei: each erosion and distance is measured from that instance's own
/// boundary.
CenterMaskResult make_center_mask(const LabelMap& gt, const EncodeParams& params);

/// Mean pixel coordinates per instance, sorted by label.
/// Throws std::invalid_argument on an all-background map.
std::vector<Centroid> compute_centroids(const LabelMap& gt);

/// Displacement targets: for a pixel at (x, y) in instance i,
/// dx = x - cx_i and dy = y - cy_i. Background pixels get (0, 0).
/// Throws std::invalid_argument if a label has no centroid.
VectorField make_center_vector(const LabelMap& gt, const std::vector<Centroid>& centroids);

/// Full target construction. An all-background map yields all-false masks,
/// an empty centroid list and zero vectors.
EncodedTargets encode_targets(const LabelMap& gt, const EncodeParams& params);

}  // namespace cvec
