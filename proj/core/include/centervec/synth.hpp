#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "centervec/raster.hpp"
#include "centervec/encoding.hpp"

namespace cvec {

/// Scene generation parameters. Scenes are deterministic functions of the
/// seed; the PRNG scheme (mt19937_64 with explicit uniform and Box-Muller
/// normal derivations) is documented in the README so fixtures can be
/// reproduced outside this library.
struct SynthParams {
    std::uint64_t seed = 1;
    RasterShape shape{256, 256};
    int nucleus_count = 30;
    /// Bounds on the semi-minor axis, so every cross-section of a nucleus is
    /// at least radius_min wide. The minimum of 5 keeps center regions alive
    /// under the default encoding.
    double radius_min = 5.0;
    double radius_max = 12.0;
    /// Semi-major axis is radius / sqrt(1 - e^2) for eccentricity e drawn in
    /// [0, eccentricity_max].
    double eccentricity_max = 0.6;
    bool allow_touching = true;
    /// With touching allowed, a candidate is rejected when it would overlap
    /// more than this fraction of its own pixels or of any earlier
    /// instance's pixels. Contested pixels go to the later instance.
    double max_overlap_fraction = 0.0;
};

/// One placed nucleus, in the rotated-ellipse parameterization used by
/// rasterize_ellipse.
struct EllipseSpec {
    std::uint32_t label = 0;
    double cx = 0.0;
    double cy = 0.0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double theta = 0.0;
};

struct SynthScene {
    LabelMap labels;
    std::vector<EllipseSpec> ellipses;
};

/// Pixel-center-in-ellipse rasterization. theta is the angle of the major
/// axis, counterclockwise from the +x (column) direction.
BinaryMask rasterize_ellipse(RasterShape shape, double cx, double cy, double semi_major,
                             double semi_minor, double theta);

/// Rejection-sampled ellipse placement, fully inside the raster. Instances
/// are drawn sequentially; with allow_touching the later instance wins any
/// contested pixel. Throws std::runtime_error when a nucleus cannot be
/// placed within the retry budget (1000 attempts).
SynthScene generate_scene_with_spec(const SynthParams& params);

/// The label map alone.
LabelMap generate_scene(const SynthParams& params);

/// Prediction-corruption model for decoder robustness experiments.
struct CorruptionParams {
    std::uint64_t seed = 1;
    /// Masks become probability fields: foreground 1 -> 1-|n|, background
    /// 0 -> |n| with n ~ N(0, sigma^2), clamped to [0, 1].
    double mask_noise_sigma = 0.0;
    /// Additive Gaussian noise on both displacement channels, in pixels.
    double vector_noise_sigma = 0.0;
    /// Annotation-perturbation model: instances dilated by this many
    /// one-pixel rounds (see dilate_instances).
    int boundary_dilation = 0;
};

struct CorruptedPredictions {
    ScalarField inside;
    ScalarField center;
    VectorField vectors;
};

/// Turns clean targets into noisy prediction fields. Deterministic from the
/// seed; with all sigmas zero the fields equal the targets cast to {0, 1}.
CorruptedPredictions corrupt_targets(const EncodedTargets& targets,
                                     const CorruptionParams& params);

/// Grows every instance by `rounds` one-pixel dilations (Euclidean disk of
/// radius 1, i.e. the 4-neighborhood). Only background pixels are claimed;
/// a pixel reached by several instances in the same round goes to the
/// smallest label. Existing pixels never change hands.
LabelMap dilate_instances(const LabelMap& gt, int rounds);

/// dilate_instances with params.boundary_dilation rounds.
LabelMap perturb_annotations(const LabelMap& gt, const CorruptionParams& params);

}  // namespace cvec
