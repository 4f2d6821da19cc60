#pragma once

#include <cstdint>
#include <vector>

#include "centervec/raster.hpp"
#include "centervec/decoding.hpp"

namespace cvec {

/// Parameters of the seeded random-walker segmentation.
struct RWParams {
    /// Edge-weight contrast: w_uv = exp(-beta * (g_u - g_v)^2).
    double beta = 130.0;
    /// Conjugate-gradient stop: relative residual ||r|| / ||b||.
    double cg_tolerance = 1e-6;
    int cg_max_iters = 2000;
    /// Pixel-graph connectivity (four keeps the Laplacian sparsity minimal).
    Connectivity connectivity = Connectivity::four;
};

/// How many of the K label systems to solve.
enum class RWSolveMode {
    /// Solve K-1 Dirichlet systems and derive the last label by complement,
    /// which makes the per-pixel sum exactly one by construction.
    complement,
    /// Solve all K systems independently (the per-pixel sum then checks the
    /// solver rather than holding by construction).
    full,
};

/// Per-label probability fields of the combinatorial Dirichlet problem.
/// Fields are full-raster; pixels outside the inside mask, and inside
/// pixels with no path to any seed, carry zero for every label. Seeds carry
/// exactly one for their own label.
struct RWProbabilities {
    std::vector<std::uint32_t> label_ids;  ///< ascending region labels
    std::vector<ScalarField> fields;       ///< one per label id
    int unreachable_pixels = 0;            ///< inside pixels with no path to a seed
};

/// Solves the Dirichlet problem on the inside-pixel graph with the center
/// regions as seeds. `guidance` drives the edge weights (pass the inside
/// probability field; a binary mask gives uniform weights).
/// Throws std::invalid_argument if inside is nonempty but regions is empty,
/// and std::runtime_error if conjugate gradient fails to converge.
RWProbabilities random_walker_probabilities(const BinaryMask& inside,
                                            const CenterRegions& regions,
                                            const ScalarField& guidance,
                                            const RWParams& params,
                                            RWSolveMode mode = RWSolveMode::complement);

/// Seeded random-walker instance differentiation: every inside pixel gets
/// the label of highest probability. Probabilities within 1e-9 of the
/// per-pixel maximum count as tied and the smallest label wins, so exact
/// analytic ties (midlines) resolve deterministically despite solver
/// residuals. Inside pixels with no path to any seed fall back to the
/// nearest region by set distance.
LabelMap random_walker_segment(const BinaryMask& inside, const CenterRegions& regions,
                               const ScalarField& guidance, const RWParams& params);

}  // namespace cvec
