#include "centervec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace cvec {

namespace {

constexpr int kPlacementAttempts = 1000;
constexpr double kPi = 3.14159265358979323846;

// Deterministic draws on top of mt19937_64: the standard-library
// distributions are implementation-defined, these are not.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 mantissa bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return radius * std::cos(2.0 * kPi * u2);
    }

    void reset_normal_stream() { has_spare_ = false; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

void validate(const SynthParams& p) {
    if (p.nucleus_count < 1) throw std::invalid_argument("nucleus_count must be >= 1");
    if (!(p.radius_min >= 5.0)) {
        throw std::invalid_argument("radius_min must be >= 5 so center regions survive encoding");
    }
    if (!(p.radius_max >= p.radius_min)) {
        throw std::invalid_argument("radius_max must be >= radius_min");
    }
    if (!(p.eccentricity_max >= 0.0 && p.eccentricity_max < 1.0)) {
        throw std::invalid_argument("eccentricity_max must lie in [0, 1)");
    }
    if (!(p.max_overlap_fraction >= 0.0 && p.max_overlap_fraction < 0.3)) {
        throw std::invalid_argument("max_overlap_fraction must lie in [0, 0.3)");
    }
}

void validate(const CorruptionParams& p) {
    if (!(p.mask_noise_sigma >= 0.0) || !(p.vector_noise_sigma >= 0.0)) {
        throw std::invalid_argument("noise sigmas must be >= 0");
    }
    if (p.boundary_dilation < 0) {
        throw std::invalid_argument("boundary_dilation must be >= 0");
    }
}

std::vector<std::int64_t> ellipse_pixels(RasterShape shape, const EllipseSpec& e) {
    std::vector<std::int64_t> pixels;
    const double extent = e.semi_major;
    const int r0 = std::max(0, static_cast<int>(std::floor(e.cy - extent)));
    const int r1 = std::min(shape.height - 1, static_cast<int>(std::ceil(e.cy + extent)));
    const int c0 = std::max(0, static_cast<int>(std::floor(e.cx - extent)));
    const int c1 = std::min(shape.width - 1, static_cast<int>(std::ceil(e.cx + extent)));
    const double cos_t = std::cos(e.theta);
    const double sin_t = std::sin(e.theta);
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const double dx = c - e.cx;
            const double dy = r - e.cy;
            const double u = (dx * cos_t + dy * sin_t) / e.semi_major;
            const double v = (-dx * sin_t + dy * cos_t) / e.semi_minor;
            if (u * u + v * v <= 1.0) {
                pixels.push_back(static_cast<std::int64_t>(r) * shape.width + c);
            }
        }
    }
    return pixels;
}

}  // namespace

BinaryMask rasterize_ellipse(RasterShape shape, double cx, double cy, double semi_major,
                             double semi_minor, double theta) {
    if (!(semi_major > 0.0) || !(semi_minor > 0.0)) {
        throw std::invalid_argument("ellipse semi-axes must be positive");
    }
    BinaryMask out(shape, 0);
    for (const std::int64_t p :
         ellipse_pixels(shape, EllipseSpec{0, cx, cy, semi_major, semi_minor, theta})) {
        out[p] = 1;
    }
    return out;
}

SynthScene generate_scene_with_spec(const SynthParams& params) {
    validate(params);
    DeterministicRng rng(params.seed);
    SynthScene scene;
    scene.labels = LabelMap(params.shape, 0);
    std::map<std::uint32_t, std::int64_t> areas;

    const int h = params.shape.height;
    const int w = params.shape.width;

    for (std::uint32_t label = 1; label <= static_cast<std::uint32_t>(params.nucleus_count);
         ++label) {
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
            EllipseSpec e;
            e.label = label;
            e.semi_minor = rng.uniform(params.radius_min, params.radius_max);
            const double ecc = rng.uniform(0.0, params.eccentricity_max);
            e.semi_major = e.semi_minor / std::sqrt(1.0 - ecc * ecc);
            e.theta = rng.uniform(0.0, kPi);

            // Fully inside the raster so instances stay convex ellipse
            // rasterizations and centroids stay interior.
            const double bound = e.semi_major + 1.0;
            if (2.0 * bound >= w || 2.0 * bound >= h) continue;
            e.cx = rng.uniform(bound, w - 1.0 - bound);
            e.cy = rng.uniform(bound, h - 1.0 - bound);

            const std::vector<std::int64_t> pixels = ellipse_pixels(params.shape, e);
            if (pixels.empty()) continue;

            bool reject = false;
            if (!params.allow_touching) {
                // Demand a one-pixel gap: no overlap and no 8-adjacency.
                for (const std::int64_t p : pixels) {
                    const int r = static_cast<int>(p / w);
                    const int c = static_cast<int>(p % w);
                    for (int dr = -1; dr <= 1 && !reject; ++dr) {
                        for (int dc = -1; dc <= 1; ++dc) {
                            const int nr = r + dr;
                            const int nc = c + dc;
                            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                            if (scene.labels.at(nr, nc) != 0) {
                                reject = true;
                                break;
                            }
                        }
                    }
                    if (reject) break;
                }
            } else {
                std::map<std::uint32_t, std::int64_t> stolen;
                std::int64_t overlap = 0;
                for (const std::int64_t p : pixels) {
                    const std::uint32_t owner = scene.labels[p];
                    if (owner != 0) {
                        ++overlap;
                        ++stolen[owner];
                    }
                }
                if (static_cast<double>(overlap) >
                    params.max_overlap_fraction * static_cast<double>(pixels.size())) {
                    reject = true;
                }
                for (const auto& [owner, count] : stolen) {
                    if (static_cast<double>(count) >
                        params.max_overlap_fraction * static_cast<double>(areas.at(owner))) {
                        reject = true;
                    }
                }
            }
            if (reject) continue;

            for (const std::int64_t p : pixels) {
                const std::uint32_t owner = scene.labels[p];
                if (owner != 0) --areas[owner];
                scene.labels[p] = label;
            }
            areas[label] = static_cast<std::int64_t>(pixels.size());
            scene.ellipses.push_back(e);
            placed = true;
        }
        if (!placed) {
            throw std::runtime_error("generate_scene: could not place nucleus " +
                                     std::to_string(label) + " within " +
                                     std::to_string(kPlacementAttempts) + " attempts");
        }
    }
    return scene;
}

LabelMap generate_scene(const SynthParams& params) {
    return generate_scene_with_spec(params).labels;
}

CorruptedPredictions corrupt_targets(const EncodedTargets& targets,
                                     const CorruptionParams& params) {
    validate(params);
    DeterministicRng rng(params.seed);
    const RasterShape shape = targets.inside.shape();

    CorruptedPredictions out{ScalarField(shape, 0.0), ScalarField(shape, 0.0),
                             VectorField(shape)};

    // Fixed pass order (inside, center, dx, dy), row-major within each pass;
    // every pass starts a fresh Box-Muller pair stream.
    auto corrupt_mask = [&](const BinaryMask& mask, ScalarField& field) {
        rng.reset_normal_stream();
        for (std::int64_t i = 0; i < mask.size(); ++i) {
            const double n = std::abs(params.mask_noise_sigma * rng.normal());
            field[i] = std::clamp(mask[i] ? 1.0 - n : n, 0.0, 1.0);
        }
    };
    corrupt_mask(targets.inside, out.inside);
    corrupt_mask(targets.center, out.center);

    auto corrupt_channel = [&](const ScalarField& channel, ScalarField& field) {
        rng.reset_normal_stream();
        for (std::int64_t i = 0; i < channel.size(); ++i) {
            field[i] = channel[i] + params.vector_noise_sigma * rng.normal();
        }
    };
    corrupt_channel(targets.vectors.dx, out.vectors.dx);
    corrupt_channel(targets.vectors.dy, out.vectors.dy);
    return out;
}

LabelMap dilate_instances(const LabelMap& gt, int rounds) {
    if (rounds < 0) throw std::invalid_argument("dilation rounds must be >= 0");
    LabelMap current = gt;
    const int h = gt.height();
    const int w = gt.width();
    for (int round = 0; round < rounds; ++round) {
        LabelMap next = current;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                if (current.at(r, c) != 0) continue;
                std::uint32_t claim = 0;
                for (const auto& d : detail::neighbor_offsets(Connectivity::four)) {
                    const int nr = r + d.row;
                    const int nc = c + d.col;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    const std::uint32_t label = current.at(nr, nc);
                    if (label != 0 && (claim == 0 || label < claim)) claim = label;
                }
                if (claim != 0) next.at(r, c) = claim;
            }
        }
        current = std::move(next);
    }
    return current;
}

LabelMap perturb_annotations(const LabelMap& gt, const CorruptionParams& params) {
    validate(params);
    return dilate_instances(gt, params.boundary_dilation);
}

}  // namespace cvec
