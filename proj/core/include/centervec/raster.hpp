#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvec {

/// Raster dimensions. Coordinate convention used throughout the library:
/// x = column index (horizontal), y = row index (vertical), origin at the
/// top-left pixel.
struct RasterShape {
    int height = 0;
    int width = 0;

    friend bool operator==(const RasterShape&, const RasterShape&) = default;

    std::int64_t pixel_count() const {
        return static_cast<std::int64_t>(height) * width;
    }
};

/// Pixel adjacency for connected-component style algorithms.
enum class Connectivity { four, eight };

/// Standard digital-topology duality: foreground tracked with one
/// connectivity pairs with background tracked with the other.
inline Connectivity complement(Connectivity c) {
    return c == Connectivity::four ? Connectivity::eight : Connectivity::four;
}

/// Dense row-major 2-D raster. Values are immutable by convention once an
/// algorithm returns one; all library operations are pure functions.
template <typename T>
class Raster {
public:
    Raster() = default;

    explicit Raster(RasterShape shape, T fill = T{})
        : shape_(shape), data_(checked_size(shape), fill) {}

    Raster(int height, int width, T fill = T{})
        : Raster(RasterShape{height, width}, fill) {}

    const RasterShape& shape() const { return shape_; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    std::int64_t size() const { return shape_.pixel_count(); }

    T& at(int row, int col) { return data_[index(row, col)]; }
    const T& at(int row, int col) const { return data_[index(row, col)]; }

    T& operator[](std::int64_t i) { return data_[i]; }
    const T& operator[](std::int64_t i) const { return data_[i]; }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < shape_.height && col >= 0 && col < shape_.width;
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static std::size_t checked_size(RasterShape s) {
        if (s.height < 1 || s.width < 1) {
            throw std::invalid_argument("raster shape must be at least 1x1, got " +
                                        std::to_string(s.height) + "x" +
                                        std::to_string(s.width));
        }
        return static_cast<std::size_t>(s.pixel_count());
    }

    std::int64_t index(int row, int col) const {
        return static_cast<std::int64_t>(row) * shape_.width + col;
    }

    RasterShape shape_;
    std::vector<T> data_;
};

/// Single-channel boolean raster (stored as 0/1 bytes).
using BinaryMask = Raster<std::uint8_t>;

/// Instance raster: 0 = background, each positive value is one instance.
/// Labels need not be contiguous.
using LabelMap = Raster<std::uint32_t>;

/// Single-channel real raster. All values must stay finite.
using ScalarField = Raster<double>;

/// Two-channel real raster of per-pixel displacements in pixels.
/// dx is the horizontal (column) component, dy the vertical (row) one.
struct VectorField {
    ScalarField dx;
    ScalarField dy;

    VectorField() = default;
    explicit VectorField(RasterShape shape) : dx(shape), dy(shape) {}

    const RasterShape& shape() const { return dx.shape(); }

    friend bool operator==(const VectorField&, const VectorField&) = default;
};

/// Integer pixel position, (row, col).
struct PixelCoord {
    int row = 0;
    int col = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Labels each maximal connected foreground region 1..K, background stays 0.
/// Labels are assigned in raster-scan order of each region's first pixel, so
/// the result is deterministic.
LabelMap connected_components(const BinaryMask& mask, Connectivity conn);

/// Number of distinct nonzero labels in a map.
int count_labels(const LabelMap& labels);

/// Morphological erosion by a Euclidean disk {(a,b): a^2+b^2 <= r^2}.
/// The raster border is treated as background: a pixel whose element
/// extends past the border is eroded.
BinaryMask erode(const BinaryMask& mask, int radius);

/// Exact squared Euclidean distance to the nearest background pixel, in
/// integer arithmetic. The border counts as adjacent background (a virtual
/// background ring just outside the raster). Background pixels get 0.
Raster<std::int64_t> squared_distance_transform(const BinaryMask& mask);

/// Exact Euclidean distance transform: sqrt of squared_distance_transform.
ScalarField distance_transform(const BinaryMask& mask);

/// Label of the nonzero pixel nearest to `point` (Euclidean). Ties resolve
/// by smaller squared distance, then smaller row, then smaller column.
/// Throws std::invalid_argument if `regions` has no nonzero pixel.
std::uint32_t nearest_label(PixelCoord point, const LabelMap& regions);

/// Flips background components that do not reach the raster border.
/// Background connectivity is the complement of `conn`.
BinaryMask fill_holes(const BinaryMask& mask, Connectivity conn);

namespace detail {

/// Neighbor offsets (row, col) for a connectivity, in fixed scan order.
inline const std::vector<PixelCoord>& neighbor_offsets(Connectivity conn) {
    static const std::vector<PixelCoord> four = {
        {-1, 0}, {0, -1}, {0, 1}, {1, 0}};
    static const std::vector<PixelCoord> eight = {
        {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};
    return conn == Connectivity::four ? four : eight;
}

}  // namespace detail

}  // namespace cvec
