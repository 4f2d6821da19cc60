#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>

#include "centervec/raster.hpp"

namespace cvec {

/// On-disk sample types of the CVRAST01 container.
enum class RasterDtype : std::uint8_t { u8 = 0, u16 = 1, f32 = 2 };

enum class IoErrorKind {
    io_failure,      ///< file missing / unreadable / unwritable
    bad_magic,       ///< first 8 bytes are not "CVRAST01"
    bad_header,      ///< header fields out of range
    truncated,       ///< payload shorter than the header promises
    type_mismatch,   ///< file holds a different raster type than expected
    label_overflow,  ///< label too large for the u16 container
};

class IoError : public std::runtime_error {
public:
    IoError(IoErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    IoErrorKind kind() const { return kind_; }

private:
    IoErrorKind kind_;
};

/// Any raster the container can hold. The (dtype, channels) pair selects the
/// type: u8/1 is a BinaryMask (nonzero = true), u16/1 a LabelMap, f32/1 a
/// ScalarField and f32/2 a VectorField (plane 0 = dx, plane 1 = dy).
using RasterValue = std::variant<BinaryMask, LabelMap, ScalarField, VectorField>;

/// Reads whatever raster the file holds.
RasterValue read_raster(const std::filesystem::path& path);

/// Typed readers; they raise type_mismatch when the file holds something else.
BinaryMask read_binary_mask(const std::filesystem::path& path);
LabelMap read_label_map(const std::filesystem::path& path);
ScalarField read_scalar_field(const std::filesystem::path& path);
VectorField read_vector_field(const std::filesystem::path& path);

/// Scalar field, also accepting a u8 mask as a {0, 1}-valued field. This is
/// what the decode-side tools use so they can consume either probability
/// fields or already-binary masks.
ScalarField read_probability_field(const std::filesystem::path& path);

void write_raster(const BinaryMask& mask, const std::filesystem::path& path);
/// Labels above 65535 do not fit the u16 container and raise label_overflow.
void write_raster(const LabelMap& labels, const std::filesystem::path& path);
/// Scalar and vector payloads are stored as f32.
void write_raster(const ScalarField& field, const std::filesystem::path& path);
void write_raster(const VectorField& field, const std::filesystem::path& path);

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples) for external
/// viewers. Inspection only; the CVRAST01 container is the exact format.
void write_label_map_pgm(const LabelMap& labels, const std::filesystem::path& path);

}  // namespace cvec
