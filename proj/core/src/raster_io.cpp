#include "centervec/raster_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace cvec {

namespace {

constexpr char kMagic[8] = {'C', 'V', 'R', 'A', 'S', 'T', '0', '1'};
constexpr std::size_t kHeaderSize = 8 + 1 + 1 + 4 + 4;

std::size_t dtype_size(RasterDtype dtype) {
    switch (dtype) {
        case RasterDtype::u8: return 1;
        case RasterDtype::u16: return 2;
        case RasterDtype::f32: return 4;
    }
    throw IoError(IoErrorKind::bad_header, "unknown dtype");
}

void put_u32le(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
    buf.push_back(static_cast<std::uint8_t>(v >> 16));
    buf.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16le(std::vector<std::uint8_t>& buf, std::uint16_t v) {
    buf.push_back(static_cast<std::uint8_t>(v));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_f32le(std::vector<std::uint8_t>& buf, float v) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    put_u32le(buf, bits);
}

float get_f32le(const std::uint8_t* p) {
    return std::bit_cast<float>(get_u32le(p));
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::io_failure, "cannot open for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError(IoErrorKind::io_failure, "write failed: " + path.string());
    }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(IoErrorKind::io_failure, "cannot open for reading: " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

std::vector<std::uint8_t> make_header(RasterDtype dtype, int channels, RasterShape shape) {
    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kMagic, kMagic + 8);
    buf.push_back(static_cast<std::uint8_t>(dtype));
    buf.push_back(static_cast<std::uint8_t>(channels));
    put_u32le(buf, static_cast<std::uint32_t>(shape.height));
    put_u32le(buf, static_cast<std::uint32_t>(shape.width));
    return buf;
}

struct Header {
    RasterDtype dtype;
    int channels;
    RasterShape shape;
};

Header parse_header(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 8) != 0) {
        throw IoError(IoErrorKind::bad_magic, "not a CVRAST01 file: " + path.string());
    }
    const std::uint8_t dtype_byte = bytes[8];
    const std::uint8_t channels = bytes[9];
    if (dtype_byte > 2 || (channels != 1 && channels != 2)) {
        throw IoError(IoErrorKind::bad_header,
                      "unsupported dtype/channels in " + path.string());
    }
    Header h;
    h.dtype = static_cast<RasterDtype>(dtype_byte);
    h.channels = channels;
    const std::uint32_t height = get_u32le(bytes.data() + 10);
    const std::uint32_t width = get_u32le(bytes.data() + 14);
    if (height < 1 || width < 1 || height > 1u << 20 || width > 1u << 20) {
        throw IoError(IoErrorKind::bad_header, "bad raster dimensions in " + path.string());
    }
    h.shape = RasterShape{static_cast<int>(height), static_cast<int>(width)};

    const std::size_t expected =
        kHeaderSize + static_cast<std::size_t>(h.shape.pixel_count()) * h.channels *
                          dtype_size(h.dtype);
    if (bytes.size() < expected) {
        throw IoError(IoErrorKind::truncated,
                      "truncated payload in " + path.string() + ": have " +
                          std::to_string(bytes.size()) + " bytes, need " +
                          std::to_string(expected));
    }
    return h;
}

}  // namespace

RasterValue read_raster(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    const Header h = parse_header(bytes, path);
    const std::uint8_t* payload = bytes.data() + kHeaderSize;
    const std::int64_t n = h.shape.pixel_count();

    if (h.dtype == RasterDtype::u8 && h.channels == 1) {
        BinaryMask mask(h.shape, 0);
        for (std::int64_t i = 0; i < n; ++i) mask[i] = payload[i] != 0 ? 1 : 0;
        return mask;
    }
    if (h.dtype == RasterDtype::u16 && h.channels == 1) {
        LabelMap labels(h.shape, 0);
        for (std::int64_t i = 0; i < n; ++i) {
            labels[i] = static_cast<std::uint32_t>(payload[2 * i]) |
                        (static_cast<std::uint32_t>(payload[2 * i + 1]) << 8);
        }
        return labels;
    }
    if (h.dtype == RasterDtype::f32 && h.channels == 1) {
        ScalarField field(h.shape, 0.0);
        for (std::int64_t i = 0; i < n; ++i) field[i] = get_f32le(payload + 4 * i);
        return field;
    }
    if (h.dtype == RasterDtype::f32 && h.channels == 2) {
        VectorField field(h.shape);
        for (std::int64_t i = 0; i < n; ++i) field.dx[i] = get_f32le(payload + 4 * i);
        for (std::int64_t i = 0; i < n; ++i) field.dy[i] = get_f32le(payload + 4 * (n + i));
        return field;
    }
    throw IoError(IoErrorKind::bad_header,
                  "unsupported dtype/channels combination in " + path.string());
}

namespace {

template <typename T>
T read_expecting(const std::filesystem::path& path, const char* what) {
    RasterValue value = read_raster(path);
    if (T* typed = std::get_if<T>(&value)) return std::move(*typed);
    throw IoError(IoErrorKind::type_mismatch,
                  std::string("expected ") + what + " in " + path.string());
}

}  // namespace

BinaryMask read_binary_mask(const std::filesystem::path& path) {
    return read_expecting<BinaryMask>(path, "a u8 binary mask");
}

LabelMap read_label_map(const std::filesystem::path& path) {
    return read_expecting<LabelMap>(path, "a u16 label map");
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
    return read_expecting<ScalarField>(path, "an f32 scalar field");
}

VectorField read_vector_field(const std::filesystem::path& path) {
    return read_expecting<VectorField>(path, "a 2-channel f32 vector field");
}

ScalarField read_probability_field(const std::filesystem::path& path) {
    RasterValue value = read_raster(path);
    if (ScalarField* field = std::get_if<ScalarField>(&value)) return std::move(*field);
    if (BinaryMask* mask = std::get_if<BinaryMask>(&value)) {
        ScalarField field(mask->shape(), 0.0);
        for (std::int64_t i = 0; i < mask->size(); ++i) field[i] = (*mask)[i] ? 1.0 : 0.0;
        return field;
    }
    throw IoError(IoErrorKind::type_mismatch,
                  "expected an f32 field or u8 mask in " + path.string());
}

void write_raster(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes = make_header(RasterDtype::u8, 1, mask.shape());
    for (std::int64_t i = 0; i < mask.size(); ++i) {
        bytes.push_back(mask[i] ? 1 : 0);
    }
    write_file(path, bytes);
}

void write_raster(const LabelMap& labels, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes = make_header(RasterDtype::u16, 1, labels.shape());
    for (std::int64_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > std::numeric_limits<std::uint16_t>::max()) {
            throw IoError(IoErrorKind::label_overflow,
                          "label " + std::to_string(labels[i]) +
                              " does not fit the u16 container: " + path.string());
        }
        put_u16le(bytes, static_cast<std::uint16_t>(labels[i]));
    }
    write_file(path, bytes);
}

void write_raster(const ScalarField& field, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes = make_header(RasterDtype::f32, 1, field.shape());
    for (std::int64_t i = 0; i < field.size(); ++i) {
        put_f32le(bytes, static_cast<float>(field[i]));
    }
    write_file(path, bytes);
}

void write_raster(const VectorField& field, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes = make_header(RasterDtype::f32, 2, field.shape());
    for (std::int64_t i = 0; i < field.dx.size(); ++i) {
        put_f32le(bytes, static_cast<float>(field.dx[i]));
    }
    for (std::int64_t i = 0; i < field.dy.size(); ++i) {
        put_f32le(bytes, static_cast<float>(field.dy[i]));
    }
    write_file(path, bytes);
}

void write_label_map_pgm(const LabelMap& labels, const std::filesystem::path& path) {
    for (std::int64_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 65535) {
            throw IoError(IoErrorKind::label_overflow,
                          "label " + std::to_string(labels[i]) + " exceeds PGM maxval");
        }
    }
    std::vector<std::uint8_t> bytes;
    const std::string header = "P5\n" + std::to_string(labels.width()) + " " +
                               std::to_string(labels.height()) + "\n65535\n";
    bytes.insert(bytes.end(), header.begin(), header.end());
    for (std::int64_t i = 0; i < labels.size(); ++i) {
        // PGM stores 16-bit samples most-significant byte first.
        bytes.push_back(static_cast<std::uint8_t>(labels[i] >> 8));
        bytes.push_back(static_cast<std::uint8_t>(labels[i] & 0xff));
    }
    write_file(path, bytes);
}

}  // namespace cvec
