#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "centervec/decoding.hpp"
#include "centervec/encoding.hpp"
#include "centervec/losses.hpp"
#include "centervec/random_walker.hpp"

namespace cvec {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pipeline configuration: encode, decode and random-walker parameters,
/// loss weights and output paths. Populated in three layers: built-in
/// defaults, then a `key = value` config file, then command-line flags
/// (flags win).
struct RunConfig {
    EncodeParams encode;
    DecodeParams decode;
    RWParams rw;
    LossWeights loss;
    std::string out_dir = ".";
};

/// Applies one `key = value` entry. Unknown keys are hard errors so typos
/// never pass silently. Recognized keys:
///   encode.erosion_radius, encode.center_distance_threshold,
///   encode.connectivity, decode.inside_threshold, decode.center_threshold,
///   decode.connectivity, decode.min_instance_area, rw.beta,
///   rw.cg_tolerance, rw.cg_max_iters, rw.connectivity, loss.alpha,
///   loss.beta, loss.gamma, paths.out_dir
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

/// Parses config text: one `key = value` per line, blank lines and lines
/// whose first non-space character is '#' are skipped.
RunConfig parse_config_text(const std::string& text, const RunConfig& base = RunConfig{});

/// parse_config_text on a file's contents.
RunConfig load_config_file(const std::filesystem::path& path,
                           const RunConfig& base = RunConfig{});

Connectivity parse_connectivity(const std::string& value);
const char* connectivity_name(Connectivity conn);

}  // namespace cvec
