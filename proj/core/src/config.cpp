#include "centervec/config.hpp"

#include <fstream>
#include <sstream>

namespace cvec {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
}

}  // namespace

Connectivity parse_connectivity(const std::string& value) {
    if (value == "four") return Connectivity::four;
    if (value == "eight") return Connectivity::eight;
    throw ConfigError("config: connectivity must be 'four' or 'eight', got '" + value + "'");
}

const char* connectivity_name(Connectivity conn) {
    return conn == Connectivity::four ? "four" : "eight";
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "encode.erosion_radius") {
        config.encode.erosion_radius = parse_int(key, value);
    } else if (key == "encode.center_distance_threshold") {
        config.encode.center_distance_threshold = parse_double(key, value);
    } else if (key == "encode.connectivity") {
        config.encode.connectivity = parse_connectivity(value);
    } else if (key == "decode.inside_threshold") {
        config.decode.inside_threshold = parse_double(key, value);
    } else if (key == "decode.center_threshold") {
        config.decode.center_threshold = parse_double(key, value);
    } else if (key == "decode.connectivity") {
        config.decode.connectivity = parse_connectivity(value);
    } else if (key == "decode.min_instance_area") {
        config.decode.min_instance_area = parse_int(key, value);
    } else if (key == "rw.beta") {
        config.rw.beta = parse_double(key, value);
    } else if (key == "rw.cg_tolerance") {
        config.rw.cg_tolerance = parse_double(key, value);
    } else if (key == "rw.cg_max_iters") {
        config.rw.cg_max_iters = parse_int(key, value);
    } else if (key == "rw.connectivity") {
        config.rw.connectivity = parse_connectivity(value);
    } else if (key == "loss.alpha") {
        config.loss.alpha = parse_double(key, value);
    } else if (key == "loss.beta") {
        config.loss.beta = parse_double(key, value);
    } else if (key == "loss.gamma") {
        config.loss.gamma = parse_double(key, value);
    } else if (key == "paths.out_dir") {
        config.out_dir = value;
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text, const RunConfig& base) {
    RunConfig config = base;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value': '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config: empty key on line " + std::to_string(line_no));
        }
        apply_config_entry(config, key, value);
    }
    return config;
}

RunConfig load_config_file(const std::filesystem::path& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), base);
}

}  // namespace cvec
