// Command-line surface of the center-vector segmentation pipeline:
//   synth       write a synthetic ground-truth label map
//   encode      ground truth -> inside/center/vector training targets
//   decode      predicted fields -> instance label map
//   eval        gt + prediction label maps -> AJI / IOU / Dice report
//   baseline-rw random-walker instance differentiation (no vector field)
//
// Exit codes: 0 success, 1 usage error, 2 data error. Errors go to stderr
// with the stable prefixes "error: usage:" and "error: data:".
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "centervec/config.hpp"
#include "centervec/decoding.hpp"
#include "centervec/encoding.hpp"
#include "centervec/losses.hpp"
#include "centervec/metrics.hpp"
#include "centervec/random_walker.hpp"
#include "centervec/raster_io.hpp"
#include "centervec/synth.hpp"

namespace fs = std::filesystem;
using namespace cvec;

namespace {

struct SynthArgs {
    SynthParams params;
    int height = 256;
    int width = 256;
    std::string out;
    std::string pgm;
};

struct EncodeArgs {
    std::string gt;
    std::string out_inside;
    std::string out_center;
    std::string out_vectors;
    std::string out_centroids;
};

struct DecodeArgs {
    std::string inside;
    std::string center;
    std::string vectors;
    std::string out;
    std::string report;
    std::string pgm;
};

struct EvalArgs {
    std::string gt;
    std::string pred;
    std::string pairs;
    std::string name = "image0";
    std::string mode = "literal";
    std::string out;
    std::string json_out;
    bool parallel = false;
    int jobs = 4;
    std::string pred_inside;
    std::string pred_center;
    std::string pred_vectors;
};

struct RwArgs {
    std::string inside;
    std::string center;
    std::string out;
    std::string pgm;
};

std::string field(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

fs::path resolve_out(const RunConfig& config, const std::string& explicit_path,
                     const char* default_name) {
    if (!explicit_path.empty()) return explicit_path;
    return fs::path(config.out_dir) / default_name;
}

void write_centroids(const std::vector<Centroid>& centroids, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(IoErrorKind::io_failure, "cannot write " + path.string());
    out << "# instance_label cx cy\n";
    for (const Centroid& c : centroids) {
        char line[96];
        std::snprintf(line, sizeof(line), "%u %.17g %.17g\n", c.instance_label, c.cx, c.cy);
        out << line;
    }
}

void write_decode_report(const DecodeReport& report, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(IoErrorKind::io_failure, "cannot write " + path.string());
    out << "suppressed_components=" << report.suppressed_components << "\n"
        << "fallback_pixels=" << report.fallback_pixels << "\n"
        << "holes_filled=" << report.holes_filled << "\n";
}

int run_synth(const SynthArgs& args) {
    SynthParams params = args.params;
    params.shape = RasterShape{args.height, args.width};
    const LabelMap gt = generate_scene(params);
    write_raster(gt, args.out);
    if (!args.pgm.empty()) write_label_map_pgm(gt, args.pgm);
    std::cout << "instances=" << count_labels(gt) << "\n";
    return 0;
}

int run_encode(const EncodeArgs& args, const RunConfig& config) {
    const LabelMap gt = read_label_map(args.gt);
    const EncodedTargets targets = encode_targets(gt, config.encode);
    for (const std::uint32_t label : targets.empty_center_labels) {
        std::cerr << "warning: instance " << label << " has an empty center region\n";
    }
    write_raster(targets.inside, resolve_out(config, args.out_inside, "inside.cvr"));
    write_raster(targets.center, resolve_out(config, args.out_center, "center.cvr"));
    write_raster(targets.vectors, resolve_out(config, args.out_vectors, "vectors.cvr"));
    write_centroids(targets.centroids,
                    resolve_out(config, args.out_centroids, "centroids.txt"));
    return 0;
}

int run_decode(const DecodeArgs& args, const RunConfig& config) {
    const ScalarField inside = read_probability_field(args.inside);
    const ScalarField center = read_probability_field(args.center);
    const VectorField vectors = read_vector_field(args.vectors);
    const auto [labels, report] = decode_instances(inside, center, vectors, config.decode);
    write_raster(labels, resolve_out(config, args.out, "instances.cvr"));
    write_decode_report(report, resolve_out(config, args.report, "decode_report.txt"));
    if (!args.pgm.empty()) write_label_map_pgm(labels, args.pgm);
    std::cout << "instances=" << count_labels(labels) << "\n";
    return 0;
}

struct EvalItem {
    std::string name;
    fs::path gt;
    fs::path pred;
};

std::vector<EvalItem> collect_eval_items(const EvalArgs& args) {
    std::vector<EvalItem> items;
    if (!args.pairs.empty()) {
        std::ifstream in(args.pairs);
        if (!in) throw IoError(IoErrorKind::io_failure, "cannot open " + args.pairs);
        std::string line;
        int index = 0;
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string gt, pred, name;
            if (!(row >> gt)) continue;
            if (gt.front() == '#') continue;
            if (!(row >> pred)) {
                throw ConfigError("pairs file: line needs 'gt pred [name]': '" + line + "'");
            }
            if (!(row >> name)) name = "image" + std::to_string(index);
            items.push_back({name, gt, pred});
            ++index;
        }
    } else {
        items.push_back({args.name, args.gt, args.pred});
    }
    return items;
}

int run_eval(const EvalArgs& args, const RunConfig& config) {
    if (args.pairs.empty() && (args.gt.empty() || args.pred.empty()) &&
        args.pred_inside.empty()) {
        throw ConfigError("eval needs --gt and --pred, or --pairs");
    }

    const AjiMode mode = args.mode == "used-flag" ? AjiMode::used_flag : AjiMode::literal;

    std::ostringstream text;
    double sum_aji = 0.0;
    double sum_iou = 0.0;
    double sum_dice = 0.0;
    nlohmann::json json_images = nlohmann::json::array();

    std::vector<EvalItem> items;
    if (!args.gt.empty() && !args.pred.empty()) {
        items = collect_eval_items(args);
    } else if (!args.pairs.empty()) {
        items = collect_eval_items(args);
    }

    auto evaluate_item = [&](const EvalItem& item) {
        const LabelMap gt = read_label_map(item.gt);
        const LabelMap pred = read_label_map(item.pred);
        MetricReport report = evaluate(gt, pred);
        if (mode == AjiMode::used_flag) report.aji = aji(gt, pred, mode);
        return report;
    };

    std::vector<MetricReport> reports(items.size());
    if (args.parallel && items.size() > 1) {
        const int jobs = std::max(1, args.jobs);
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        for (int j = 0; j < jobs; ++j) {
            futures.push_back(std::async(std::launch::async, [&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= items.size()) return;
                    reports[i] = evaluate_item(items[i]);
                }
            }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < items.size(); ++i) reports[i] = evaluate_item(items[i]);
    }

    for (std::size_t i = 0; i < items.size(); ++i) {
        const MetricReport& report = reports[i];
        text << "image=" << items[i].name << "\n"
             << "aji=" << field(report.aji) << "\n"
             << "iou=" << field(report.iou) << "\n"
             << "dice=" << field(report.dice) << "\n\n";
        sum_aji += report.aji;
        sum_iou += report.iou;
        sum_dice += report.dice;
        json_images.push_back({{"name", items[i].name},
                               {"aji", report.aji},
                               {"iou", report.iou},
                               {"dice", report.dice}});
    }

    nlohmann::json json_report;
    if (!items.empty()) {
        const double n = static_cast<double>(items.size());
        text << "# aggregate\n"
             << "aji=" << field(sum_aji / n) << "\n"
             << "iou=" << field(sum_iou / n) << "\n"
             << "dice=" << field(sum_dice / n) << "\n";
        json_report["images"] = json_images;
        json_report["aggregate"] = {
            {"aji", sum_aji / n}, {"iou", sum_iou / n}, {"dice", sum_dice / n}};
    }

    // Optional loss reporting: predicted fields scored against the targets
    // encoded from the ground truth.
    if (!args.pred_inside.empty() || !args.pred_center.empty() || !args.pred_vectors.empty()) {
        if (args.pred_inside.empty() || args.pred_center.empty() || args.pred_vectors.empty() ||
            args.gt.empty()) {
            throw ConfigError(
                "loss reporting needs --gt, --pred-inside, --pred-center and --pred-vectors");
        }
        const LabelMap gt = read_label_map(args.gt);
        const EncodedTargets targets = encode_targets(gt, config.encode);
        const ScalarField pred_inside = read_probability_field(args.pred_inside);
        const ScalarField pred_center = read_probability_field(args.pred_center);
        const VectorField pred_vectors = read_vector_field(args.pred_vectors);

        auto mask_field = [](const BinaryMask& mask) {
            ScalarField f(mask.shape(), 0.0);
            for (std::int64_t i = 0; i < mask.size(); ++i) f[i] = mask[i] ? 1.0 : 0.0;
            return f;
        };
        const BinaryMask all(targets.inside.shape(), 1);
        const LossTensors inside{mask_field(targets.inside), pred_inside, all};
        const LossTensors center{mask_field(targets.center), pred_center, all};
        const LossTensors cvx{targets.vectors.dx, pred_vectors.dx, targets.validity};
        const LossTensors cvy{targets.vectors.dy, pred_vectors.dy, targets.validity};
        const TotalLoss loss = total_loss(inside, center, cvx, cvy, config.loss);
        text << "# loss\n"
             << "loss.ce=" << field(loss.ce_total) << "\n"
             << "loss.iou=" << field(loss.iou_total) << "\n"
             << "loss.ms=" << field(loss.ms_total) << "\n"
             << "loss.total=" << field(loss.value) << "\n";
        json_report["loss"] = {{"ce", loss.ce_total},
                               {"iou", loss.iou_total},
                               {"ms", loss.ms_total},
                               {"total", loss.value}};
    }

    std::cout << text.str();
    if (!args.out.empty()) {
        std::ofstream out(args.out);
        if (!out) throw IoError(IoErrorKind::io_failure, "cannot write " + args.out);
        out << text.str();
    }
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out);
        if (!out) throw IoError(IoErrorKind::io_failure, "cannot write " + args.json_out);
        out << json_report.dump(2) << "\n";
    }
    return 0;
}

int run_baseline_rw(const RwArgs& args, const RunConfig& config) {
    const ScalarField inside_prob = read_probability_field(args.inside);
    const ScalarField center_prob = read_probability_field(args.center);
    if (!(inside_prob.shape() == center_prob.shape())) {
        throw std::invalid_argument("shape mismatch: inside vs center rasters");
    }

    const BinaryMask inside = binarize(inside_prob, config.decode.inside_threshold);
    const BinaryMask center = binarize(center_prob, config.decode.center_threshold);
    const SuppressionResult suppressed =
        suppress_false_positives(inside, center, config.decode.connectivity);
    const CenterRegions regions =
        extract_center_regions(center, config.decode.connectivity);

    LabelMap labels(inside.shape(), 0);
    bool any = false;
    for (std::int64_t i = 0; i < suppressed.mask.size(); ++i) {
        any = any || suppressed.mask[i] != 0;
    }
    if (any) {
        labels = random_walker_segment(suppressed.mask, regions, inside_prob, config.rw);
    }
    write_raster(labels, resolve_out(config, args.out, "instances_rw.cvr"));
    if (!args.pgm.empty()) write_label_map_pgm(labels, args.pgm);
    std::cout << "instances=" << count_labels(labels) << "\n";
    return 0;
}

RunConfig layer_config(const std::string& config_path) {
    RunConfig config;
    if (!config_path.empty()) config = load_config_file(config_path, config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Center-vector encoding pipeline for nuclear instance segmentation"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic ground-truth scene");
    synth_cmd->add_option("--seed", synth_args.params.seed, "PRNG seed");
    synth_cmd->add_option("--height", synth_args.height, "Raster height")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--width", synth_args.width, "Raster width")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--count", synth_args.params.nucleus_count, "Nucleus count")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--radius-min", synth_args.params.radius_min,
                          "Minimum semi-minor radius (>= 5)");
    synth_cmd->add_option("--radius-max", synth_args.params.radius_max, "Maximum semi-minor radius");
    synth_cmd->add_option("--eccentricity-max", synth_args.params.eccentricity_max,
                          "Maximum eccentricity in [0,1)");
    synth_cmd->add_flag("--no-touching{false}", synth_args.params.allow_touching,
                        "Forbid touching instances");
    synth_cmd->add_option("--max-overlap", synth_args.params.max_overlap_fraction,
                          "Allowed overlap fraction in [0,0.3)");
    synth_cmd->add_option("--out", synth_args.out, "Output label map (.cvr)")->required();
    synth_cmd->add_option("--pgm", synth_args.pgm, "Also export a 16-bit PGM");

    std::string config_path;
    EncodeArgs encode_args;
    int flag_radius = 0;
    double flag_threshold = 0.0;
    std::string flag_conn;
    std::string flag_out_dir;
    CLI::App* encode_cmd = app.add_subcommand("encode", "Encode training targets from a label map");
    encode_cmd->add_option("--config", config_path, "key = value config file");
    encode_cmd->add_option("--gt", encode_args.gt, "Ground-truth label map (.cvr)")->required();
    CLI::Option* opt_radius =
        encode_cmd->add_option("--radius", flag_radius, "Erosion radius")->check(CLI::PositiveNumber);
    CLI::Option* opt_threshold = encode_cmd->add_option("--threshold", flag_threshold,
                                                        "Center distance threshold");
    CLI::Option* opt_enc_conn =
        encode_cmd->add_option("--connectivity", flag_conn, "four|eight");
    CLI::Option* opt_enc_outdir = encode_cmd->add_option("--out-dir", flag_out_dir,
                                                         "Directory for default output names");
    encode_cmd->add_option("--out-inside", encode_args.out_inside, "Inside mask output");
    encode_cmd->add_option("--out-center", encode_args.out_center, "Center mask output");
    encode_cmd->add_option("--out-vectors", encode_args.out_vectors, "Vector field output");
    encode_cmd->add_option("--out-centroids", encode_args.out_centroids, "Centroid sidecar text");

    DecodeArgs decode_args;
    double flag_inside_t = 0.0;
    double flag_center_t = 0.0;
    int flag_min_area = 0;
    CLI::App* decode_cmd = app.add_subcommand("decode", "Differentiate instances from predictions");
    decode_cmd->add_option("--config", config_path, "key = value config file");
    decode_cmd->add_option("--inside", decode_args.inside, "Inside probability field or mask")
        ->required();
    decode_cmd->add_option("--center", decode_args.center, "Center probability field or mask")
        ->required();
    decode_cmd->add_option("--vectors", decode_args.vectors, "Center-vector field")->required();
    CLI::Option* opt_inside_t =
        decode_cmd->add_option("--inside-threshold", flag_inside_t, "Binarization threshold")
            ->check(CLI::Range(0.0, 1.0));
    CLI::Option* opt_center_t =
        decode_cmd->add_option("--center-threshold", flag_center_t, "Binarization threshold")
            ->check(CLI::Range(0.0, 1.0));
    CLI::Option* opt_dec_conn = decode_cmd->add_option("--connectivity", flag_conn, "four|eight");
    CLI::Option* opt_min_area =
        decode_cmd->add_option("--min-area", flag_min_area, "Minimum instance area")
            ->check(CLI::NonNegativeNumber);
    CLI::Option* opt_dec_outdir = decode_cmd->add_option("--out-dir", flag_out_dir,
                                                         "Directory for default output names");
    decode_cmd->add_option("--out", decode_args.out, "Instance label map output");
    decode_cmd->add_option("--report", decode_args.report, "Decode report text output");
    decode_cmd->add_option("--pgm", decode_args.pgm, "Also export a 16-bit PGM");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
    eval_cmd->add_option("--config", config_path, "key = value config file");
    eval_cmd->add_option("--gt", eval_args.gt, "Ground-truth label map");
    eval_cmd->add_option("--pred", eval_args.pred, "Predicted label map");
    eval_cmd->add_option("--pairs", eval_args.pairs, "File of 'gt pred [name]' lines");
    eval_cmd->add_option("--name", eval_args.name, "Image name for the single-pair form");
    eval_cmd->add_option("--mode", eval_args.mode, "AJI mode")
        ->check(CLI::IsMember({"literal", "used-flag"}));
    eval_cmd->add_option("--out", eval_args.out, "Write the text report here too");
    eval_cmd->add_option("--json", eval_args.json_out, "Write a JSON report");
    eval_cmd->add_flag("--parallel", eval_args.parallel, "Evaluate images in parallel");
    eval_cmd->add_option("--jobs", eval_args.jobs, "Worker count for --parallel")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--pred-inside", eval_args.pred_inside,
                         "Predicted inside field for loss reporting");
    eval_cmd->add_option("--pred-center", eval_args.pred_center,
                         "Predicted center field for loss reporting");
    eval_cmd->add_option("--pred-vectors", eval_args.pred_vectors,
                         "Predicted vector field for loss reporting");

    RwArgs rw_args;
    double flag_beta = 0.0;
    double flag_cg_tol = 0.0;
    int flag_cg_iters = 0;
    std::string flag_rw_conn;
    CLI::App* rw_cmd =
        app.add_subcommand("baseline-rw", "Random-walker instance differentiation baseline");
    rw_cmd->add_option("--config", config_path, "key = value config file");
    rw_cmd->add_option("--inside", rw_args.inside, "Inside probability field or mask")->required();
    rw_cmd->add_option("--center", rw_args.center, "Center probability field or mask")->required();
    CLI::Option* opt_rw_inside_t =
        rw_cmd->add_option("--inside-threshold", flag_inside_t, "Binarization threshold")
            ->check(CLI::Range(0.0, 1.0));
    CLI::Option* opt_rw_center_t =
        rw_cmd->add_option("--center-threshold", flag_center_t, "Binarization threshold")
            ->check(CLI::Range(0.0, 1.0));
    CLI::Option* opt_beta = rw_cmd->add_option("--beta", flag_beta, "Edge-weight contrast");
    CLI::Option* opt_cg_tol = rw_cmd->add_option("--cg-tol", flag_cg_tol, "CG relative residual");
    CLI::Option* opt_cg_iters =
        rw_cmd->add_option("--cg-max-iters", flag_cg_iters, "CG iteration cap")
            ->check(CLI::PositiveNumber);
    CLI::Option* opt_rw_conn = rw_cmd->add_option("--rw-connectivity", flag_rw_conn,
                                                  "Walker graph connectivity four|eight");
    CLI::Option* opt_rw_outdir = rw_cmd->add_option("--out-dir", flag_out_dir,
                                                    "Directory for default output names");
    rw_cmd->add_option("--out", rw_args.out, "Instance label map output");
    rw_cmd->add_option("--pgm", rw_args.pgm, "Also export a 16-bit PGM");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(synth_cmd)) return run_synth(synth_args);

        RunConfig config = layer_config(config_path);
        if (*opt_enc_outdir || *opt_dec_outdir || *opt_rw_outdir) config.out_dir = flag_out_dir;

        if (app.got_subcommand(encode_cmd)) {
            if (*opt_radius) config.encode.erosion_radius = flag_radius;
            if (*opt_threshold) config.encode.center_distance_threshold = flag_threshold;
            if (*opt_enc_conn) config.encode.connectivity = parse_connectivity(flag_conn);
            return run_encode(encode_args, config);
        }
        if (app.got_subcommand(decode_cmd)) {
            if (*opt_inside_t) config.decode.inside_threshold = flag_inside_t;
            if (*opt_center_t) config.decode.center_threshold = flag_center_t;
            if (*opt_dec_conn) config.decode.connectivity = parse_connectivity(flag_conn);
            if (*opt_min_area) config.decode.min_instance_area = flag_min_area;
            return run_decode(decode_args, config);
        }
        if (app.got_subcommand(eval_cmd)) {
            return run_eval(eval_args, config);
        }
        if (app.got_subcommand(rw_cmd)) {
            if (*opt_rw_inside_t) config.decode.inside_threshold = flag_inside_t;
            if (*opt_rw_center_t) config.decode.center_threshold = flag_center_t;
            if (*opt_beta) config.rw.beta = flag_beta;
            if (*opt_cg_tol) config.rw.cg_tolerance = flag_cg_tol;
            if (*opt_cg_iters) config.rw.cg_max_iters = flag_cg_iters;
            if (*opt_rw_conn) config.rw.connectivity = parse_connectivity(flag_rw_conn);
            return run_baseline_rw(rw_args, config);
        }
        std::cerr << "error: usage: no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 2;
    }
}
