// ambra: command-line frontend for the ambisonics toolkit.
//
// Pipeline stages map to subcommands: encoding (encode, encode-mic),
// editing (mix, rotate, mirror, dirgain, warp, compress, segment,
// subset-horizontal, convert), and rendering (decode, analyze, binaural).
// Angles are degrees on the command line, radians inside the library.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ambra/audio_file.hpp"
#include "ambra/binaural.hpp"
#include "ambra/decode.hpp"
#include "ambra/encode.hpp"
#include "ambra/rotation.hpp"
#include "ambra/transform.hpp"

namespace {

using namespace ambra;
using json = nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitValidation = 4;

double rad(double degrees) { return degrees * kPi / 180.0; }

struct InputConventionFlags {
    std::string ordering;
    std::string normalization;

    void attach(CLI::App* cmd) {
        cmd->add_option("--in-ordering", ordering,
                        "Channel ordering of the input (acn|fuma)")
            ->check(CLI::IsMember({"acn", "fuma"}));
        cmd->add_option("--in-normalization", normalization,
                        "Normalization of the input (sn3d|n3d|fuma)")
            ->check(CLI::IsMember({"sn3d", "n3d", "fuma"}));
    }

    std::optional<FormatMeta> hint(const std::filesystem::path& path) const {
        if (ordering.empty() && normalization.empty()) return std::nullopt;
        FormatMeta meta;
        meta.container = container_from_extension(path);
        if (ordering == "fuma" || (ordering.empty() && normalization == "fuma")) {
            if (!normalization.empty() && normalization != "fuma")
                throw InvalidArgument("fuma ordering requires fuma normalization");
            meta.convention = Convention::fuma();
            return meta;
        }
        if (normalization.empty())
            throw InvalidArgument(
                "acn ordering alone is ambiguous; add --in-normalization");
        meta.convention.ordering = ChannelOrdering::ACN;
        meta.convention.normalization = normalization == "sn3d" ? Normalization::SN3D
                                        : normalization == "n3d" ? Normalization::N3D
                                                                 : Normalization::FuMa;
        return meta;
    }
};

// Reads an ambisonic file and converts it to the canonical in-memory
// convention every processing module expects.
AmbisonicBuffer read_canonical(const std::filesystem::path& path,
                               const InputConventionFlags& flags) {
    const AmbisonicBuffer raw = read_audio(path, flags.hint(path));
    return convert_convention(raw, Convention::canonical());
}

void write_canonical(const AmbisonicBuffer& buffer, const std::filesystem::path& path) {
    write_audio(buffer, path, meta_from_extension(path, buffer.order()));
}

DecoderMethod method_from_name(const std::string& name) {
    if (name == "projection") return DecoderMethod::Projection;
    if (name == "modematch") return DecoderMethod::ModeMatching;
    if (name == "allrad") return DecoderMethod::AllRad;
    throw InvalidArgument("unknown decoder method '" + name + "'");
}

OrderWeighting weights_from_name(const std::string& name) {
    if (name == "none") return OrderWeighting::None;
    if (name == "maxre") return OrderWeighting::MaxRe;
    throw InvalidArgument("unknown weighting '" + name + "'");
}

void print_warnings(const DecoderMatrix& decoder) {
    for (const std::string& w : decoder.warnings) std::cerr << "ambra: note: " << w << "\n";
}

int run_info(const std::filesystem::path& input, const InputConventionFlags& flags,
             bool as_json) {
    // Horizontal subsets are not full ambisonic signals; recognize their
    // sidecar marker before the square-channel check rejects them.
    const std::filesystem::path sidecar = sidecar_path(input);
    if (std::filesystem::exists(sidecar)) {
        std::ifstream in(sidecar);
        json j;
        in >> j;
        if (j.value("horizontal", false)) {
            const MultichannelBuffer pcm = read_pcm(input);
            const int order = j.at("order").get<int>();
            if (as_json) {
                const json out = {{"horizontal", true},
                                  {"order", order},
                                  {"channels", pcm.samples.channels()},
                                  {"sample_rate", pcm.sample_rate},
                                  {"frames", pcm.samples.frames()}};
                std::cout << out.dump(2) << "\n";
            } else {
                std::printf(
                    "order: %d, channels: %zu, convention: acn/sn3d (horizontal subset)\n",
                    order, pcm.samples.channels());
                std::printf("sample rate: %.0f Hz, frames: %zu\n", pcm.sample_rate,
                            pcm.samples.frames());
            }
            return 0;
        }
    }

    const AmbisonicBuffer buffer = read_audio(input, flags.hint(input));
    if (as_json) {
        const json out = {{"order", buffer.order()},
                          {"channels", buffer.channels()},
                          {"ordering", to_string(buffer.convention().ordering)},
                          {"normalization", to_string(buffer.convention().normalization)},
                          {"sample_rate", buffer.sample_rate()},
                          {"frames", buffer.frames()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("order: %d, channels: %zu, convention: %s\n", buffer.order(),
                    buffer.channels(), buffer.convention().str().c_str());
        std::printf("sample rate: %.0f Hz, frames: %zu, duration: %.3f s\n",
                    buffer.sample_rate(), buffer.frames(),
                    buffer.frames() / buffer.sample_rate());
    }
    return 0;
}

int run_analyze(const std::filesystem::path& layout_path, const std::string& method,
                const std::string& weights, int order, int grid, double source_step_deg,
                double threshold_deg, bool as_json) {
    const SpeakerLayout layout = load_layout(layout_path);
    DecoderOptions options;
    options.weights = weights_from_name(weights);
    const DecoderMatrix decoder =
        build_decoder(layout, order, method_from_name(method), options);
    print_warnings(decoder);

    std::vector<Direction> sources;
    if (layout.geometry == LayoutGeometry::Circular2D) {
        for (double az = 0.0; az < 360.0; az += source_step_deg)
            sources.emplace_back(rad(az), 0.0);
    } else {
        sources = quadrature_grid(8).directions;
    }

    // Positions: a Cartesian grid over the horizontal plane, kept strictly
    // inside the hull.
    const std::size_t n_speakers = layout.speakers.size();
    double min_radius = 1e300;
    for (const Speaker& s : layout.speakers) min_radius = std::min(min_radius, s.radius);
    const double inradius =
        layout.geometry == LayoutGeometry::Circular2D
            ? min_radius * std::cos(kPi / static_cast<double>(n_speakers))
            : min_radius * 0.999;
    const double extent = 0.97 * inradius;
    std::vector<std::array<double, 3>> positions;
    for (int ix = 0; ix < grid; ++ix)
        for (int iy = 0; iy < grid; ++iy) {
            const double x = grid == 1 ? 0.0 : -extent + 2.0 * extent * ix / (grid - 1);
            const double y = grid == 1 ? 0.0 : -extent + 2.0 * extent * iy / (grid - 1);
            if (std::sqrt(x * x + y * y) <= extent) positions.push_back({x, y, 0.0});
        }

    const AnalysisReport report = analyze_decoder(decoder, layout, sources, positions);
    const double sweet = sweet_area_radius(report, threshold_deg);

    double center_error = 0.0;
    double best = 1e300;
    for (std::size_t i = 0; i < report.positions.size(); ++i) {
        const auto& p = report.positions[i];
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (r < best) {
            best = r;
            center_error = report.mean_error_deg[i];
        }
    }

    if (as_json) {
        json out = {{"speakers", n_speakers},
                    {"geometry", layout.geometry == LayoutGeometry::Circular2D ? "2d" : "3d"},
                    {"method", method},
                    {"weights", weights},
                    {"order", order},
                    {"source_count", sources.size()},
                    {"position_count", positions.size()},
                    {"threshold_deg", threshold_deg},
                    {"center_mean_error_deg", center_error},
                    {"sweet_area_radius_fraction", sweet}};
        json map = json::array();
        for (std::size_t i = 0; i < report.positions.size(); ++i)
            map.push_back({{"x", report.positions[i][0]},
                           {"y", report.positions[i][1]},
                           {"z", report.positions[i][2]},
                           {"mean_error_deg", report.mean_error_deg[i]}});
        out["positions"] = map;
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("layout: %zu speakers (%s), mean radius %.2f m\n", n_speakers,
                    layout.geometry == LayoutGeometry::Circular2D ? "2d" : "3d",
                    layout.mean_radius());
        std::printf("decoder: %s, order %d, weights %s\n", method.c_str(), order,
                    weights.c_str());
        std::printf("analysis: %zu source directions, %zu listening positions\n",
                    sources.size(), positions.size());
        std::printf("mean rE error near the center: %.2f deg\n", center_error);
        std::printf("sweet area radius (%.0f deg threshold): %.2f of the array radius\n",
                    threshold_deg, sweet);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ambisonic scene toolkit: encode, edit, decode, render"};
    app.require_subcommand(1);

    auto* info = app.add_subcommand("info", "Describe an ambisonic audio file");
    std::filesystem::path info_in;
    bool info_json = false;
    InputConventionFlags info_flags;
    info->add_option("input", info_in, "Audio file")->required();
    info->add_flag("--json", info_json, "Machine-readable output");
    info_flags.attach(info);

    auto* encode = app.add_subcommand("encode", "Render a scene description");
    std::filesystem::path encode_scene, encode_out;
    encode->add_option("scene", encode_scene, "Scene JSON file")->required();
    encode->add_option("--out", encode_out, "Output audio file")->required();

    auto* encode_mic =
        app.add_subcommand("encode-mic", "Tetrahedral A-format to 1st-order ambisonics");
    std::filesystem::path mic_in, mic_out;
    double mic_pattern = 0.5;
    encode_mic->add_option("input", mic_in, "4-channel A-format WAV (FLU, FRD, BLD, BRU)")
        ->required();
    encode_mic->add_option("--out", mic_out, "Output audio file")->required();
    encode_mic->add_option("--pattern", mic_pattern,
                           "Capsule pattern alpha in alpha + (1-alpha)cos");

    auto* mix_cmd = app.add_subcommand("mix", "Sum ambisonic signals channel by channel");
    std::vector<std::filesystem::path> mix_in;
    std::filesystem::path mix_out;
    InputConventionFlags mix_flags;
    mix_cmd->add_option("inputs", mix_in, "Input files")->required()->expected(-2);
    mix_cmd->add_option("--out", mix_out, "Output audio file")->required();
    mix_flags.attach(mix_cmd);

    auto* rotate_cmd = app.add_subcommand("rotate", "Rotate the sound scene");
    std::filesystem::path rot_in, rot_out;
    double rot_yaw = 0.0, rot_pitch = 0.0, rot_roll = 0.0;
    InputConventionFlags rot_flags;
    rotate_cmd->add_option("input", rot_in, "Input file")->required();
    rotate_cmd->add_option("--out", rot_out, "Output audio file")->required();
    rotate_cmd->add_option("--yaw", rot_yaw, "Yaw in degrees (about z, left positive)");
    rotate_cmd->add_option("--pitch", rot_pitch, "Pitch in degrees (about y)");
    rotate_cmd->add_option("--roll", rot_roll, "Roll in degrees (about x)");
    rot_flags.attach(rotate_cmd);

    auto* mirror_cmd = app.add_subcommand("mirror", "Mirror the scene through a plane");
    std::filesystem::path mir_in, mir_out;
    std::string mir_plane;
    InputConventionFlags mir_flags;
    mirror_cmd->add_option("input", mir_in, "Input file")->required();
    mirror_cmd->add_option("--out", mir_out, "Output audio file")->required();
    mirror_cmd->add_option("--plane", mir_plane, "left-right|front-back|top-bottom")
        ->required()
        ->check(CLI::IsMember({"left-right", "front-back", "top-bottom"}));
    mir_flags.attach(mirror_cmd);

    auto* dirgain_cmd =
        app.add_subcommand("dirgain", "Direction-dependent gain inside a window");
    std::filesystem::path dg_in, dg_out;
    double dg_az = 0.0, dg_el = 0.0, dg_inner = 0.0, dg_outer = 90.0, dg_gain_db = 0.0;
    InputConventionFlags dg_flags;
    dirgain_cmd->add_option("input", dg_in, "Input file")->required();
    dirgain_cmd->add_option("--out", dg_out, "Output audio file")->required();
    dirgain_cmd->add_option("--az", dg_az, "Window center azimuth (deg)");
    dirgain_cmd->add_option("--el", dg_el, "Window center elevation (deg)");
    dirgain_cmd->add_option("--inner", dg_inner, "Unity-weight radius (deg)");
    dirgain_cmd->add_option("--outer", dg_outer, "Zero-weight radius (deg)");
    dirgain_cmd->add_option("--gain-db", dg_gain_db, "Gain applied inside the window")
        ->required();
    dg_flags.attach(dirgain_cmd);

    auto* warp_cmd = app.add_subcommand("warp", "Squash elevations towards a target");
    std::filesystem::path warp_in, warp_out;
    double warp_towards = 0.0, warp_amount = 0.5;
    InputConventionFlags warp_flags;
    warp_cmd->add_option("input", warp_in, "Input file")->required();
    warp_cmd->add_option("--out", warp_out, "Output audio file")->required();
    warp_cmd->add_option("--towards-el", warp_towards, "Target elevation (deg)");
    warp_cmd->add_option("--amount", warp_amount, "Squash amount in [0, 1)")
        ->check(CLI::Range(0.0, 0.999));
    warp_flags.attach(warp_cmd);

    auto* compress_cmd =
        app.add_subcommand("compress", "Dynamic compression keyed on the omni channel");
    std::filesystem::path cmp_in, cmp_out;
    CompressorParams cmp_params;
    std::string cmp_detector = "peak";
    InputConventionFlags cmp_flags;
    compress_cmd->add_option("input", cmp_in, "Input file")->required();
    compress_cmd->add_option("--out", cmp_out, "Output audio file")->required();
    compress_cmd->add_option("--threshold-db", cmp_params.threshold_db, "Threshold (dBFS)")
        ->required();
    compress_cmd->add_option("--ratio", cmp_params.ratio, "Compression ratio (>= 1)")
        ->required();
    compress_cmd->add_option("--attack-ms", cmp_params.attack_ms, "Attack time");
    compress_cmd->add_option("--release-ms", cmp_params.release_ms, "Release time");
    compress_cmd->add_option("--makeup-db", cmp_params.makeup_db, "Makeup gain");
    compress_cmd->add_option("--detector", cmp_detector, "peak|rms")
        ->check(CLI::IsMember({"peak", "rms"}));
    cmp_flags.attach(compress_cmd);

    auto* segment_cmd =
        app.add_subcommand("segment", "Split an angular segment from the scene");
    std::filesystem::path seg_in, seg_out, seg_res;
    double seg_az = 0.0, seg_el = 0.0, seg_inner = 30.0, seg_outer = 60.0;
    InputConventionFlags seg_flags;
    segment_cmd->add_option("input", seg_in, "Input file")->required();
    segment_cmd->add_option("--az", seg_az, "Window center azimuth (deg)");
    segment_cmd->add_option("--el", seg_el, "Window center elevation (deg)");
    segment_cmd->add_option("--inner", seg_inner, "Unity-weight radius (deg)");
    segment_cmd->add_option("--outer", seg_outer, "Zero-weight radius (deg)");
    segment_cmd->add_option("--out-segment", seg_out, "Windowed segment output")->required();
    segment_cmd->add_option("--out-residual", seg_res, "Remainder output")->required();
    seg_flags.attach(segment_cmd);

    auto* subset_cmd =
        app.add_subcommand("subset-horizontal", "Keep the 2N+1 horizontal modes");
    std::filesystem::path sub_in, sub_out;
    InputConventionFlags sub_flags;
    subset_cmd->add_option("input", sub_in, "Input file")->required();
    subset_cmd->add_option("--out", sub_out, "Output WAV file")->required();
    sub_flags.attach(subset_cmd);

    auto* decode_cmd = app.add_subcommand("decode", "Decode to loudspeaker feeds");
    std::filesystem::path dec_in, dec_out, dec_layout;
    std::string dec_method = "projection", dec_weights = "none";
    int dec_order = -1;
    InputConventionFlags dec_flags;
    decode_cmd->add_option("input", dec_in, "Input file")->required();
    decode_cmd->add_option("--layout", dec_layout, "Speaker layout JSON")->required();
    decode_cmd->add_option("--method", dec_method, "projection|modematch|allrad")
        ->check(CLI::IsMember({"projection", "modematch", "allrad"}));
    decode_cmd->add_option("--weights", dec_weights, "none|maxre")
        ->check(CLI::IsMember({"none", "maxre"}));
    decode_cmd->add_option("--order", dec_order, "Decoder order (default: input order)");
    decode_cmd->add_option("--out", dec_out, "Speaker-feed WAV output")->required();
    dec_flags.attach(decode_cmd);

    auto* analyze_cmd =
        app.add_subcommand("analyze", "Energy-vector analysis of a decoder design");
    std::filesystem::path ana_layout;
    std::string ana_method = "modematch", ana_weights = "none";
    int ana_order = 1, ana_grid = 40;
    double ana_step = 5.0, ana_threshold = 30.0;
    bool ana_json = false;
    analyze_cmd->add_option("--layout", ana_layout, "Speaker layout JSON")->required();
    analyze_cmd->add_option("--method", ana_method, "projection|modematch|allrad")
        ->check(CLI::IsMember({"projection", "modematch", "allrad"}));
    analyze_cmd->add_option("--weights", ana_weights, "none|maxre")
        ->check(CLI::IsMember({"none", "maxre"}));
    analyze_cmd->add_option("--order", ana_order, "Decoder order")->required();
    analyze_cmd->add_option("--grid", ana_grid, "Positions per axis")
        ->check(CLI::Range(1, 200));
    analyze_cmd->add_option("--source-step", ana_step, "Source sweep step (deg)");
    analyze_cmd->add_option("--threshold", ana_threshold, "Sweet-area threshold (deg)");
    analyze_cmd->add_flag("--json", ana_json, "Machine-readable output");

    auto* binaural_cmd =
        app.add_subcommand("binaural", "Render to stereo over virtual loudspeakers");
    std::filesystem::path bin_in, bin_out, bin_hrirs;
    std::string bin_method = "projection", bin_weights = "none";
    double bin_yaw = 0.0, bin_pitch = 0.0, bin_roll = 0.0;
    InputConventionFlags bin_flags;
    binaural_cmd->add_option("input", bin_in, "Input file")->required();
    binaural_cmd->add_option("--hrirs", bin_hrirs, "HRIR manifest JSON")->required();
    binaural_cmd->add_option("--method", bin_method, "projection|modematch")
        ->check(CLI::IsMember({"projection", "modematch"}));
    binaural_cmd->add_option("--weights", bin_weights, "none|maxre")
        ->check(CLI::IsMember({"none", "maxre"}));
    binaural_cmd->add_option("--yaw", bin_yaw, "Head yaw (deg)");
    binaural_cmd->add_option("--pitch", bin_pitch, "Head pitch (deg)");
    binaural_cmd->add_option("--roll", bin_roll, "Head roll (deg)");
    binaural_cmd->add_option("--out", bin_out, "Stereo WAV output")->required();
    bin_flags.attach(binaural_cmd);

    auto* convert_cmd =
        app.add_subcommand("convert", "Change container and channel conventions");
    std::filesystem::path conv_in, conv_out;
    std::string conv_ordering, conv_normalization;
    InputConventionFlags conv_flags;
    convert_cmd->add_option("input", conv_in, "Input file")->required();
    convert_cmd->add_option("--out", conv_out, "Output file")->required();
    convert_cmd->add_option("--ordering", conv_ordering, "Target ordering (acn|fuma)")
        ->check(CLI::IsMember({"acn", "fuma"}));
    convert_cmd
        ->add_option("--normalization", conv_normalization,
                     "Target normalization (sn3d|n3d|fuma)")
        ->check(CLI::IsMember({"sn3d", "n3d", "fuma"}));
    conv_flags.attach(convert_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ambra: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*info) return run_info(info_in, info_flags, info_json);

        if (*encode) {
            const SceneDescription scene = load_scene(encode_scene);
            write_canonical(render_scene(scene), encode_out);
            return 0;
        }

        if (*encode_mic) {
            const MultichannelBuffer pcm = read_pcm(mic_in);
            TetraGeometry geometry;
            geometry.pattern_alpha = mic_pattern;
            write_canonical(tetra_a_to_b(pcm.samples, pcm.sample_rate, geometry), mic_out);
            return 0;
        }

        if (*mix_cmd) {
            AmbisonicBuffer acc = read_canonical(mix_in.front(), mix_flags);
            for (std::size_t i = 1; i < mix_in.size(); ++i)
                acc = mix(acc, read_canonical(mix_in[i], mix_flags));
            write_canonical(acc, mix_out);
            return 0;
        }

        if (*rotate_cmd) {
            const AmbisonicBuffer buffer = read_canonical(rot_in, rot_flags);
            const RotationSpec spec{rad(rot_yaw), rad(rot_pitch), rad(rot_roll)};
            write_canonical(rotate(buffer, spec), rot_out);
            return 0;
        }

        if (*mirror_cmd) {
            const AmbisonicBuffer buffer = read_canonical(mir_in, mir_flags);
            const MirrorPlane plane = mir_plane == "left-right" ? MirrorPlane::LeftRight
                                      : mir_plane == "front-back" ? MirrorPlane::FrontBack
                                                                  : MirrorPlane::TopBottom;
            write_canonical(mirror(buffer, plane), mir_out);
            return 0;
        }

        if (*dirgain_cmd) {
            const AmbisonicBuffer buffer = read_canonical(dg_in, dg_flags);
            const SpatialWindow window(Direction(rad(dg_az), rad(dg_el)), rad(dg_inner),
                                       rad(dg_outer));
            const double gain = std::pow(10.0, dg_gain_db / 20.0);
            const AmbisonicBuffer out = directional_gain(buffer, [&](const Direction& d) {
                return 1.0 + (gain - 1.0) * window.weight(d);
            });
            write_canonical(out, dg_out);
            return 0;
        }

        if (*warp_cmd) {
            const AmbisonicBuffer buffer = read_canonical(warp_in, warp_flags);
            const double target = rad(warp_towards);
            const double amount = warp_amount;
            const AmbisonicBuffer out = directional_warp(buffer, [&](double el) {
                return (1.0 - amount) * el + amount * target;
            });
            write_canonical(out, warp_out);
            return 0;
        }

        if (*compress_cmd) {
            const AmbisonicBuffer buffer = read_canonical(cmp_in, cmp_flags);
            cmp_params.detector =
                cmp_detector == "rms" ? DetectorType::Rms : DetectorType::Peak;
            write_canonical(compress(buffer, cmp_params), cmp_out);
            return 0;
        }

        if (*segment_cmd) {
            const AmbisonicBuffer buffer = read_canonical(seg_in, seg_flags);
            const SpatialWindow window(Direction(rad(seg_az), rad(seg_el)), rad(seg_inner),
                                       rad(seg_outer));
            const auto [segment, residual] = extract_segment(buffer, window);
            write_canonical(segment, seg_out);
            write_canonical(residual, seg_res);
            return 0;
        }

        if (*subset_cmd) {
            const AmbisonicBuffer buffer = read_canonical(sub_in, sub_flags);
            const HorizontalBuffer subset = horizontal_subset(buffer);
            MultichannelBuffer pcm;
            pcm.sample_rate = subset.sample_rate;
            pcm.samples = subset.samples;
            if (container_from_extension(sub_out) != Container::WAV)
                throw UnsupportedFormat("horizontal subsets are written as plain .wav");
            write_pcm_wav(pcm, sub_out);
            const json meta = {{"order", subset.order},
                               {"ordering", "acn"},
                               {"normalization", "sn3d"},
                               {"horizontal", true}};
            std::ofstream side(sidecar_path(sub_out), std::ios::trunc);
            side << meta.dump(2) << "\n";
            return 0;
        }

        if (*decode_cmd) {
            const AmbisonicBuffer buffer = read_canonical(dec_in, dec_flags);
            const SpeakerLayout layout = load_layout(dec_layout);
            const int order = dec_order < 0 ? buffer.order() : dec_order;
            DecoderOptions options;
            options.weights = weights_from_name(dec_weights);
            const DecoderMatrix decoder =
                build_decoder(layout, order, method_from_name(dec_method), options);
            print_warnings(decoder);
            MultichannelBuffer feeds;
            feeds.sample_rate = buffer.sample_rate();
            feeds.samples = apply_decoder(buffer, decoder);
            write_pcm_wav(feeds, dec_out);
            return 0;
        }

        if (*analyze_cmd)
            return run_analyze(ana_layout, ana_method, ana_weights, ana_order, ana_grid,
                               ana_step, ana_threshold, ana_json);

        if (*binaural_cmd) {
            const AmbisonicBuffer buffer = read_canonical(bin_in, bin_flags);
            const HrirSet hrirs = load_hrir_set(bin_hrirs);
            BinauralConfig config;
            config.method = method_from_name(bin_method);
            config.weights = weights_from_name(bin_weights);
            config.head_orientation =
                RotationSpec{rad(bin_yaw), rad(bin_pitch), rad(bin_roll)};
            MultichannelBuffer stereo;
            stereo.sample_rate = buffer.sample_rate();
            stereo.samples = binaural_render(buffer, hrirs, config);
            write_pcm_wav(stereo, bin_out);
            return 0;
        }

        if (*convert_cmd) {
            const AmbisonicBuffer buffer = read_canonical(conv_in, conv_flags);
            FormatMeta target = meta_from_extension(conv_out, buffer.order());
            if (target.container == Container::WAV) {
                if (conv_ordering == "fuma" ||
                    (conv_ordering.empty() && conv_normalization == "fuma")) {
                    target.convention = Convention::fuma();
                } else if (conv_normalization == "n3d") {
                    target.convention.normalization = Normalization::N3D;
                } else {
                    target.convention.normalization = Normalization::SN3D;
                }
            } else if (!conv_ordering.empty() || !conv_normalization.empty()) {
                throw InvalidArgument(std::string("the ") + to_string(target.container) +
                                      " container fixes its convention; drop the flags");
            }
            write_audio(buffer, conv_out, target);
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "ambra: " << e.what() << "\n";
        return kExitFormat;
    } catch (const MalformedSignal& e) {
        std::cerr << "ambra: " << e.what() << "\n";
        return kExitFormat;
    } catch (const UnsupportedFormat& e) {
        std::cerr << "ambra: " << e.what() << "\n";
        return kExitFormat;
    } catch (const Error& e) {
        std::cerr << "ambra: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "ambra: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
