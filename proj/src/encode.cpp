#include "ambra/encode.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ambra/audio_file.hpp"

namespace ambra {

AmbisonicBuffer encode_source(std::span<const double> signal, double sample_rate,
                              const Direction& dir, int order) {
    const std::vector<double> y = sh_vector(dir, order, Normalization::SN3D);
    AmbisonicBuffer out(sample_rate, order, Convention::canonical(), signal.size());
    for (std::size_t ch = 0; ch < y.size(); ++ch) {
        auto dst = out.channel(ch);
        const double g = y[ch];
        for (std::size_t i = 0; i < signal.size(); ++i) dst[i] = g * signal[i];
    }
    return out;
}

AmbisonicBuffer mix(const AmbisonicBuffer& a, const AmbisonicBuffer& b) {
    if (a.sample_rate() != b.sample_rate())
        throw InvalidArgument("cannot mix signals with different sample rates (" +
                              std::to_string(a.sample_rate()) + " vs " +
                              std::to_string(b.sample_rate()) + " Hz)");
    a.require_canonical("mix");
    b.require_canonical("mix");

    const AmbisonicBuffer& lo = a.order() <= b.order() ? a : b;
    const AmbisonicBuffer& hi = a.order() <= b.order() ? b : a;
    const std::size_t frames = std::max(a.frames(), b.frames());

    AmbisonicBuffer out(a.sample_rate(), hi.order(), Convention::canonical(), frames);
    for (std::size_t ch = 0; ch < hi.channels(); ++ch) {
        auto dst = out.channel(ch);
        const auto src = hi.channel(ch);
        std::copy(src.begin(), src.end(), dst.begin());
        if (ch < lo.channels()) {
            const auto add = lo.channel(ch);
            for (std::size_t i = 0; i < add.size(); ++i) dst[i] += add[i];
        }
    }
    return out;
}

AmbisonicBuffer render_scene(const SceneDescription& scene) {
    std::size_t frames = 0;
    for (const Source& s : scene.sources) {
        if (s.sample_rate != scene.sample_rate)
            throw InvalidArgument("source sample rate " + std::to_string(s.sample_rate) +
                                  " does not match the scene rate " +
                                  std::to_string(scene.sample_rate) +
                                  " (resampling is not supported)");
        if (!(s.gain >= 0.0) || !std::isfinite(s.gain))
            throw InvalidArgument("source gain must be finite and >= 0");
        frames = std::max(frames, s.audio.size());
    }

    AmbisonicBuffer out(scene.sample_rate, scene.order, Convention::canonical(), frames);
    // Fixed summation order keeps renders bit-reproducible.
    for (const Source& s : scene.sources) {
        std::vector<double> scaled(s.audio.size());
        for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = s.gain * s.audio[i];
        out = mix(out, encode_source(scaled, s.sample_rate, s.direction, scene.order));
    }
    return out;
}

AmbisonicBuffer tetra_a_to_b(const SampleMatrix& a_format, double sample_rate,
                             const TetraGeometry& geometry) {
    if (a_format.channels() != 4)
        throw InvalidArgument("A-format input must have exactly 4 channels, got " +
                              std::to_string(a_format.channels()));
    const double alpha = geometry.pattern_alpha;
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidArgument("capsule pattern alpha must lie in [0, 1]");
    if (alpha == 0.0 || alpha == 1.0)
        throw InvalidArgument(
            "degenerate capsule pattern: alpha 0 or 1 leaves B-format components "
            "unrecoverable");

    // For a plane wave from d, capsule i yields alpha + (1-alpha) * (axis_i . d),
    // so the sums below give 4*alpha*W and 4*(1-alpha)/sqrt(3) * {X,Y,Z}.
    const double w_scale = 1.0 / (4.0 * alpha);
    const double xyz_scale = std::sqrt(3.0) / (4.0 * (1.0 - alpha));

    const std::size_t frames = a_format.frames();
    AmbisonicBuffer out(sample_rate, 1, Convention::canonical(), frames);
    const auto flu = a_format.channel(0);
    const auto frd = a_format.channel(1);
    const auto bld = a_format.channel(2);
    const auto bru = a_format.channel(3);
    auto w = out.channel(0);
    auto y = out.channel(1);
    auto z = out.channel(2);
    auto x = out.channel(3);
    for (std::size_t i = 0; i < frames; ++i) {
        w[i] = w_scale * (flu[i] + frd[i] + bld[i] + bru[i]);
        x[i] = xyz_scale * (flu[i] + frd[i] - bld[i] - bru[i]);
        y[i] = xyz_scale * (flu[i] - frd[i] + bld[i] - bru[i]);
        z[i] = xyz_scale * (flu[i] - frd[i] - bld[i] + bru[i]);
    }
    return out;
}

SceneDescription load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scene file " + path.string() + ": " + e.what());
    }

    SceneDescription scene;
    try {
        scene.order = j.at("order").get<int>();
        scene.sample_rate = j.at("sample_rate").get<double>();
        for (const auto& src : j.at("sources")) {
            Source s;
            const std::filesystem::path audio =
                path.parent_path() / src.at("audio").get<std::string>();
            MultichannelBuffer pcm = read_pcm(audio);
            if (pcm.samples.channels() != 1)
                throw InvalidArgument("scene source " + audio.string() +
                                      " must be mono, has " +
                                      std::to_string(pcm.samples.channels()) + " channels");
            const auto mono = pcm.samples.channel(0);
            s.audio.assign(mono.begin(), mono.end());
            s.sample_rate = pcm.sample_rate;
            s.direction = Direction(src.at("azimuth_deg").get<double>() * kPi / 180.0,
                                    src.at("elevation_deg").get<double>() * kPi / 180.0);
            s.gain = std::pow(10.0, src.value("gain_db", 0.0) / 20.0);
            scene.sources.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("scene file " + path.string() + ": " + e.what());
    }
    if (scene.order < 0) throw InvalidArgument("scene order must be >= 0");
    return scene;
}

}  // namespace ambra
