#include "ambra/binaural.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ambra/audio_file.hpp"

namespace ambra {

void HrirSet::validate() const {
    if (entries.size() < 4)
        throw InvalidArgument("an HRIR set needs at least 4 entries, got " +
                              std::to_string(entries.size()));
    if (!(sample_rate > 0.0)) throw InvalidArgument("HRIR sample rate must be positive");
    for (const HrirEntry& e : entries)
        if (e.left.size() != length || e.right.size() != length)
            throw InvalidArgument("HRIR lengths are not uniform");
    constexpr double kMinSeparation = 0.5 * kPi / 180.0;
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j)
            if (entries[i].direction.angle_to(entries[j].direction) <= kMinSeparation)
                throw InvalidArgument("duplicate HRIR direction at entries " +
                                      std::to_string(i) + " and " + std::to_string(j));
}

HrirSet load_hrir_set(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open HRIR manifest " + manifest.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("HRIR manifest " + manifest.string() + ": " + e.what());
    }

    HrirSet set;
    try {
        set.sample_rate = j.at("sample_rate").get<double>();
        if (j.at("entries").empty())
            throw InvalidArgument("HRIR manifest lists no entries: " + manifest.string());
        for (const auto& entry : j.at("entries")) {
            HrirEntry e;
            e.direction = Direction(entry.at("azimuth_deg").get<double>() * kPi / 180.0,
                                    entry.at("elevation_deg").get<double>() * kPi / 180.0);
            const std::filesystem::path file =
                manifest.parent_path() / entry.at("file").get<std::string>();
            const MultichannelBuffer pcm = read_pcm(file);
            if (pcm.samples.channels() != 2)
                throw InvalidArgument("HRIR file " + file.string() + " must be stereo, has " +
                                      std::to_string(pcm.samples.channels()) + " channels");
            if (pcm.sample_rate != set.sample_rate)
                throw InvalidArgument("HRIR sample rate mismatch: manifest says " +
                                      std::to_string(set.sample_rate) + " Hz but " +
                                      file.string() + " has " +
                                      std::to_string(pcm.sample_rate) + " Hz");
            const auto l = pcm.samples.channel(0);
            const auto r = pcm.samples.channel(1);
            e.left.assign(l.begin(), l.end());
            e.right.assign(r.begin(), r.end());
            set.length = std::max(set.length, e.left.size());
            set.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("HRIR manifest " + manifest.string() + ": " + e.what());
    }
    for (HrirEntry& e : set.entries) {  // uniform length by zero padding
        e.left.resize(set.length, 0.0);
        e.right.resize(set.length, 0.0);
    }
    set.validate();
    return set;
}

namespace {

void accumulate_convolution(std::span<double> out, std::span<const double> feed,
                            std::span<const double> ir) {
    for (std::size_t i = 0; i < feed.size(); ++i) {
        const double x = feed[i];
        if (x == 0.0) continue;
        for (std::size_t k = 0; k < ir.size(); ++k) out[i + k] += x * ir[k];
    }
}

}  // namespace

SampleMatrix binaural_render(const AmbisonicBuffer& buffer, const HrirSet& hrirs,
                             const BinauralConfig& config) {
    buffer.require_canonical("binaural_render");
    hrirs.validate();
    if (buffer.sample_rate() != hrirs.sample_rate)
        throw InvalidArgument("buffer sample rate " + std::to_string(buffer.sample_rate()) +
                              " does not match the HRIR rate " +
                              std::to_string(hrirs.sample_rate));

    // The HRIR set acts as a virtual loudspeaker array.
    SpeakerLayout layout;
    layout.geometry = LayoutGeometry::Spherical3D;
    for (const HrirEntry& e : hrirs.entries) layout.speakers.push_back({e.direction, 1.0});

    const int order = buffer.order();
    if (config.method == DecoderMethod::ModeMatching &&
        static_cast<std::size_t>(channel_count(order)) > hrirs.entries.size())
        throw IllConditionedLayout("mode matching at order " + std::to_string(order) +
                                   " needs at least " + std::to_string(channel_count(order)) +
                                   " HRIR directions, got " +
                                   std::to_string(hrirs.entries.size()));

    DecoderOptions options;
    options.weights = config.weights;
    const DecoderMatrix decoder = build_decoder(layout, order, config.method, options);

    // Turning the head by R is the same as counter-rotating the scene.
    const AmbisonicBuffer oriented =
        rotate(buffer, transpose(config.head_orientation.matrix()));
    const SampleMatrix feeds = apply_decoder(oriented, decoder);

    const std::size_t out_frames = buffer.frames() + hrirs.length - 1;
    SampleMatrix out(2, buffer.frames() == 0 ? 0 : out_frames);
    if (buffer.frames() == 0) return out;
    for (std::size_t v = 0; v < hrirs.entries.size(); ++v) {
        accumulate_convolution(out.channel(0), feeds.channel(v), hrirs.entries[v].left);
        accumulate_convolution(out.channel(1), feeds.channel(v), hrirs.entries[v].right);
    }
    return out;
}

}  // namespace ambra
