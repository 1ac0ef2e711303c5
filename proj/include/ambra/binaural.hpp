#pragma once

#include <filesystem>
#include <vector>

#include "ambra/decode.hpp"
#include "ambra/rotation.hpp"

namespace ambra {

// Measured (or synthetic) head-related impulse responses: each entry is
// one virtual loudspeaker position with its left/right responses.
struct HrirEntry {
    Direction direction;
    std::vector<double> left;
    std::vector<double> right;
};

struct HrirSet {
    double sample_rate = 0.0;
    std::size_t length = 0;  // uniform, zero-padded to the longest response
    std::vector<HrirEntry> entries;

    // >= 4 entries, uniform length, pairwise-distinct directions.
    void validate() const;
};

struct BinauralConfig {
    DecoderMethod method = DecoderMethod::Projection;  // or ModeMatching
    OrderWeighting weights = OrderWeighting::None;
    RotationSpec head_orientation{};
};

// Manifest: JSON {sample_rate, entries: [{azimuth_deg, elevation_deg,
// file}]}; files are stereo WAVs relative to the manifest.
HrirSet load_hrir_set(const std::filesystem::path& manifest);

// Virtual-loudspeaker rendering: pre-rotate the scene by the inverse head
// orientation, decode onto the HRIR directions, convolve each feed with
// its responses, and sum per ear. Output is 2 x (frames + length - 1).
SampleMatrix binaural_render(const AmbisonicBuffer& buffer, const HrirSet& hrirs,
                             const BinauralConfig& config = {});

}  // namespace ambra
