#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ambra/buffer.hpp"

namespace ambra {

// A virtual plane-wave source: mono audio arriving from one direction.
struct Source {
    std::vector<double> audio;
    double sample_rate = 0.0;
    Direction direction;
    double gain = 1.0;  // linear
};

struct SceneDescription {
    int order = 0;
    double sample_rate = 0.0;
    std::vector<Source> sources;
};

// Tetrahedral microphone geometry: four outward cardioid-like capsules at
// the FLU / FRD / BLD / BRU corners, gain law alpha + (1-alpha)*cos(angle).
struct TetraGeometry {
    double pattern_alpha = 0.5;

    static constexpr std::array<std::array<double, 3>, 4> axes() {
        constexpr double k = 0.57735026918962576451;  // 1/sqrt(3)
        return {{{k, k, k}, {k, -k, -k}, {-k, k, -k}, {-k, -k, k}}};
    }
};

// Imposes the spherical-harmonic directivities onto the signal:
// channel k = signal * Y_k(dir). Output is canonical acn/sn3d.
AmbisonicBuffer encode_source(std::span<const double> signal, double sample_rate,
                              const Direction& dir, int order);

// Channel-wise sum; the shorter input is zero padded, the lower order is
// promoted by treating its missing channels as silent.
AmbisonicBuffer mix(const AmbisonicBuffer& a, const AmbisonicBuffer& b);

// Anechoic scene render: sum of the encoded sources at the scene order.
AmbisonicBuffer render_scene(const SceneDescription& scene);

// A-format (FLU, FRD, BLD, BRU) to 1st-order B-format, scaled so that a
// plane wave through the coincident capsule model matches encode_source.
AmbisonicBuffer tetra_a_to_b(const SampleMatrix& a_format, double sample_rate,
                             const TetraGeometry& geometry = {});

// Scene file: JSON {order, sample_rate, sources: [{audio, azimuth_deg,
// elevation_deg, gain_db}]}; audio paths resolve relative to the file.
SceneDescription load_scene(const std::filesystem::path& path);

}  // namespace ambra
