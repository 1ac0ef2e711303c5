#pragma once

#include <functional>
#include <utility>

#include "ambra/buffer.hpp"
#include "ambra/quadrature.hpp"

namespace ambra {

enum class MirrorPlane {
    LeftRight,  // y -> -y
    FrontBack,  // x -> -x
    TopBottom,  // z -> -z
};

// Per-channel sign flips derived from the parity of the real harmonics.
AmbisonicBuffer mirror(const AmbisonicBuffer& buffer, MirrorPlane plane);

// Angular window: unity inside inner_radius, zero beyond outer_radius,
// raised-cosine edge in between.
struct SpatialWindow {
    Direction center;
    double inner_radius = 0.0;
    double outer_radius = kPi;

    SpatialWindow() = default;
    SpatialWindow(Direction center_, double inner_rad, double outer_rad);

    double weight(const Direction& dir) const;
};

// Direction-dependent gain. The scene is decoded onto the grid (plane-wave
// domain), multiplied by the per-direction weights, and re-encoded at the
// input order; a unit weight is an exact identity on exact grids.
AmbisonicBuffer directional_gain(const AmbisonicBuffer& buffer,
                                 const QuadratureGrid& grid,
                                 std::span<const double> weights);

// Convenience overload sampling `weight` on a grid of exactness
// 2*order + weight_degree_budget.
AmbisonicBuffer directional_gain(const AmbisonicBuffer& buffer,
                                 const std::function<double(const Direction&)>& weight,
                                 int weight_degree_budget = 8);

// Elevation warp: content at elevation el moves to elevation_map(el). The
// map must be strictly monotone on [-pi/2, pi/2]; directions outside its
// image end up silent (no area compensation is applied). The identity map
// yields the identity.
AmbisonicBuffer directional_warp(const AmbisonicBuffer& buffer,
                                 const std::function<double(double)>& elevation_map,
                                 int weight_degree_budget = 8);

// Uniform (all-channel) processing; both forms keep the frame count.
AmbisonicBuffer apply_gain_envelope(const AmbisonicBuffer& buffer,
                                    std::span<const double> envelope);
AmbisonicBuffer apply_fir(const AmbisonicBuffer& buffer, std::span<const double> taps);

enum class DetectorType { Peak, Rms };

struct CompressorParams {
    double threshold_db = -20.0;  // dBFS
    double ratio = 1.0;           // >= 1
    double attack_ms = 5.0;
    double release_ms = 50.0;
    double makeup_db = 0.0;
    DetectorType detector = DetectorType::Peak;
};

// Wideband compression keyed on the omni (ACN 0) channel: one gain
// sequence, applied identically to every channel, so inter-channel sample
// ratios are untouched.
AmbisonicBuffer compress(const AmbisonicBuffer& buffer, const CompressorParams& params);

// Splits the scene into the windowed segment and the exact remainder;
// mix(segment, residual) reproduces the input.
std::pair<AmbisonicBuffer, AmbisonicBuffer> extract_segment(const AmbisonicBuffer& buffer,
                                                            const SpatialWindow& window);

// Horizontal-only reduction: the 2N+1 channels with |m| = n, in ACN order.
struct HorizontalBuffer {
    double sample_rate = 0.0;
    int order = 0;
    SampleMatrix samples;
};

std::vector<int> horizontal_acn_indices(int order);
HorizontalBuffer horizontal_subset(const AmbisonicBuffer& buffer);

}  // namespace ambra
