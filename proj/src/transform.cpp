#include "ambra/transform.hpp"

#include <algorithm>
#include <cmath>

namespace ambra {

namespace {

double mirror_sign(const ModeIndex& mode, MirrorPlane plane) {
    const int am = std::abs(mode.m);
    switch (plane) {
        case MirrorPlane::LeftRight:
            return mode.m < 0 ? -1.0 : 1.0;
        case MirrorPlane::TopBottom:
            return (mode.n + am) % 2 == 1 ? -1.0 : 1.0;
        case MirrorPlane::FrontBack:
            if (mode.m >= 0) return mode.m % 2 == 1 ? -1.0 : 1.0;
            return am % 2 == 0 ? -1.0 : 1.0;
    }
    return 1.0;
}

}  // namespace

AmbisonicBuffer mirror(const AmbisonicBuffer& buffer, MirrorPlane plane) {
    buffer.require_canonical("mirror");
    AmbisonicBuffer out = buffer;
    for (std::size_t ch = 0; ch < buffer.channels(); ++ch) {
        if (mirror_sign(mode_from_acn(static_cast<int>(ch)), plane) < 0.0) {
            auto span = out.channel(ch);
            for (double& v : span) v = -v;
        }
    }
    return out;
}

SpatialWindow::SpatialWindow(Direction center_, double inner_rad, double outer_rad)
    : center(center_), inner_radius(inner_rad), outer_radius(outer_rad) {
    if (!(0.0 <= inner_radius && inner_radius <= outer_radius && outer_radius <= kPi))
        throw InvalidArgument("window radii must satisfy 0 <= inner <= outer <= pi");
}

double SpatialWindow::weight(const Direction& dir) const {
    const double gamma = center.angle_to(dir);
    if (gamma <= inner_radius) return 1.0;
    if (gamma >= outer_radius) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (gamma - inner_radius) /
                                 (outer_radius - inner_radius)));
}

namespace {

// K x K operator taking canonical channels to canonical channels:
// decode to the grid with the energy-orthonormal (N3D) beams, scale each
// direction, re-encode. `source_dirs` lets the warp resample elsewhere.
std::vector<double> grid_operator(int order, const QuadratureGrid& grid,
                                  std::span<const double> weights,
                                  const std::vector<Direction>* source_dirs) {
    const int channels = channel_count(order);
    std::vector<double> op(static_cast<std::size_t>(channels) * channels, 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::vector<double> y_out =
            sh_vector(grid.directions[g], order, Normalization::N3D);
        const std::vector<double> y_in =
            source_dirs ? sh_vector((*source_dirs)[g], order, Normalization::N3D) : y_out;
        const double scale = weights[g] * grid.weights[g] / kFourPi;
        for (int j = 0; j < channels; ++j) {
            const double row = scale * y_out[static_cast<std::size_t>(j)];
            if (row == 0.0) continue;
            double* dst = op.data() + static_cast<std::size_t>(j) * channels;
            for (int k = 0; k < channels; ++k)
                dst[k] += row * y_in[static_cast<std::size_t>(k)];
        }
    }
    // Fold the sn3d <-> n3d conversions into the operator.
    for (int j = 0; j < channels; ++j) {
        const double cj = std::sqrt(2.0 * mode_from_acn(j).n + 1.0);
        for (int k = 0; k < channels; ++k) {
            const double ck = std::sqrt(2.0 * mode_from_acn(k).n + 1.0);
            op[static_cast<std::size_t>(j) * channels + static_cast<std::size_t>(k)] *=
                ck / cj;
        }
    }
    return op;
}

AmbisonicBuffer apply_channel_operator(const AmbisonicBuffer& buffer,
                                       std::span<const double> op) {
    const std::size_t channels = buffer.channels();
    const std::size_t frames = buffer.frames();
    AmbisonicBuffer out(buffer.sample_rate(), buffer.order(), buffer.convention(), frames);
    for (std::size_t j = 0; j < channels; ++j) {
        auto dst = out.channel(j);
        for (std::size_t k = 0; k < channels; ++k) {
            const double g = op[j * channels + k];
            if (g == 0.0) continue;
            const auto src = buffer.channel(k);
            for (std::size_t i = 0; i < frames; ++i) dst[i] += g * src[i];
        }
    }
    return out;
}

}  // namespace

AmbisonicBuffer directional_gain(const AmbisonicBuffer& buffer, const QuadratureGrid& grid,
                                 std::span<const double> weights) {
    buffer.require_canonical("directional_gain");
    if (weights.size() != grid.size())
        throw InvalidArgument("need one weight per grid direction");
    if (grid.exactness_degree < 2 * buffer.order())
        throw InvalidArgument("grid exactness " + std::to_string(grid.exactness_degree) +
                              " is too coarse for order " + std::to_string(buffer.order()));
    return apply_channel_operator(buffer,
                                  grid_operator(buffer.order(), grid, weights, nullptr));
}

AmbisonicBuffer directional_gain(const AmbisonicBuffer& buffer,
                                 const std::function<double(const Direction&)>& weight,
                                 int weight_degree_budget) {
    const QuadratureGrid grid = quadrature_grid(2 * buffer.order() + weight_degree_budget);
    std::vector<double> weights(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) weights[g] = weight(grid.directions[g]);
    return directional_gain(buffer, grid, weights);
}

AmbisonicBuffer directional_warp(const AmbisonicBuffer& buffer,
                                 const std::function<double(double)>& elevation_map,
                                 int weight_degree_budget) {
    buffer.require_canonical("directional_warp");

    constexpr int kProbes = 64;
    const double lo_image = elevation_map(-kPi / 2.0);
    const double hi_image = elevation_map(kPi / 2.0);
    const bool increasing = hi_image > lo_image;
    double prev = lo_image;
    for (int i = 1; i <= kProbes; ++i) {
        const double cur = elevation_map(-kPi / 2.0 + kPi * i / kProbes);
        if (increasing ? cur <= prev : cur >= prev)
            throw InvalidArgument("elevation map is not strictly monotone");
        prev = cur;
    }

    // The grid direction at elevation el shows the content that the map
    // moved there, i.e. the input at map^-1(el); outside the image there
    // is nothing to show.
    auto invert = [&](double el) {
        double lo = -kPi / 2.0, hi = kPi / 2.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((elevation_map(mid) < el) == increasing) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    const QuadratureGrid grid = quadrature_grid(2 * buffer.order() + weight_degree_budget);
    std::vector<double> weights(grid.size(), 1.0);
    std::vector<Direction> sources = grid.directions;
    const double image_min = std::min(lo_image, hi_image);
    const double image_max = std::max(lo_image, hi_image);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double el = grid.directions[g].elevation;
        if (el < image_min || el > image_max) {
            weights[g] = 0.0;
            continue;
        }
        sources[g] = Direction(grid.directions[g].azimuth, invert(el));
    }
    return apply_channel_operator(
        buffer, grid_operator(buffer.order(), grid, weights, &sources));
}

AmbisonicBuffer apply_gain_envelope(const AmbisonicBuffer& buffer,
                                    std::span<const double> envelope) {
    if (envelope.size() != 1 && envelope.size() != buffer.frames())
        throw InvalidArgument("envelope must hold one gain or one gain per frame");
    for (const double g : envelope)
        if (!std::isfinite(g)) throw InvalidArgument("envelope gains must be finite");

    AmbisonicBuffer out = buffer;
    for (std::size_t ch = 0; ch < out.channels(); ++ch) {
        auto span = out.channel(ch);
        if (envelope.size() == 1) {
            for (double& v : span) v *= envelope[0];
        } else {
            for (std::size_t i = 0; i < span.size(); ++i) span[i] *= envelope[i];
        }
    }
    return out;
}

AmbisonicBuffer apply_fir(const AmbisonicBuffer& buffer, std::span<const double> taps) {
    if (taps.empty()) throw InvalidArgument("FIR kernel must not be empty");
    for (const double t : taps)
        if (!std::isfinite(t)) throw InvalidArgument("FIR taps must be finite");

    const std::size_t frames = buffer.frames();
    AmbisonicBuffer out(buffer.sample_rate(), buffer.order(), buffer.convention(), frames);
    for (std::size_t ch = 0; ch < buffer.channels(); ++ch) {
        const auto src = buffer.channel(ch);
        auto dst = out.channel(ch);
        for (std::size_t i = 0; i < frames; ++i) {
            double acc = 0.0;
            const std::size_t kmax = std::min(taps.size() - 1, i);
            for (std::size_t k = 0; k <= kmax; ++k) acc += taps[k] * src[i - k];
            dst[i] = acc;
        }
    }
    return out;
}

namespace {

std::vector<double> detector_level(std::span<const double> key, double sample_rate,
                                   DetectorType detector) {
    std::vector<double> level(key.size());
    if (detector == DetectorType::Peak) {
        for (std::size_t i = 0; i < key.size(); ++i) level[i] = std::abs(key[i]);
        return level;
    }
    // RMS over a trailing 3 ms window.
    const std::size_t window =
        std::max<std::size_t>(1, static_cast<std::size_t>(0.003 * sample_rate));
    double acc = 0.0;
    for (std::size_t i = 0; i < key.size(); ++i) {
        acc += key[i] * key[i];
        if (i >= window) acc -= key[i - window] * key[i - window];
        level[i] = std::sqrt(std::max(acc, 0.0) / static_cast<double>(std::min(i + 1, window)));
    }
    return level;
}

}  // namespace

AmbisonicBuffer compress(const AmbisonicBuffer& buffer, const CompressorParams& params) {
    buffer.require_canonical("compress");
    if (params.ratio < 1.0) throw InvalidArgument("compressor ratio must be >= 1");
    if (!(params.attack_ms > 0.0) || !(params.release_ms > 0.0))
        throw InvalidArgument("attack and release must be positive");

    const std::size_t frames = buffer.frames();
    const std::vector<double> level =
        detector_level(buffer.channel(0), buffer.sample_rate(), params.detector);

    // Attack/release one-pole on the detector level (rising edges follow
    // the attack constant, falling edges the release), then the static
    // curve turns the envelope into the shared gain sequence.
    const double slope = 1.0 - 1.0 / params.ratio;
    const double att =
        std::exp(-1.0 / (params.attack_ms * 0.001 * buffer.sample_rate()));
    const double rel =
        std::exp(-1.0 / (params.release_ms * 0.001 * buffer.sample_rate()));

    std::vector<double> gain(frames);
    double envelope = 0.0;
    for (std::size_t i = 0; i < frames; ++i) {
        const double coef = level[i] > envelope ? att : rel;
        envelope = coef * envelope + (1.0 - coef) * level[i];
        const double env_db = 20.0 * std::log10(std::max(envelope, 1e-30));
        const double gain_db =
            std::min(0.0, (params.threshold_db - env_db) * slope) + params.makeup_db;
        gain[i] = std::pow(10.0, gain_db / 20.0);
    }
    return apply_gain_envelope(buffer, gain);
}

std::pair<AmbisonicBuffer, AmbisonicBuffer> extract_segment(const AmbisonicBuffer& buffer,
                                                            const SpatialWindow& window) {
    AmbisonicBuffer segment = directional_gain(
        buffer, [&window](const Direction& d) { return window.weight(d); });
    AmbisonicBuffer residual = buffer;
    for (std::size_t ch = 0; ch < buffer.channels(); ++ch) {
        auto res = residual.channel(ch);
        const auto seg = segment.channel(ch);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] -= seg[i];
    }
    return {std::move(segment), std::move(residual)};
}

std::vector<int> horizontal_acn_indices(int order) {
    std::vector<int> indices;
    indices.reserve(static_cast<std::size_t>(2 * order + 1));
    for (int n = 0; n <= order; ++n) {
        if (n > 0) indices.push_back(acn_index(ModeIndex(n, -n)));
        indices.push_back(acn_index(ModeIndex(n, n)));
    }
    std::sort(indices.begin(), indices.end());
    return indices;
}

HorizontalBuffer horizontal_subset(const AmbisonicBuffer& buffer) {
    buffer.require_canonical("horizontal_subset");
    const std::vector<int> keep = horizontal_acn_indices(buffer.order());
    HorizontalBuffer out;
    out.sample_rate = buffer.sample_rate();
    out.order = buffer.order();
    out.samples = SampleMatrix(keep.size(), buffer.frames());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto src = buffer.channel(static_cast<std::size_t>(keep[i]));
        auto dst = out.samples.channel(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

}  // namespace ambra
