#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ambra/buffer.hpp"
#include "ambra/transform.hpp"

namespace ambra {

enum class LayoutGeometry { Spherical3D, Circular2D };

struct Speaker {
    Direction direction;
    double radius = 1.0;  // meters
};

struct SpeakerLayout {
    LayoutGeometry geometry = LayoutGeometry::Spherical3D;
    std::vector<Speaker> speakers;

    // >= 1 speaker, directions pairwise separated by more than 0.5 degrees.
    void validate() const;
    double mean_radius() const;
};

// Layout file: JSON {geometry: "3d"|"2d", speakers: [{azimuth_deg,
// elevation_deg, radius_m?}]}.
SpeakerLayout load_layout(const std::filesystem::path& path);

enum class DecoderMethod { Projection, ModeMatching, AllRad };
enum class OrderWeighting { None, MaxRe };

const char* to_string(DecoderMethod method);

struct DecoderOptions {
    OrderWeighting weights = OrderWeighting::None;
    double svd_cutoff = 1e-4;  // relative singular-value cutoff (mode matching)
};

// Per-order gains g_n = P_n(cos(137.9 deg / (order + 1.51))); g_0 = 1.
std::vector<double> max_re_weights(int order);

struct DecoderMatrix {
    // Applied directly to canonical acn/sn3d channels (or to the
    // horizontal |m| = n subset when horizontal_only is set).
    Eigen::MatrixXd matrix;  // speakers x columns
    int order = 0;
    DecoderMethod method = DecoderMethod::Projection;
    std::vector<double> order_weights;  // the folded-in per-order gains
    bool horizontal_only = false;
    std::vector<std::string> warnings;
};

DecoderMatrix build_decoder(const SpeakerLayout& layout, int order, DecoderMethod method,
                            const DecoderOptions& options = {});

// feeds = matrix * channels per frame; buffer orders above the decoder
// order are truncated.
SampleMatrix apply_decoder(const AmbisonicBuffer& buffer, const DecoderMatrix& decoder);

struct AnalysisEntry {
    std::array<double, 3> r_v{};  // velocity vector
    std::array<double, 3> r_e{};  // energy vector
    double error_deg = 0.0;       // angle(rE, source seen from the position)
};

// Energy-vector analysis over listening positions. Virtual sources sit on
// the array radius; per-speaker amplitudes decay with 1/distance.
struct AnalysisReport {
    std::vector<Direction> source_directions;
    std::vector<std::array<double, 3>> positions;  // meters, inside the hull
    double array_radius = 1.0;
    std::vector<std::vector<AnalysisEntry>> per_position;  // [position][source]
    std::vector<double> mean_error_deg;                    // [position]
};

AnalysisReport analyze_decoder(const DecoderMatrix& decoder, const SpeakerLayout& layout,
                               std::span<const Direction> source_directions,
                               std::span<const std::array<double, 3>> positions);

// rV/rE for explicit per-speaker gains at one listening position. The error
// is measured against a virtual source on the array radius in `reference`;
// a cancelled energy vector (|rE| ~ 0) reports the 180-degree worst case.
AnalysisEntry energy_vectors(const SpeakerLayout& layout, std::span<const double> gains,
                             const std::array<double, 3>& position,
                             const Direction& reference);

// Largest radius fraction r such that every analyzed position with
// |p| <= r * array_radius keeps its mean error below the threshold.
double sweet_area_radius(const AnalysisReport& report, double threshold_deg = 30.0);

}  // namespace ambra
