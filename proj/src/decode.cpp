#include "ambra/decode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "vbap.hpp"

namespace ambra {

const char* to_string(DecoderMethod method) {
    switch (method) {
        case DecoderMethod::Projection: return "projection";
        case DecoderMethod::ModeMatching: return "mode-matching";
        case DecoderMethod::AllRad: return "allrad";
    }
    return "?";
}

void SpeakerLayout::validate() const {
    if (speakers.empty()) throw InvalidArgument("a layout needs at least one speaker");
    constexpr double kMinSeparation = 0.5 * kPi / 180.0;
    for (std::size_t i = 0; i < speakers.size(); ++i) {
        if (!(speakers[i].radius > 0.0))
            throw InvalidArgument("speaker radius must be positive");
        for (std::size_t j = i + 1; j < speakers.size(); ++j)
            if (speakers[i].direction.angle_to(speakers[j].direction) <= kMinSeparation)
                throw InvalidArgument("speakers " + std::to_string(i) + " and " +
                                      std::to_string(j) +
                                      " are closer than 0.5 degrees apart");
    }
}

double SpeakerLayout::mean_radius() const {
    double sum = 0.0;
    for (const Speaker& s : speakers) sum += s.radius;
    return sum / static_cast<double>(speakers.size());
}

SpeakerLayout load_layout(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open layout file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("layout file " + path.string() + ": " + e.what());
    }

    SpeakerLayout layout;
    try {
        const std::string geometry = j.at("geometry").get<std::string>();
        if (geometry == "3d") layout.geometry = LayoutGeometry::Spherical3D;
        else if (geometry == "2d") layout.geometry = LayoutGeometry::Circular2D;
        else
            throw ParseError("layout geometry must be \"3d\" or \"2d\", got \"" + geometry +
                             "\"");
        for (const auto& s : j.at("speakers")) {
            Speaker speaker;
            speaker.direction = Direction(s.at("azimuth_deg").get<double>() * kPi / 180.0,
                                          s.at("elevation_deg").get<double>() * kPi / 180.0);
            speaker.radius = s.value("radius_m", 1.0);
            layout.speakers.push_back(speaker);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("layout file " + path.string() + ": " + e.what());
    }
    layout.validate();
    return layout;
}

std::vector<double> max_re_weights(int order) {
    if (order < 0) throw InvalidArgument("order must be >= 0");
    const double arg = std::cos(137.9 * kPi / 180.0 / (order + 1.51));
    std::vector<double> weights(static_cast<std::size_t>(order) + 1);
    for (int n = 0; n <= order; ++n)
        weights[static_cast<std::size_t>(n)] =
            std::legendre(static_cast<unsigned int>(n), arg);
    return weights;
}

namespace {

// Horizontal circular basis with equal discrete norms: 1, then per degree
// sqrt(2)*sin(n az), sqrt(2)*cos(n az), matching horizontal_acn_indices.
std::vector<double> circular_vector(double azimuth, int order) {
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(2 * order + 1));
    y.push_back(1.0);
    for (int n = 1; n <= order; ++n) {
        y.push_back(std::sqrt(2.0) * std::sin(n * azimuth));
        y.push_back(std::sqrt(2.0) * std::cos(n * azimuth));
    }
    return y;
}

// Gain taking the canonical sn3d channel of mode (n, +-n) to the matching
// circular-basis channel for horizontal content.
double circular_channel_gain(int degree) {
    if (degree == 0) return 1.0;
    // sn3d sector amplitude at the equator: sqrt(2 * (2n-1)!! / (2n)!!).
    double ratio = 1.0;
    for (int k = 1; k <= degree; ++k) ratio *= (2.0 * k - 1.0) / (2.0 * k);
    return std::sqrt(2.0) / std::sqrt(2.0 * ratio);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_cutoff,
                               double* condition_out) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (condition_out)
        *condition_out = sv(sv.size() - 1) > 0.0 ? smax / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
    Eigen::VectorXd inv = sv;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        inv(i) = sv(i) > relative_cutoff * smax ? 1.0 / sv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int degree_of_column(int column, bool horizontal_only) {
    if (!horizontal_only) return mode_from_acn(column).n;
    return (column + 1) / 2;  // columns 0 | 1,2 | 3,4 | ... per degree
}

}  // namespace

DecoderMatrix build_decoder(const SpeakerLayout& layout, int order, DecoderMethod method,
                            const DecoderOptions& options) {
    layout.validate();
    if (order < 0) throw InvalidArgument("decoder order must be >= 0");

    const int n_speakers = static_cast<int>(layout.speakers.size());
    DecoderMatrix dec;
    dec.order = order;
    dec.method = method;
    dec.horizontal_only = layout.geometry == LayoutGeometry::Circular2D;

    const int columns = dec.horizontal_only ? 2 * order + 1 : channel_count(order);
    if (dec.horizontal_only)
        dec.warnings.push_back(
            "circular layout: decoding the horizontal (|m| = n) modes only");

    // Re-encoding matrix Y: one row per speaker in the decoding basis.
    Eigen::MatrixXd basis(n_speakers, columns);
    for (int l = 0; l < n_speakers; ++l) {
        if (dec.horizontal_only) {
            const std::vector<double> y =
                circular_vector(layout.speakers[static_cast<std::size_t>(l)].direction.azimuth,
                                order);
            for (int k = 0; k < columns; ++k) basis(l, k) = y[static_cast<std::size_t>(k)];
        } else {
            const std::vector<double> y =
                sh_vector(layout.speakers[static_cast<std::size_t>(l)].direction, order,
                          Normalization::N3D);
            for (int k = 0; k < columns; ++k) basis(l, k) = y[static_cast<std::size_t>(k)];
        }
    }

    switch (method) {
        case DecoderMethod::Projection:
            dec.matrix = basis / static_cast<double>(n_speakers);
            break;
        case DecoderMethod::ModeMatching: {
            if (n_speakers < columns)
                dec.warnings.push_back(
                    "fewer speakers (" + std::to_string(n_speakers) + ") than channels (" +
                    std::to_string(columns) + "); using a regularized pseudo-inverse");
            double condition = 0.0;
            dec.matrix = pseudo_inverse(basis.transpose(), options.svd_cutoff, &condition);
            if (n_speakers >= columns) {
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis);
                const Eigen::VectorXd& sv = svd.singularValues();
                if (sv(sv.size() - 1) <= options.svd_cutoff * sv(0))
                    throw IllConditionedLayout(
                        "layout is rank deficient for order " + std::to_string(order) +
                        " (condition number " + std::to_string(condition) + ")");
            }
            break;
        }
        case DecoderMethod::AllRad: {
            if (dec.horizontal_only) {
                // Dense virtual circle panned pairwise onto the ring.
                const int virtual_count = std::max(8 * (order + 1), 32);
                std::vector<double> speaker_az;
                for (const Speaker& s : layout.speakers)
                    speaker_az.push_back(s.direction.azimuth);
                dec.matrix = Eigen::MatrixXd::Zero(n_speakers, columns);
                for (int v = 0; v < virtual_count; ++v) {
                    const double az = kTwoPi * v / virtual_count;
                    const std::vector<double> g = detail::vbap_gains_2d(speaker_az, az);
                    const std::vector<double> y = circular_vector(az, order);
                    for (int l = 0; l < n_speakers; ++l) {
                        if (g[static_cast<std::size_t>(l)] == 0.0) continue;
                        for (int k = 0; k < columns; ++k)
                            dec.matrix(l, k) += g[static_cast<std::size_t>(l)] *
                                                y[static_cast<std::size_t>(k)] /
                                                virtual_count;
                    }
                }
            } else {
                const QuadratureGrid grid = quadrature_grid(2 * order + 2);
                std::vector<detail::Vec3> dirs;
                dirs.reserve(layout.speakers.size());
                for (const Speaker& s : layout.speakers)
                    dirs.push_back(s.direction.unit_vector());
                const auto triangles = detail::hull_triangles(dirs);
                dec.matrix = Eigen::MatrixXd::Zero(n_speakers, columns);
                for (std::size_t v = 0; v < grid.size(); ++v) {
                    const std::vector<double> g = detail::vbap_gains_3d(
                        dirs, triangles, grid.directions[v].unit_vector());
                    const std::vector<double> y =
                        sh_vector(grid.directions[v], order, Normalization::N3D);
                    const double w = grid.weights[v] / kFourPi;
                    for (int l = 0; l < n_speakers; ++l) {
                        if (g[static_cast<std::size_t>(l)] == 0.0) continue;
                        for (int k = 0; k < columns; ++k)
                            dec.matrix(l, k) +=
                                g[static_cast<std::size_t>(l)] * w * y[static_cast<std::size_t>(k)];
                    }
                }
            }
            break;
        }
    }

    // Fold in the canonical-channel conversion so the matrix applies
    // directly to acn/sn3d data (or its horizontal subset).
    for (int k = 0; k < columns; ++k) {
        const int degree = degree_of_column(k, dec.horizontal_only);
        const double gain = dec.horizontal_only
                                ? circular_channel_gain(degree)
                                : std::sqrt(2.0 * degree + 1.0);
        dec.matrix.col(k) *= gain;
    }

    dec.order_weights.assign(static_cast<std::size_t>(order) + 1, 1.0);
    if (options.weights == OrderWeighting::MaxRe) {
        dec.order_weights = max_re_weights(order);
        for (int k = 0; k < columns; ++k)
            dec.matrix.col(k) *= dec.order_weights[static_cast<std::size_t>(
                degree_of_column(k, dec.horizontal_only))];
    }
    return dec;
}

SampleMatrix apply_decoder(const AmbisonicBuffer& buffer, const DecoderMatrix& decoder) {
    buffer.require_canonical("apply_decoder");
    if (buffer.order() < decoder.order)
        throw InvalidArgument("buffer order " + std::to_string(buffer.order()) +
                              " is below the decoder order " +
                              std::to_string(decoder.order));

    // Gather the decoded channels (truncation drops orders above the
    // decoder's; a circular decoder reads the |m| = n subset).
    std::vector<int> sources;
    if (decoder.horizontal_only) {
        sources = horizontal_acn_indices(decoder.order);
    } else {
        sources.resize(static_cast<std::size_t>(channel_count(decoder.order)));
        for (std::size_t k = 0; k < sources.size(); ++k) sources[k] = static_cast<int>(k);
    }
    if (decoder.matrix.cols() != static_cast<Eigen::Index>(sources.size()))
        throw InvalidArgument("decoder matrix has unexpected column count");

    const std::size_t frames = buffer.frames();
    const auto n_speakers = static_cast<std::size_t>(decoder.matrix.rows());
    SampleMatrix feeds(n_speakers, frames);
    for (std::size_t l = 0; l < n_speakers; ++l) {
        auto dst = feeds.channel(l);
        for (std::size_t k = 0; k < sources.size(); ++k) {
            const double g = decoder.matrix(static_cast<Eigen::Index>(l),
                                            static_cast<Eigen::Index>(k));
            if (g == 0.0) continue;
            const auto src = buffer.channel(static_cast<std::size_t>(sources[k]));
            for (std::size_t i = 0; i < frames; ++i) dst[i] += g * src[i];
        }
    }
    return feeds;
}

namespace {

std::vector<double> encoding_for_decoder(const DecoderMatrix& decoder, const Direction& dir) {
    const std::vector<double> full = sh_vector(dir, decoder.order, Normalization::SN3D);
    if (!decoder.horizontal_only) return full;
    const std::vector<int> keep = horizontal_acn_indices(decoder.order);
    std::vector<double> sub;
    sub.reserve(keep.size());
    for (const int k : keep) sub.push_back(full[static_cast<std::size_t>(k)]);
    return sub;
}

}  // namespace

AnalysisEntry energy_vectors(const SpeakerLayout& layout, std::span<const double> gains,
                             const std::array<double, 3>& position,
                             const Direction& reference) {
    const std::size_t n_speakers = layout.speakers.size();
    if (gains.size() != n_speakers)
        throw InvalidArgument("need one gain per speaker");

    AnalysisEntry entry;
    double sum_a = 0.0, sum_e = 0.0;
    std::array<double, 3> rv{0.0, 0.0, 0.0}, re{0.0, 0.0, 0.0};
    for (std::size_t l = 0; l < n_speakers; ++l) {
        const auto u = layout.speakers[l].direction.unit_vector();
        const double r = layout.speakers[l].radius;
        const std::array<double, 3> d = {r * u[0] - position[0], r * u[1] - position[1],
                                         r * u[2] - position[2]};
        const double dist = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        const double a = gains[l] / dist;
        const double e = a * a;
        for (std::size_t c = 0; c < 3; ++c) {
            rv[c] += a * d[c] / dist;
            re[c] += e * d[c] / dist;
        }
        sum_a += a;
        sum_e += e;
    }
    for (std::size_t c = 0; c < 3; ++c) {
        rv[c] = sum_a != 0.0 ? rv[c] / sum_a : 0.0;
        re[c] = sum_e != 0.0 ? re[c] / sum_e : 0.0;
    }
    entry.r_v = rv;
    entry.r_e = re;

    // Reference point: the virtual source on the array radius, seen from
    // the listening position.
    const double radius = layout.mean_radius();
    const auto u = reference.unit_vector();
    const std::array<double, 3> target = {radius * u[0] - position[0],
                                          radius * u[1] - position[1],
                                          radius * u[2] - position[2]};
    const double tn =
        std::sqrt(target[0] * target[0] + target[1] * target[1] + target[2] * target[2]);
    const double ren = std::sqrt(re[0] * re[0] + re[1] * re[1] + re[2] * re[2]);
    if (ren < 1e-12) {
        entry.error_deg = 180.0;  // cancelled energy flow: worst case
    } else {
        const double cosang =
            (re[0] * target[0] + re[1] * target[1] + re[2] * target[2]) / (ren * tn);
        entry.error_deg = std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / kPi;
    }
    return entry;
}

AnalysisReport analyze_decoder(const DecoderMatrix& decoder, const SpeakerLayout& layout,
                               std::span<const Direction> source_directions,
                               std::span<const std::array<double, 3>> positions) {
    layout.validate();
    const std::size_t n_speakers = layout.speakers.size();
    if (decoder.matrix.rows() != static_cast<Eigen::Index>(n_speakers))
        throw InvalidArgument("decoder speaker count does not match the layout");

    AnalysisReport report;
    report.source_directions.assign(source_directions.begin(), source_directions.end());
    report.positions.assign(positions.begin(), positions.end());
    report.array_radius = layout.mean_radius();

    // Hull bound: exact polygon inradius for circular layouts, a sphere
    // bound otherwise.
    double max_inside = 0.0;
    {
        double min_radius = 1e300;
        for (const Speaker& s : layout.speakers) min_radius = std::min(min_radius, s.radius);
        if (layout.geometry == LayoutGeometry::Circular2D)
            max_inside = min_radius * std::cos(kPi / static_cast<double>(n_speakers));
        else
            max_inside = min_radius * 0.999;
    }

    // Speaker gains per source direction.
    std::vector<std::vector<double>> gains;
    gains.reserve(source_directions.size());
    for (const Direction& d : source_directions) {
        const std::vector<double> enc = encoding_for_decoder(decoder, d);
        std::vector<double> g(n_speakers, 0.0);
        for (std::size_t l = 0; l < n_speakers; ++l)
            for (std::size_t k = 0; k < enc.size(); ++k)
                g[l] += decoder.matrix(static_cast<Eigen::Index>(l),
                                       static_cast<Eigen::Index>(k)) *
                        enc[k];
        gains.push_back(std::move(g));
    }

    for (const auto& p : positions) {
        const double p_norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (p_norm >= max_inside)
            throw InvalidArgument("listening position at radius " + std::to_string(p_norm) +
                                  " is not strictly inside the array hull");

        std::vector<AnalysisEntry> row;
        row.reserve(source_directions.size());
        double error_sum = 0.0;
        for (std::size_t s = 0; s < source_directions.size(); ++s) {
            row.push_back(
                energy_vectors(layout, gains[s], p, report.source_directions[s]));
            error_sum += row.back().error_deg;
        }
        report.mean_error_deg.push_back(
            source_directions.empty()
                ? 0.0
                : error_sum / static_cast<double>(source_directions.size()));
        report.per_position.push_back(std::move(row));
    }
    return report;
}

double sweet_area_radius(const AnalysisReport& report, double threshold_deg) {
    if (report.positions.empty()) return 0.0;
    std::vector<std::pair<double, bool>> by_radius;  // (|p|/R, passes)
    by_radius.reserve(report.positions.size());
    for (std::size_t i = 0; i < report.positions.size(); ++i) {
        const auto& p = report.positions[i];
        const double r =
            std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / report.array_radius;
        by_radius.emplace_back(r, report.mean_error_deg[i] < threshold_deg);
    }
    std::sort(by_radius.begin(), by_radius.end());
    double radius = 0.0;
    for (const auto& [r, ok] : by_radius) {
        if (!ok) break;
        radius = r;
    }
    return radius;
}

}  // namespace ambra
