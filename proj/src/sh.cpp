#include "ambra/sh.hpp"

#include <algorithm>
#include <cmath>

namespace ambra {

const char* to_string(Normalization norm) {
    switch (norm) {
        case Normalization::SN3D: return "sn3d";
        case Normalization::N3D: return "n3d";
        case Normalization::FuMa: return "fuma";
    }
    return "?";
}

Direction::Direction(double azimuth_rad, double elevation_rad) {
    azimuth = std::remainder(azimuth_rad, kTwoPi);
    if (azimuth <= -kPi) azimuth += kTwoPi;
    elevation = std::clamp(elevation_rad, -kPi / 2.0, kPi / 2.0);
}

std::array<double, 3> Direction::unit_vector() const {
    const double ce = std::cos(elevation);
    return {ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
}

Direction Direction::from_unit_vector(const std::array<double, 3>& v) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(norm > 0.0))
        throw InvalidArgument("cannot derive a direction from the zero vector");
    const double z = std::clamp(v[2] / norm, -1.0, 1.0);
    return Direction(std::atan2(v[1], v[0]), std::asin(z));
}

double Direction::angle_to(const Direction& other) const {
    const auto a = unit_vector();
    const auto b = other.unit_vector();
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

int channel_count(int order) {
    if (order < 0)
        throw InvalidArgument("order must be >= 0, got " + std::to_string(order));
    return (order + 1) * (order + 1);
}

int acn_index(const ModeIndex& mode) {
    return mode.n * mode.n + mode.n + mode.m;
}

ModeIndex mode_from_acn(int acn) {
    if (acn < 0)
        throw InvalidArgument("ACN must be >= 0, got " + std::to_string(acn));
    const int n = static_cast<int>(std::sqrt(static_cast<double>(acn)));
    return ModeIndex(n, acn - n * n - n);
}

namespace {

// SN3D gain factor toward FuMa ("maxN" with the extra -3 dB on W):
// 1 / max|Y_sn3d| per mode, times 1/sqrt(2) for (0,0).
double fuma_gain_from_sn3d(const ModeIndex& mode) {
    const int am = std::abs(mode.m);
    switch (mode.n) {
        case 0: return 1.0 / std::sqrt(2.0);
        case 1: return 1.0;
        case 2: return am == 0 ? 1.0 : 2.0 / std::sqrt(3.0);
        case 3:
            switch (am) {
                case 0: return 1.0;
                case 1: return std::sqrt(45.0 / 32.0);
                case 2: return 3.0 / std::sqrt(5.0);
                default: return std::sqrt(8.0 / 5.0);
            }
        default:
            throw UnsupportedConvention("FuMa normalization is limited to order 3");
    }
}

double gain_from_sn3d(const ModeIndex& mode, Normalization to) {
    switch (to) {
        case Normalization::SN3D: return 1.0;
        case Normalization::N3D: return std::sqrt(2.0 * mode.n + 1.0);
        case Normalization::FuMa: return fuma_gain_from_sn3d(mode);
    }
    return 1.0;
}

}  // namespace

double normalization_gain(const ModeIndex& mode, Normalization from,
                          Normalization to) {
    if (from == to) return 1.0;
    return gain_from_sn3d(mode, to) / gain_from_sn3d(mode, from);
}

std::vector<double> sh_vector(const Direction& dir, int order, Normalization norm) {
    const int channels = channel_count(order);
    if (norm == Normalization::FuMa && order > 3)
        throw UnsupportedConvention("FuMa normalization is limited to order 3");

    std::vector<double> sh(static_cast<std::size_t>(channels), 0.0);

    const double x = std::sin(dir.elevation);   // cos of the polar angle
    const double s = std::cos(dir.elevation);

    // Semi-normalized associated Legendre values, upward recurrences:
    //   Pbar(m,m)   = sqrt((2m-1)/(2m)) * s * Pbar(m-1,m-1)
    //   Pbar(m+1,m) = sqrt(2m+1) * x * Pbar(m,m)
    //   Pbar(n,m)   = a * x * Pbar(n-1,m) - b * Pbar(n-2,m)
    // with a = (2n-1)/sqrt((n-m)(n+m)), b = sqrt(((n-1)^2-m^2)/((n-m)(n+m))).
    // No Condon-Shortley phase.
    double pmm = 1.0;
    for (int m = 0; m <= order; ++m) {
        if (m > 0) pmm *= s * std::sqrt((2.0 * m - 1.0) / (2.0 * m));
        const double sector = (m == 0) ? 1.0 : std::sqrt(2.0);
        const double cos_m = std::cos(m * dir.azimuth);
        const double sin_m = std::sin(m * dir.azimuth);

        double p_prev2 = 0.0;
        double p_prev = pmm;
        for (int n = m; n <= order; ++n) {
            double p;
            if (n == m) {
                p = pmm;
            } else if (n == m + 1) {
                p = std::sqrt(2.0 * m + 1.0) * x * pmm;
            } else {
                const double denom = std::sqrt(static_cast<double>(n - m) *
                                               static_cast<double>(n + m));
                const double a = (2.0 * n - 1.0) / denom;
                const double b =
                    std::sqrt((static_cast<double>(n - 1) * (n - 1) - m * m)) / denom;
                p = a * x * p_prev - b * p_prev2;
            }
            sh[static_cast<std::size_t>(acn_index(ModeIndex(n, m)))] = sector * p * cos_m;
            if (m > 0)
                sh[static_cast<std::size_t>(acn_index(ModeIndex(n, -m)))] = sector * p * sin_m;
            p_prev2 = p_prev;
            p_prev = p;
        }
    }

    if (norm != Normalization::SN3D) {
        for (int k = 0; k < channels; ++k)
            sh[static_cast<std::size_t>(k)] *= gain_from_sn3d(mode_from_acn(k), norm);
    }
    return sh;
}

}  // namespace ambra
