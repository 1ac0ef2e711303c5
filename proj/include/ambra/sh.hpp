#pragma once

#include <array>
#include <vector>

#include "ambra/errors.hpp"

// Real spherical harmonics and mode bookkeeping.
//
// Conventions used throughout the library:
//   - right-handed coordinates, x = straight ahead, y = left, z = up
//   - azimuth counterclockwise from +x (so +pi/2 is left), elevation up
//     from the horizontal plane
//   - real-valued spherical harmonics, ACN channel ordering, SN3D base
//     normalization, no Condon-Shortley phase (the AmbiX flavour)
//
// Degree-1 SN3D values are simply the unit-vector components:
//   Y(0,0) = 1,  Y(1,-1) = y,  Y(1,0) = z,  Y(1,1) = x

namespace ambra {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPi = 4.0 * kPi;

enum class Normalization { SN3D, N3D, FuMa };

const char* to_string(Normalization norm);

// A single spherical-harmonic mode (n, m) with |m| <= n.
struct ModeIndex {
    int n = 0;
    int m = 0;

    ModeIndex() = default;
    ModeIndex(int n_, int m_) : n(n_), m(m_) {
        if (n < 0 || m < -n || m > n)
            throw InvalidArgument("invalid mode (" + std::to_string(n) + ", " +
                                  std::to_string(m) + ")");
    }
    bool operator==(const ModeIndex&) const = default;
};

// A direction on the unit sphere. Azimuth is normalized to (-pi, pi],
// elevation is clamped to [-pi/2, pi/2].
struct Direction {
    double azimuth = 0.0;
    double elevation = 0.0;

    Direction() = default;
    Direction(double azimuth_rad, double elevation_rad);

    std::array<double, 3> unit_vector() const;
    static Direction from_unit_vector(const std::array<double, 3>& v);

    // Great-circle angle to another direction, in [0, pi].
    double angle_to(const Direction& other) const;
};

// Number of channels of an order-N signal: (N+1)^2.
int channel_count(int order);

// Ambisonic channel number of a mode: n^2 + n + m.
int acn_index(const ModeIndex& mode);

// Inverse of acn_index.
ModeIndex mode_from_acn(int acn);

// All (order+1)^2 real spherical harmonics at `dir` in ACN order.
// FuMa normalization is defined only up to order 3.
std::vector<double> sh_vector(const Direction& dir, int order,
                              Normalization norm = Normalization::SN3D);

// Scalar g with g * Y_from = Y_to for the given mode, for every direction.
// Encoded channel data converts with the same factor.
double normalization_gain(const ModeIndex& mode, Normalization from,
                          Normalization to);

}  // namespace ambra
