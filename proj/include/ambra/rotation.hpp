#pragma once

#include <array>
#include <vector>

#include "ambra/buffer.hpp"

namespace ambra {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Scene rotation, intrinsic yaw (about z) -> pitch (about y) -> roll
// (about x), each following the right-hand rule. Positive yaw turns the
// scene towards the left.
struct RotationSpec {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;

    Mat3 matrix() const;  // R = Rz(yaw) * Ry(pitch) * Rx(roll)
};

Mat3 transpose(const Mat3& m);
std::array<double, 3> rotate_vector(const Mat3& m, const std::array<double, 3>& v);

// Per-degree rotation matrices for real spherical harmonics, computed by
// the recurrence of Ivanic & Ruedenberg. Block n is (2n+1)^2 values in
// row-major order over m, m' in [-n, n], and satisfies
//   Y_n(R d) = M_n * Y_n(d)
// for the library's real SH of any per-degree normalization.
std::vector<std::vector<double>> sh_rotation_blocks(const Mat3& rotation, int order);

// Applies the block-diagonal SH rotation to every frame. Lossless: each
// block is orthogonal, so per-order energy is preserved.
AmbisonicBuffer rotate(const AmbisonicBuffer& buffer, const RotationSpec& rotation);
AmbisonicBuffer rotate(const AmbisonicBuffer& buffer, const Mat3& rotation);

}  // namespace ambra
