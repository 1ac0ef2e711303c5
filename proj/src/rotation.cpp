#include "ambra/rotation.hpp"

#include <cmath>

namespace ambra {

Mat3 RotationSpec::matrix() const {
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cr = std::cos(roll), sr = std::sin(roll);
    // Rz(yaw) * Ry(pitch) * Rx(roll)
    return {{{cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
             {sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
             {-sp, cp * sr, cp * cr}}};
}

Mat3 transpose(const Mat3& m) {
    return {{{m[0][0], m[1][0], m[2][0]},
             {m[0][1], m[1][1], m[2][1]},
             {m[0][2], m[1][2], m[2][2]}}};
}

std::array<double, 3> rotate_vector(const Mat3& m, const std::array<double, 3>& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

namespace {

// Square block indexed by m, m' in [-n, n].
class Block {
public:
    explicit Block(int n) : n_(n), data_(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1), 0.0) {}
    double& at(int m, int mp) {
        return data_[static_cast<std::size_t>(m + n_) * (2 * n_ + 1) +
                     static_cast<std::size_t>(mp + n_)];
    }
    double at(int m, int mp) const {
        return data_[static_cast<std::size_t>(m + n_) * (2 * n_ + 1) +
                     static_cast<std::size_t>(mp + n_)];
    }
    std::vector<double> take() && { return std::move(data_); }

private:
    int n_;
    std::vector<double> data_;
};

// Helper P from the recurrence; m1 is the degree-1 block, prev the degree
// (l-1) block.
double p_term(const Block& m1, const Block& prev, int l, int i, int a, int b) {
    if (b == l) return m1.at(i, 1) * prev.at(a, l - 1) - m1.at(i, -1) * prev.at(a, -l + 1);
    if (b == -l) return m1.at(i, 1) * prev.at(a, -l + 1) + m1.at(i, -1) * prev.at(a, l - 1);
    return m1.at(i, 0) * prev.at(a, b);
}

Block next_block(const Block& m1, const Block& prev, int l) {
    Block out(l);
    for (int m = -l; m <= l; ++m) {
        const int am = std::abs(m);
        for (int mp = -l; mp <= l; ++mp) {
            const double denom =
                std::abs(mp) == l ? (2.0 * l) * (2.0 * l - 1.0)
                                  : static_cast<double>(l + mp) * (l - mp);
            const double u = std::sqrt(static_cast<double>(l + m) * (l - m) / denom);
            const double v = 0.5 *
                             std::sqrt((1.0 + (m == 0 ? 1.0 : 0.0)) * (l + am - 1.0) *
                                       (l + am) / denom) *
                             (m == 0 ? -1.0 : 1.0);
            const double w =
                m == 0 ? 0.0 : -0.5 * std::sqrt((l - am - 1.0) * (l - am) / denom);

            double value = 0.0;
            if (u != 0.0) value += u * p_term(m1, prev, l, 0, m, mp);
            if (v != 0.0) {
                double vt;
                if (m == 0) {
                    vt = p_term(m1, prev, l, 1, 1, mp) + p_term(m1, prev, l, -1, -1, mp);
                } else if (m > 0) {
                    vt = p_term(m1, prev, l, 1, m - 1, mp) * std::sqrt(m == 1 ? 2.0 : 1.0) -
                         p_term(m1, prev, l, -1, -m + 1, mp) * (m == 1 ? 0.0 : 1.0);
                } else {
                    vt = p_term(m1, prev, l, 1, m + 1, mp) * (m == -1 ? 0.0 : 1.0) +
                         p_term(m1, prev, l, -1, -m - 1, mp) * std::sqrt(m == -1 ? 2.0 : 1.0);
                }
                value += v * vt;
            }
            if (w != 0.0) {
                const double wt =
                    m > 0 ? p_term(m1, prev, l, 1, m + 1, mp) +
                                p_term(m1, prev, l, -1, -m - 1, mp)
                          : p_term(m1, prev, l, 1, m - 1, mp) -
                                p_term(m1, prev, l, -1, -m + 1, mp);
                value += w * wt;
            }
            out.at(m, mp) = value;
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> sh_rotation_blocks(const Mat3& r, int order) {
    if (order < 0) throw InvalidArgument("order must be >= 0");

    std::vector<std::vector<double>> result;
    result.reserve(static_cast<std::size_t>(order) + 1);
    result.push_back({1.0});
    if (order == 0) return result;

    // Degree 1 in the (y, z, x) component order of ACN.
    Block m1(1);
    m1.at(-1, -1) = r[1][1];
    m1.at(-1, 0) = r[1][2];
    m1.at(-1, 1) = r[1][0];
    m1.at(0, -1) = r[2][1];
    m1.at(0, 0) = r[2][2];
    m1.at(0, 1) = r[2][0];
    m1.at(1, -1) = r[0][1];
    m1.at(1, 0) = r[0][2];
    m1.at(1, 1) = r[0][0];

    Block prev = m1;
    result.push_back(Block(m1).take());
    for (int l = 2; l <= order; ++l) {
        Block block = next_block(m1, prev, l);
        prev = block;
        result.push_back(std::move(block).take());
    }
    return result;
}

namespace {

AmbisonicBuffer apply_blocks(const AmbisonicBuffer& buffer,
                             const std::vector<std::vector<double>>& blocks) {
    const std::size_t frames = buffer.frames();
    AmbisonicBuffer out(buffer.sample_rate(), buffer.order(), buffer.convention(), frames);
    for (int n = 0; n <= buffer.order(); ++n) {
        const int base = n * n;
        const int width = 2 * n + 1;
        const std::vector<double>& block = blocks[static_cast<std::size_t>(n)];
        for (int row = 0; row < width; ++row) {
            auto dst = out.channel(static_cast<std::size_t>(base + row));
            for (int col = 0; col < width; ++col) {
                const double g = block[static_cast<std::size_t>(row) *
                                           static_cast<std::size_t>(width) +
                                       static_cast<std::size_t>(col)];
                if (g == 0.0) continue;
                const auto src = buffer.channel(static_cast<std::size_t>(base + col));
                for (std::size_t i = 0; i < frames; ++i) dst[i] += g * src[i];
            }
        }
    }
    return out;
}

}  // namespace

AmbisonicBuffer rotate(const AmbisonicBuffer& buffer, const Mat3& rotation) {
    buffer.require_canonical("rotate");
    return apply_blocks(buffer, sh_rotation_blocks(rotation, buffer.order()));
}

AmbisonicBuffer rotate(const AmbisonicBuffer& buffer, const RotationSpec& rotation) {
    return rotate(buffer, rotation.matrix());
}

}  // namespace ambra
