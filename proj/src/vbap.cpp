#include "vbap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ambra/errors.hpp"
#include "ambra/sh.hpp"

namespace ambra::detail {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct Face {
    std::array<int, 3> v;
    Vec3 normal;
    double offset;  // plane: dot(normal, x) = offset
    bool alive = true;
};

Face make_face(const std::vector<Vec3>& pts, int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.normal = cross(sub(pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(a)]),
                     sub(pts[static_cast<std::size_t>(c)], pts[static_cast<std::size_t>(a)]));
    f.offset = dot(f.normal, pts[static_cast<std::size_t>(a)]);
    return f;
}

}  // namespace

std::vector<std::array<int, 3>> hull_triangles(const std::vector<Vec3>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 4)
        throw IllConditionedLayout("3-D panning needs at least 4 speakers, got " +
                                   std::to_string(n));

    // Initial tetrahedron from four points in general position.
    constexpr double kEps = 1e-9;
    int i1 = -1, i2 = -1, i3 = -1;
    for (int i = 1; i < n && i1 < 0; ++i)
        if (dot(sub(points[static_cast<std::size_t>(i)], points[0]),
                sub(points[static_cast<std::size_t>(i)], points[0])) > kEps)
            i1 = i;
    if (i1 < 0) throw IllConditionedLayout("all speakers coincide");
    for (int i = 1; i < n && i2 < 0; ++i) {
        if (i == i1) continue;
        const Vec3 c = cross(sub(points[static_cast<std::size_t>(i1)], points[0]),
                             sub(points[static_cast<std::size_t>(i)], points[0]));
        if (dot(c, c) > kEps) i2 = i;
    }
    if (i2 < 0) throw IllConditionedLayout("speakers are collinear");
    Face base = make_face(points, 0, i1, i2);
    for (int i = 1; i < n && i3 < 0; ++i) {
        if (i == i1 || i == i2) continue;
        if (std::abs(dot(base.normal, points[static_cast<std::size_t>(i)]) - base.offset) >
            kEps)
            i3 = i;
    }
    if (i3 < 0)
        throw IllConditionedLayout(
            "speakers are coplanar; declare the layout as 2d for pairwise panning");

    std::vector<Face> faces;
    {
        const std::array<int, 4> t = {0, i1, i2, i3};
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> v;
            int k = 0;
            for (int j = 0; j < 4; ++j)
                if (j != skip) v[static_cast<std::size_t>(k++)] = t[static_cast<std::size_t>(j)];
            Face f = make_face(points, v[0], v[1], v[2]);
            // Orient outward: the skipped vertex lies behind the face.
            if (dot(f.normal, points[static_cast<std::size_t>(t[static_cast<std::size_t>(skip)])]) >
                f.offset) {
                std::swap(f.v[1], f.v[2]);
                f = make_face(points, f.v[0], f.v[1], f.v[2]);
            }
            faces.push_back(f);
        }
    }

    for (int p = 1; p < n; ++p) {
        if (p == i1 || p == i2 || p == i3) continue;
        std::vector<int> visible;
        for (std::size_t f = 0; f < faces.size(); ++f)
            if (faces[f].alive &&
                dot(faces[f].normal, points[static_cast<std::size_t>(p)]) >
                    faces[f].offset + kEps)
                visible.push_back(static_cast<int>(f));
        if (visible.empty()) continue;  // inside the current hull

        // Horizon edges: edges of visible faces shared with a hidden face.
        std::vector<std::array<int, 2>> horizon;
        auto edge_hidden = [&](int a, int b) {
            for (const Face& f : faces) {
                if (!f.alive) continue;
                bool vis = dot(f.normal, points[static_cast<std::size_t>(p)]) > f.offset + kEps;
                if (vis) continue;
                for (int e = 0; e < 3; ++e)
                    if ((f.v[static_cast<std::size_t>(e)] == b &&
                         f.v[static_cast<std::size_t>((e + 1) % 3)] == a))
                        return true;
            }
            return false;
        };
        for (const int fi : visible) {
            const Face& f = faces[static_cast<std::size_t>(fi)];
            for (int e = 0; e < 3; ++e) {
                const int a = f.v[static_cast<std::size_t>(e)];
                const int b = f.v[static_cast<std::size_t>((e + 1) % 3)];
                if (edge_hidden(a, b)) horizon.push_back({a, b});
            }
        }
        for (const int fi : visible) faces[static_cast<std::size_t>(fi)].alive = false;
        // A horizon edge (a, b) borders a hidden face carrying (b, a); the
        // stitched face (a, b, p) keeps the outward winding consistent.
        for (const auto& [a, b] : horizon) faces.push_back(make_face(points, a, b, p));
    }

    std::vector<std::array<int, 3>> triangles;
    for (const Face& f : faces)
        if (f.alive) triangles.push_back(f.v);
    return triangles;
}

std::vector<double> vbap_gains_3d(const std::vector<Vec3>& speakers,
                                  const std::vector<std::array<int, 3>>& triangles,
                                  const Vec3& direction) {
    std::vector<double> gains(speakers.size(), 0.0);
    double best_score = -1e30;
    std::array<int, 3> best{};
    std::array<double, 3> best_g{};
    for (const auto& tri : triangles) {
        const Vec3& a = speakers[static_cast<std::size_t>(tri[0])];
        const Vec3& b = speakers[static_cast<std::size_t>(tri[1])];
        const Vec3& c = speakers[static_cast<std::size_t>(tri[2])];
        const double det = dot(a, cross(b, c));
        if (std::abs(det) < 1e-12) continue;
        // Solve [a b c] g = direction by Cramer's rule.
        const double g0 = dot(direction, cross(b, c)) / det;
        const double g1 = dot(a, cross(direction, c)) / det;
        const double g2 = dot(a, cross(b, direction)) / det;
        const double score = std::min({g0, g1, g2});
        if (score > best_score) {
            best_score = score;
            best = tri;
            best_g = {g0, g1, g2};
        }
    }
    if (best_score <= -1e29)
        throw IllConditionedLayout("VBAP triangulation is degenerate");

    double energy = 0.0;
    for (double& g : best_g) {
        g = std::max(g, 0.0);  // clip numerical dust outside the triangle
        energy += g * g;
    }
    const double norm = energy > 0.0 ? 1.0 / std::sqrt(energy) : 0.0;
    for (int i = 0; i < 3; ++i)
        gains[static_cast<std::size_t>(best[static_cast<std::size_t>(i)])] =
            best_g[static_cast<std::size_t>(i)] * norm;
    return gains;
}

std::vector<double> vbap_gains_2d(const std::vector<double>& speaker_azimuths,
                                  double azimuth) {
    const std::size_t n = speaker_azimuths.size();
    std::vector<double> gains(n, 0.0);
    if (n == 1) {
        gains[0] = 1.0;
        return gains;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return speaker_azimuths[a] < speaker_azimuths[b];
    });

    auto wrap = [](double a) {
        a = std::remainder(a, kTwoPi);
        return a <= -kPi ? a + kTwoPi : a;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t left = order[i];
        const std::size_t right = order[(i + 1) % n];
        const double a0 = speaker_azimuths[left];
        double span = wrap(speaker_azimuths[right] - a0);
        if (span <= 0.0) span += kTwoPi;
        double t = wrap(azimuth - a0);
        if (t < 0.0) t += kTwoPi;
        if (t > span + 1e-12) continue;
        t = std::clamp(t, 0.0, span);
        // Tangent-law pair panning inside the arc.
        const double g_left = std::sin((span - t));
        const double g_right = std::sin(t);
        const double norm = std::sqrt(g_left * g_left + g_right * g_right);
        if (norm == 0.0) continue;
        gains[left] = g_left / norm;
        gains[right] = g_right / norm;
        return gains;
    }
    // Fallback: nearest speaker.
    std::size_t nearest = 0;
    double best = 1e30;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(wrap(azimuth - speaker_azimuths[i]));
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    gains[nearest] = 1.0;
    return gains;
}

}  // namespace ambra::detail
