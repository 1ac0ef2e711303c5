#pragma once

#include <array>
#include <vector>

namespace ambra::detail {

using Vec3 = std::array<double, 3>;

// Triangulation of unit vectors by their convex hull; faces carry outward
// orientation. Throws IllConditionedLayout for degenerate (coplanar) sets.
std::vector<std::array<int, 3>> hull_triangles(const std::vector<Vec3>& points);

// Triangle-based VBAP over the precomputed hull: nonnegative gains over all
// speakers (zero outside the selected triangle), normalized to unit energy.
std::vector<double> vbap_gains_3d(const std::vector<Vec3>& speakers,
                                  const std::vector<std::array<int, 3>>& triangles,
                                  const Vec3& direction);

// Pairwise panning between neighbours on a circle, by azimuth; unit-energy
// gains over all speakers.
std::vector<double> vbap_gains_2d(const std::vector<double>& speaker_azimuths,
                                  double azimuth);

}  // namespace ambra::detail
