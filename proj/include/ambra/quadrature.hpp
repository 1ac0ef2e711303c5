#pragma once

#include <span>
#include <vector>

#include "ambra/sh.hpp"

namespace ambra {

// Spherical quadrature grid: integrates spherical polynomials up to
// exactness_degree exactly; weights are in steradians and sum to 4*pi.
struct QuadratureGrid {
    std::vector<Direction> directions;
    std::vector<double> weights;
    int exactness_degree = 0;

    std::size_t size() const { return directions.size(); }
};

// Product grid: Gauss-Legendre nodes over sin(elevation), equiangular in
// azimuth, sized for the requested polynomial exactness.
QuadratureGrid quadrature_grid(int degree);

// Coefficients of the band-limited function sampled on the grid, ACN order,
// in the requested normalization (such that sh_synthesis reproduces the
// samples). Requires grid exactness >= 2*order.
std::vector<double> sh_analysis(std::span<const double> samples,
                                const QuadratureGrid& grid, int order,
                                Normalization norm = Normalization::SN3D);

// Pointwise inner product of the coefficients with sh_vector per direction.
// The coefficient count must be a perfect square.
std::vector<double> sh_synthesis(std::span<const double> coeffs,
                                 std::span<const Direction> directions,
                                 Normalization norm = Normalization::SN3D);

}  // namespace ambra
