#include "ambra/quadrature.hpp"

#include <cmath>

namespace ambra {

namespace {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Nodes/weights by Newton iteration on P_q; standard three-term recurrence.
GaussLegendre gauss_legendre(int q) {
    GaussLegendre gl;
    gl.nodes.resize(static_cast<std::size_t>(q));
    gl.weights.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int n = 2; n <= q; ++n) {
                const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.nodes[static_cast<std::size_t>(q - 1 - i)] = x;
        gl.weights[static_cast<std::size_t>(q - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

}  // namespace

QuadratureGrid quadrature_grid(int degree) {
    if (degree < 0)
        throw InvalidArgument("quadrature degree must be >= 0");

    // q Gauss-Legendre nodes integrate polynomials of degree 2q-1 in
    // sin(el); degree+1 equiangular azimuths handle trig degree `degree`.
    const int q = degree / 2 + 1;
    const int n_az = degree + 1;
    const GaussLegendre gl = gauss_legendre(q);

    QuadratureGrid grid;
    grid.exactness_degree = degree;
    grid.directions.reserve(static_cast<std::size_t>(q) * n_az);
    grid.weights.reserve(static_cast<std::size_t>(q) * n_az);
    for (int i = 0; i < q; ++i) {
        const double el = std::asin(gl.nodes[static_cast<std::size_t>(i)]);
        const double w = gl.weights[static_cast<std::size_t>(i)] * kTwoPi / n_az;
        for (int j = 0; j < n_az; ++j) {
            grid.directions.emplace_back(kTwoPi * j / n_az, el);
            grid.weights.push_back(w);
        }
    }
    return grid;
}

std::vector<double> sh_analysis(std::span<const double> samples,
                                const QuadratureGrid& grid, int order,
                                Normalization norm) {
    if (samples.size() != grid.size())
        throw InvalidArgument("sample count does not match the grid size");
    if (grid.exactness_degree < 2 * order)
        throw InvalidArgument("grid exactness " + std::to_string(grid.exactness_degree) +
                              " is insufficient for order " + std::to_string(order));

    const int channels = channel_count(order);
    std::vector<double> coeffs(static_cast<std::size_t>(channels), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const std::vector<double> y =
            sh_vector(grid.directions[g], order, Normalization::N3D);
        const double f = samples[g] * grid.weights[g] / kFourPi;
        for (int k = 0; k < channels; ++k)
            coeffs[static_cast<std::size_t>(k)] += f * y[static_cast<std::size_t>(k)];
    }
    // N3D projection; rescale so reconstruction in `norm` matches.
    for (int k = 0; k < channels; ++k)
        coeffs[static_cast<std::size_t>(k)] *=
            normalization_gain(mode_from_acn(k), norm, Normalization::N3D);
    return coeffs;
}

std::vector<double> sh_synthesis(std::span<const double> coeffs,
                                 std::span<const Direction> directions,
                                 Normalization norm) {
    const auto count = coeffs.size();
    const int order = static_cast<int>(std::sqrt(static_cast<double>(count))) - 1;
    if (order < 0 || static_cast<std::size_t>(channel_count(order)) != count)
        throw MalformedSignal("coefficient count " + std::to_string(count) +
                              " is not a perfect square");

    std::vector<double> out;
    out.reserve(directions.size());
    for (const Direction& dir : directions) {
        const std::vector<double> y = sh_vector(dir, order, norm);
        double acc = 0.0;
        for (std::size_t k = 0; k < count; ++k) acc += coeffs[k] * y[k];
        out.push_back(acc);
    }
    return out;
}

}  // namespace ambra
