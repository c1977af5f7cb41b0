#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "muskat/grid.hpp"
#include "muskat/transport.hpp"

namespace testutil {

inline muskat::GridDensity gaussian_density(const muskat::Grid& g, double mean, double sigma) {
    std::vector<double> v(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) {
        const double x = g.center(i);
        v[i] = std::exp(-0.5 * (x - mean) * (x - mean) / (sigma * sigma)) /
               (sigma * std::sqrt(2.0 * M_PI));
    }
    muskat::GridDensity u(g, v);
    u.normalize();
    return u;
}

inline muskat::GridDensity uniform_density(const muskat::Grid& g, double a, double b) {
    std::vector<double> v(g.n_cells, 0.0);
    for (std::size_t i = 0; i < g.n_cells; ++i) {
        const double lo = g.edge(i), hi = g.edge(i + 1);
        const double cov = std::max(0.0, std::min(hi, b) - std::max(lo, a));
        v[i] = cov / g.dx / (b - a);
    }
    return muskat::GridDensity(g, v);
}

/// Strictly increasing positions drawn as cumulative sums of positive gaps.
inline muskat::QuantileState random_monotone_state(std::mt19937& rng, std::size_t n,
                                                   double origin = -2.0) {
    std::uniform_real_distribution<double> gap(0.05, 0.5);
    std::vector<double> pos(n);
    double x = origin + gap(rng);
    for (std::size_t i = 0; i < n; ++i) {
        pos[i] = x;
        x += gap(rng);
    }
    return muskat::QuantileState(pos);
}

} // namespace testutil
