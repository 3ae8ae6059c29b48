#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace lek {

/// Uniform Cartesian grid on the absolute lattice h*Z^N (N = 1 or 2).
///
/// Nodes are addressed by integer lattice indices, so two grids with the same
/// spacing share nodes exactly: node (ix,iy) sits at (h*(i0[0]+ix), h*(i0[1]+iy)).
/// The `mask` flags interior nodes of the domain; every other node carries the
/// Dirichlet datum. The array extends one node beyond the domain's bounding
/// box on each side, so every masked node has all lattice neighbours present.
struct Grid {
    int dim = 2;
    double h = 0.0;
    std::array<long, 2> i0{0, 0};  // lattice index of node (0,0)
    std::array<int, 2> n{0, 1};    // node counts per axis (n[1] == 1 in 1D)
    std::vector<std::uint8_t> mask;

    std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1]; }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * n[0] + ix;
    }
    double coord(int axis, int idx) const { return h * (i0[axis] + idx); }
    bool interior(int ix, int iy) const { return mask[index(ix, iy)] != 0; }

    std::size_t interior_count() const {
        std::size_t c = 0;
        for (auto m : mask) c += (m != 0);
        return c;
    }
};

/// Nodal values over a Grid. Exterior nodes are pinned to the Dirichlet datum
/// (zero unless a datum was set); solvers update interior nodes only.
struct GridFunction {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const Grid> g, double fill = 0.0)
        : grid(std::move(g)), values(grid->size(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v < 0 ? -v : v);
        return m;
    }
    double max_interior() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (grid->mask[i]) m = std::max(m, values[i]);
        return m;
    }
};

} // namespace lek
