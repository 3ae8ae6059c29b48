#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lek/grid.hpp"

namespace lek::geometry {

using Point = std::array<double, 2>;  // 1D domains use only [0]

struct DomainMetrics {
    double area = 0.0;       // length^N
    double perimeter = 0.0;  // length^{N-1}; two endpoints for an interval
    double inradius = 0.0;
    Point incenter{0.0, 0.0};
};

struct BoundingBox {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
};

/// Convex domain: interval (N=1), or box/disk/polygon (N=2).
/// Polygon vertices must be counterclockwise and strictly convex.
class ConvexDomain {
public:
    static ConvexDomain interval(double a, double b);
    static ConvexDomain box(Point lo, Point hi);
    static ConvexDomain disk(Point center, double radius);
    static ConvexDomain polygon(std::vector<Point> vertices);

    int dim() const;
    BoundingBox bounding_box() const;

    /// Signed distance to the boundary: positive inside, <= 0 outside.
    /// Exact for intervals and disks; for boxes and convex polygons inside
    /// points get the true boundary distance (min over faces/edges).
    double distance_to_boundary(const Point& x) const;

    DomainMetrics metrics() const;

    /// Points on (or arbitrarily near) the boundary, used for containment
    /// validation. Polygons return their vertices, curved boundaries a dense
    /// sample.
    std::vector<Point> boundary_sample(int per_edge = 64) const;

    std::string describe() const;

    // underlying shape access (used by I/O)
    struct Interval { double a, b; };
    struct Box { Point lo, hi; };
    struct Disk { Point center; double radius; };
    struct Polygon { std::vector<Point> vertices; };
    using Shape = std::variant<Interval, Box, Disk, Polygon>;
    const Shape& shape() const { return shape_; }

private:
    explicit ConvexDomain(Shape s) : shape_(std::move(s)) {}
    Shape shape_;
};

/// Builds the grid mask for the domain at spacing h on the lattice h*Z^N.
/// A node is interior iff distance_to_boundary > 0 (nodes exactly on the
/// boundary are Dirichlet). Requires h <= inradius/2; the solvers demand the
/// stricter h <= inradius/4.
Grid rasterize(const ConvexDomain& domain, double h,
               std::size_t node_budget = (std::size_t{1} << 24));

} // namespace lek::geometry
