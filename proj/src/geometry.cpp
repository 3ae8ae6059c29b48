#include "lek/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lek/errors.hpp"

namespace lek::geometry {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double dist2(const Point& a, const Point& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

struct Edge {
    Point n;   // unit inward normal
    double b;  // signed distance of x to the edge line is n.x - b
};

std::vector<Edge> polygon_edges(const std::vector<Point>& v) {
    std::vector<Edge> edges;
    edges.reserve(v.size());
    const std::size_t k = v.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % k];
        const double ex = q[0] - p[0], ey = q[1] - p[1];
        const double len = std::sqrt(ex * ex + ey * ey);
        // CCW ordering: interior lies to the left, inward normal = (-ey, ex)/len
        Point n{-ey / len, ex / len};
        edges.push_back({n, n[0] * p[0] + n[1] * p[1]});
    }
    return edges;
}

} // namespace

ConvexDomain ConvexDomain::interval(double a, double b) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw ParameterError("interval requires finite a < b");
    return ConvexDomain(Interval{a, b});
}

ConvexDomain ConvexDomain::box(Point lo, Point hi) {
    if (!(lo[0] < hi[0]) || !(lo[1] < hi[1]))
        throw ParameterError("box requires min < max componentwise");
    return ConvexDomain(Box{lo, hi});
}

ConvexDomain ConvexDomain::disk(Point center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ParameterError("disk requires radius > 0");
    return ConvexDomain(Disk{center, radius});
}

ConvexDomain ConvexDomain::polygon(std::vector<Point> vertices) {
    const std::size_t k = vertices.size();
    if (k < 3) throw ParameterError("polygon requires at least 3 vertices");
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        scale = std::max(scale, std::sqrt(dist2(vertices[i], vertices[(i + 1) % k])));
    for (std::size_t i = 0; i < k; ++i) {
        const double c = cross(vertices[i], vertices[(i + 1) % k], vertices[(i + 2) % k]);
        if (!(c > 1e-12 * scale * scale))
            throw ParameterError(
                "polygon vertices must be counterclockwise and strictly convex "
                "(no three collinear vertices)");
    }
    return ConvexDomain(Polygon{std::move(vertices)});
}

int ConvexDomain::dim() const {
    return std::holds_alternative<Interval>(shape_) ? 1 : 2;
}

BoundingBox ConvexDomain::bounding_box() const {
    BoundingBox bb;
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        bb.lo = {iv->a, 0.0};
        bb.hi = {iv->b, 0.0};
    } else if (const auto* bx = std::get_if<Box>(&shape_)) {
        bb.lo = bx->lo;
        bb.hi = bx->hi;
    } else if (const auto* dk = std::get_if<Disk>(&shape_)) {
        bb.lo = {dk->center[0] - dk->radius, dk->center[1] - dk->radius};
        bb.hi = {dk->center[0] + dk->radius, dk->center[1] + dk->radius};
    } else {
        const auto& v = std::get<Polygon>(shape_).vertices;
        bb.lo = bb.hi = v[0];
        for (const auto& p : v) {
            bb.lo[0] = std::min(bb.lo[0], p[0]);
            bb.lo[1] = std::min(bb.lo[1], p[1]);
            bb.hi[0] = std::max(bb.hi[0], p[0]);
            bb.hi[1] = std::max(bb.hi[1], p[1]);
        }
    }
    return bb;
}

double ConvexDomain::distance_to_boundary(const Point& x) const {
    if (const auto* iv = std::get_if<Interval>(&shape_))
        return std::min(x[0] - iv->a, iv->b - x[0]);
    if (const auto* bx = std::get_if<Box>(&shape_))
        return std::min(std::min(x[0] - bx->lo[0], bx->hi[0] - x[0]),
                        std::min(x[1] - bx->lo[1], bx->hi[1] - x[1]));
    if (const auto* dk = std::get_if<Disk>(&shape_))
        return dk->radius - std::sqrt(dist2(x, dk->center));
    const auto& v = std::get<Polygon>(shape_).vertices;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& e : polygon_edges(v)) d = std::min(d, e.n[0] * x[0] + e.n[1] * x[1] - e.b);
    return d;
}

DomainMetrics ConvexDomain::metrics() const {
    DomainMetrics m;
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        m.area = iv->b - iv->a;
        m.perimeter = 2.0;  // H^0 measure of the two endpoints
        m.inradius = 0.5 * (iv->b - iv->a);
        m.incenter = {0.5 * (iv->a + iv->b), 0.0};
        return m;
    }
    if (const auto* bx = std::get_if<Box>(&shape_)) {
        const double w = bx->hi[0] - bx->lo[0];
        const double t = bx->hi[1] - bx->lo[1];
        m.area = w * t;
        m.perimeter = 2.0 * (w + t);
        m.inradius = 0.5 * std::min(w, t);
        // Chebyshev centers form an axis-aligned segment; lexicographic
        // smallest point, matching the polygon tie-break.
        m.incenter = {w > t ? bx->lo[0] + m.inradius : 0.5 * (bx->lo[0] + bx->hi[0]),
                      t > w ? bx->lo[1] + m.inradius : 0.5 * (bx->lo[1] + bx->hi[1])};
        return m;
    }
    if (const auto* dk = std::get_if<Disk>(&shape_)) {
        m.area = M_PI * dk->radius * dk->radius;
        m.perimeter = 2.0 * M_PI * dk->radius;
        m.inradius = dk->radius;
        m.incenter = dk->center;
        return m;
    }
    const auto& v = std::get<Polygon>(shape_).vertices;
    const std::size_t k = v.size();
    double area2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % k];
        area2 += p[0] * q[1] - q[0] * p[1];
        m.perimeter += std::sqrt(dist2(p, q));
    }
    m.area = 0.5 * area2;
    if (!(m.area > 0.0)) throw ParameterError("degenerate polygon: nonpositive area");

    // Chebyshev center: max r s.t. n_i.x - b_i >= r for every edge. In the
    // plane an optimal basic solution is determined by two or three active
    // edges; enumerate the candidate bases (at most 32 edges by construction,
    // so this stays tiny) and keep the best feasible one. Ties on r are
    // broken by the lexicographically smallest center.
    const auto edges = polygon_edges(v);
    if (edges.size() > 32) throw ParameterError("polygon limited to 32 edges");
    double best_r = -1.0;
    Point best_x{0.0, 0.0};
    const double feas_eps = 1e-9 * (1.0 + m.perimeter);
    auto consider = [&](double r, const Point& x) {
        if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(x[0]) || !std::isfinite(x[1])) return;
        for (const auto& e : edges)
            if (e.n[0] * x[0] + e.n[1] * x[1] - e.b < r - feas_eps) return;
        const double tie = 1e-9 * (1.0 + std::abs(best_r));
        if (r > best_r + tie) {
            best_r = r;
            best_x = x;
        } else if (std::abs(r - best_r) <= tie) {
            if (x[0] < best_x[0] - 1e-12 ||
                (std::abs(x[0] - best_x[0]) <= 1e-12 && x[1] < best_x[1] - 1e-12)) {
                best_x = x;
            }
        }
    };
    const std::size_t ne = edges.size();
    for (std::size_t i = 0; i < ne; ++i)
        for (std::size_t j = i + 1; j < ne; ++j) {
            for (std::size_t l = j + 1; l < ne; ++l) {
                // solve n_i.x - r = b_i (3 equations, unknowns x, r)
                const Edge es[3] = {edges[i], edges[j], edges[l]};
                double A[3][4];
                for (int row = 0; row < 3; ++row) {
                    A[row][0] = es[row].n[0];
                    A[row][1] = es[row].n[1];
                    A[row][2] = -1.0;
                    A[row][3] = es[row].b;
                }
                // Gaussian elimination with partial pivoting
                bool singular = false;
                for (int col = 0; col < 3 && !singular; ++col) {
                    int piv = col;
                    for (int row = col + 1; row < 3; ++row)
                        if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
                    if (std::abs(A[piv][col]) < 1e-14) {
                        singular = true;
                        break;
                    }
                    std::swap(A[piv], A[col]);
                    for (int row = 0; row < 3; ++row) {
                        if (row == col) continue;
                        const double f = A[row][col] / A[col][col];
                        for (int c2 = col; c2 < 4; ++c2) A[row][c2] -= f * A[col][c2];
                    }
                }
                if (singular) continue;
                consider(A[2][3] / A[2][2], {A[0][3] / A[0][0], A[1][3] / A[1][1]});
            }
            // two active edges: center on the bisector, gradient of r vanishes
            // only when normals are opposite; solve n_i.x - r = b_i with the
            // midpoint direction fixed
            const Point ni = edges[i].n, nj = edges[j].n;
            const double det = ni[0] * nj[1] - ni[1] * nj[0];
            if (std::abs(det) < 1e-12 && ni[0] * nj[0] + ni[1] * nj[1] < 0.0) {
                // opposite parallel edges: r is half the slab width; slide the
                // center along the slab axis to the feasible lex-min handled by
                // vertex-projection candidates below
                const double r = 0.5 * (-edges[i].b - edges[j].b) /* n_j = -n_i */;
                // candidate centers: project each vertex onto the mid-line n_i.x = b_i + r
                for (const auto& p : v) {
                    const double s = ni[0] * p[0] + ni[1] * p[1] - (edges[i].b + r);
                    consider(r, {p[0] - s * ni[0], p[1] - s * ni[1]});
                }
            }
        }
    if (best_r <= 0.0) throw ParameterError("degenerate polygon: empty interior");
    m.inradius = best_r;
    m.incenter = best_x;
    return m;
}

std::vector<Point> ConvexDomain::boundary_sample(int per_edge) const {
    std::vector<Point> pts;
    if (const auto* iv = std::get_if<Interval>(&shape_)) {
        pts.push_back({iv->a, 0.0});
        pts.push_back({iv->b, 0.0});
    } else if (const auto* bx = std::get_if<Box>(&shape_)) {
        pts = {{bx->lo[0], bx->lo[1]}, {bx->hi[0], bx->lo[1]}, {bx->hi[0], bx->hi[1]},
               {bx->lo[0], bx->hi[1]}};
    } else if (const auto* dk = std::get_if<Disk>(&shape_)) {
        for (int i = 0; i < per_edge; ++i) {
            const double a = 2.0 * M_PI * i / per_edge;
            pts.push_back({dk->center[0] + dk->radius * std::cos(a),
                           dk->center[1] + dk->radius * std::sin(a)});
        }
    } else {
        pts = std::get<Polygon>(shape_).vertices;
    }
    return pts;
}

std::string ConvexDomain::describe() const {
    std::ostringstream os;
    if (const auto* iv = std::get_if<Interval>(&shape_))
        os << "interval(" << iv->a << "," << iv->b << ")";
    else if (const auto* bx = std::get_if<Box>(&shape_))
        os << "box(" << bx->lo[0] << "," << bx->lo[1] << ";" << bx->hi[0] << "," << bx->hi[1]
           << ")";
    else if (const auto* dk = std::get_if<Disk>(&shape_))
        os << "disk(" << dk->center[0] << "," << dk->center[1] << ";r=" << dk->radius << ")";
    else
        os << "polygon(k=" << std::get<Polygon>(shape_).vertices.size() << ")";
    return os.str();
}

Grid rasterize(const ConvexDomain& domain, double h, std::size_t node_budget) {
    if (!(h > 0.0)) throw ParameterError("rasterize requires h > 0");
    const auto m = domain.metrics();
    if (h > m.inradius / 2.0 * (1.0 + 1e-12))
        throw ParameterError("rasterize requires h <= inradius/2");
    const auto bb = domain.bounding_box();

    Grid g;
    g.dim = domain.dim();
    g.h = h;
    for (int ax = 0; ax < g.dim; ++ax) {
        const long lo = static_cast<long>(std::floor(bb.lo[ax] / h)) - 1;
        const long hi = static_cast<long>(std::ceil(bb.hi[ax] / h)) + 1;
        g.i0[ax] = lo;
        g.n[ax] = static_cast<int>(hi - lo + 1);
    }
    if (g.dim == 1) {
        g.i0[1] = 0;
        g.n[1] = 1;
    }
    const std::size_t total = g.size();
    if (total > node_budget)
        throw ResourceError("grid of " + std::to_string(total) + " nodes exceeds budget of " +
                            std::to_string(node_budget));
    g.mask.assign(total, 0);
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const Point x{g.coord(0, ix), g.dim == 2 ? g.coord(1, iy) : 0.0};
            if (domain.distance_to_boundary(x) > 0.0) g.mask[g.index(ix, iy)] = 1;
        }
    return g;
}

} // namespace lek::geometry
