#include "lek/io.hpp"

#include <cstdio>
#include <fstream>

#include "lek/errors.hpp"

namespace lek::io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

geometry::ConvexDomain domain_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "interval")
            return geometry::ConvexDomain::interval(j.at("a").get<double>(), j.at("b").get<double>());
        if (type == "box") {
            const auto lo = j.at("min").get<std::vector<double>>();
            const auto hi = j.at("max").get<std::vector<double>>();
            if (lo.size() == 1 && hi.size() == 1)
                return geometry::ConvexDomain::interval(lo[0], hi[0]);
            if (lo.size() != 2 || hi.size() != 2)
                throw ParameterError("box expects 2-component min/max");
            return geometry::ConvexDomain::box({lo[0], lo[1]}, {hi[0], hi[1]});
        }
        if (type == "disk") {
            const auto c = j.at("center").get<std::vector<double>>();
            if (c.size() != 2) throw ParameterError("disk expects a 2-component center");
            return geometry::ConvexDomain::disk({c[0], c[1]}, j.at("radius").get<double>());
        }
        if (type == "polygon") {
            std::vector<geometry::Point> verts;
            for (const auto& v : j.at("vertices")) {
                const auto p = v.get<std::vector<double>>();
                if (p.size() != 2) throw ParameterError("polygon vertices must be 2D points");
                verts.push_back({p[0], p[1]});
            }
            return geometry::ConvexDomain::polygon(std::move(verts));
        }
        throw ParameterError("unknown domain type '" + type + "'");
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed domain description: ") + e.what());
    }
}

geometry::ConvexDomain load_domain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open domain file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParameterError("invalid JSON in '" + path + "': " + std::string(e.what()));
    }
    return domain_from_json(j);
}

json domain_to_json(const geometry::ConvexDomain& d) {
    json j;
    if (const auto* iv = std::get_if<geometry::ConvexDomain::Interval>(&d.shape())) {
        j["type"] = "interval";
        j["a"] = iv->a;
        j["b"] = iv->b;
    } else if (const auto* bx = std::get_if<geometry::ConvexDomain::Box>(&d.shape())) {
        j["type"] = "box";
        j["min"] = {bx->lo[0], bx->lo[1]};
        j["max"] = {bx->hi[0], bx->hi[1]};
    } else if (const auto* dk = std::get_if<geometry::ConvexDomain::Disk>(&d.shape())) {
        j["type"] = "disk";
        j["center"] = {dk->center[0], dk->center[1]};
        j["radius"] = dk->radius;
    } else {
        const auto& poly = std::get<geometry::ConvexDomain::Polygon>(d.shape());
        j["type"] = "polygon";
        json verts = json::array();
        for (const auto& v : poly.vertices) verts.push_back({v[0], v[1]});
        j["vertices"] = verts;
    }
    return j;
}

json report_to_json(const verify::VerifyReport& rep) {
    json j;
    j["check"] = rep.check;
    j["pass"] = rep.pass;
    j["worst"] = rep.worst;
    j["tol"] = rep.tol;
    j["h"] = rep.h;
    j["p"] = rep.p;
    j["q"] = rep.q;
    j["alpha"] = rep.alpha;
    j["domain"] = rep.domain_id;
    if (!rep.extra.empty()) {
        json e;
        for (const auto& [k, v] : rep.extra) e[k] = v;
        j["extra"] = e;
    }
    return j;
}

void write_solution_csv(const std::string& path, const GridFunction& f) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open output file '" + path + "'");
    const Grid& g = *f.grid;
    out << (g.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (!g.mask[i]) continue;
            out << format_double(g.coord(0, ix));
            if (g.dim == 2) out << ',' << format_double(g.coord(1, iy));
            out << ',' << format_double(f.values[i]) << '\n';
        }
}

void write_profile_csv(const std::string& path, const onedim::Profile1D& prof) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open output file '" + path + "'");
    out << (prof.kind == onedim::Profile1D::Kind::IntervalHalf ? "t,value\n" : "r,value\n");
    for (std::size_t i = 0; i < prof.abscissae.size(); ++i)
        out << format_double(prof.abscissae[i]) << ',' << format_double(prof.values[i]) << '\n';
}

void write_scan_csv(const std::string& path, const frequencies::ScanResult& scan) {
    std::ofstream out(path);
    if (!out) throw ParameterError("cannot open output file '" + path + "'");
    out << "q,lambda,hp_lower,perim_upper,ratio\n";
    for (const auto& r : scan.rows)
        out << format_double(r.q) << ',' << format_double(r.lambda) << ','
            << format_double(r.hp_lower) << ',' << format_double(r.perim_upper) << ','
            << format_double(r.ratio) << '\n';
}

} // namespace lek::io
