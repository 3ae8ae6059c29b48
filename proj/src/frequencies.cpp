#include "lek/frequencies.hpp"

#include <algorithm>
#include <cmath>

#include "lek/errors.hpp"
#include "lek/onedim.hpp"
#include "lek/parallel.hpp"

namespace lek::frequencies {

namespace {

std::pair<GridFunction, pde::SolveReport> run_solver(const geometry::ConvexDomain& domain,
                                                     const pde::PQParams& prm, double h,
                                                     const FrequencyOptions& opts) {
    if (opts.engine == Engine::FixedPoint)
        return pde::fixed_point_solve(domain, prm, h, opts.solve);
    return pde::solve_lane_emden(domain, prm, h, opts.solve);
}

} // namespace

FrequencyResult lambda_pq(const geometry::ConvexDomain& domain, double p, double q, double h,
                          const FrequencyOptions& opts) {
    const pde::PQParams prm{p, q, 1.0};
    prm.validate();
    auto [w, rep] = run_solver(domain, prm, h, opts);
    if (!rep.converged)
        throw NumericError("lambda_pq: solver did not converge on " + domain.describe());
    const Grid& g = *w.grid;
    const double hN = g.dim == 1 ? g.h : g.h * g.h;
    double mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask[i]) mass += (q == 1.0) ? w.values[i] : std::pow(std::max(w.values[i], 0.0), q);
    mass *= hN;
    if (!(mass > 0.0)) throw NumericError("lambda_pq: vanishing solution mass");

    FrequencyResult res;
    res.mass = mass;
    res.lambda = std::pow(mass, -(p - q) / q);
    const auto m = domain.metrics();
    res.normalized_gap = res.lambda * std::pow(m.area, (p - q) / q) * std::pow(m.inradius, p) *
                             std::pow(2.0 / onedim::pi_pq(p, q), p) -
                         1.0;
    res.solution = std::move(w);
    return res;
}

double rayleigh_quotient(const GridFunction& f, double p, double q) {
    if (!(p > 1.0) || !(q >= 1.0)) throw ParameterError("rayleigh_quotient requires p > 1, q >= 1");
    const Grid& g = *f.grid;
    const double h = g.h;
    const double hN = g.dim == 1 ? h : h * h;
    const std::size_t nx = static_cast<std::size_t>(g.n[0]);
    double dir = 0.0;
    const int ylim = g.dim == 2 ? g.n[1] - 1 : 1;
    for (int iy = 0; iy < ylim; ++iy)
        for (int ix = 0; ix + 1 < g.n[0]; ++ix) {
            const std::size_t idx = g.index(ix, iy);
            bool touch = g.mask[idx] || g.mask[idx + 1];
            if (g.dim == 2) touch = touch || g.mask[idx + nx];
            if (!touch) continue;
            const double g1 = (f.values[idx + 1] - f.values[idx]) / h;
            const double g2 = g.dim == 2 ? (f.values[idx + nx] - f.values[idx]) / h : 0.0;
            const double w2 = g1 * g1 + g2 * g2;
            dir += (p == 2.0) ? w2 : std::pow(w2, 0.5 * p);
        }
    double lower = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask[i]) lower += (q == 1.0) ? std::abs(f.values[i]) : std::pow(std::abs(f.values[i]), q);
    if (!(lower > 0.0)) throw ParameterError("rayleigh_quotient requires f not identically zero");
    return hN * dir / std::pow(hN * lower, p / q);
}

double hersch_protter_lower(const geometry::ConvexDomain& domain, double p, double q) {
    const auto m = domain.metrics();
    return std::pow(onedim::pi_pq(p, q) / 2.0, p) / std::pow(m.inradius, p) /
           std::pow(m.area, (p - q) / q);
}

double perimeter_upper_bound(const geometry::ConvexDomain& domain, double p, double q) {
    const auto m = domain.metrics();
    return std::pow(onedim::pi_pq(p, q) / 2.0, p) *
           std::pow(m.perimeter / std::pow(m.area, 1.0 - 1.0 / p + 1.0 / q), p);
}

double hersch_protter_ratio(const geometry::ConvexDomain& domain, double p, double q, double h,
                            const FrequencyOptions& opts) {
    return lambda_pq(domain, p, q, h, opts).normalized_gap + 1.0;
}

ScanResult continuity_scan(const geometry::ConvexDomain& domain, double p,
                           const std::vector<double>& q_list, double h,
                           const FrequencyOptions& opts) {
    if (q_list.empty()) throw ParameterError("continuity_scan requires a nonempty q list");
    for (std::size_t i = 0; i + 1 < q_list.size(); ++i)
        if (!(q_list[i] < q_list[i + 1]))
            throw ParameterError("continuity_scan requires a strictly increasing q list");
    if (!(q_list.front() >= 1.0) || !(q_list.back() < p))
        throw ParameterError("continuity_scan requires q values in [1, p)");

    ScanResult out;
    out.rows.resize(q_list.size());
    out.bracket_margin = std::max(0.02, 10.0 * h);
    const auto metrics = domain.metrics();
    parallel_for(q_list.size(), [&](std::size_t i) {
        const double q = q_list[i];
        ScanRow row;
        row.q = q;
        const auto fr = lambda_pq(domain, p, q, h, opts);
        row.lambda = fr.lambda;
        row.ratio = fr.normalized_gap + 1.0;
        row.hp_lower = hersch_protter_lower(domain, p, q);
        row.perim_upper = perimeter_upper_bound(domain, p, q);
        row.bracket_ok = row.lambda >= row.hp_lower * (1.0 - out.bracket_margin) &&
                         row.lambda <= row.perim_upper * (1.0 + out.bracket_margin);
        out.rows[i] = row;
    });
    out.all_bracketed = true;
    for (const auto& r : out.rows) out.all_bracketed = out.all_bracketed && r.bracket_ok;
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        const double ni = out.rows[i].lambda * std::pow(metrics.area, (p - out.rows[i].q) / out.rows[i].q);
        const double nj =
            out.rows[i + 1].lambda * std::pow(metrics.area, (p - out.rows[i + 1].q) / out.rows[i + 1].q);
        out.max_normalized_jump = std::max(out.max_normalized_jump, std::abs(nj - ni));
    }
    return out;
}

} // namespace lek::frequencies
