#include "lek/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lek/errors.hpp"
#include "lek/onedim.hpp"

namespace lek::verify {

namespace {

double hN_of(const Grid& g) { return g.dim == 1 ? g.h : g.h * g.h; }

bool same_lattice(const Grid& a, const Grid& b) {
    return a.dim == b.dim && a.h == b.h && a.i0 == b.i0 && a.n == b.n;
}

/// h^N sum over mask-touching forward stencils of |grad_h f|^p.
double dirichlet_h(const GridFunction& f, double p) {
    const Grid& g = *f.grid;
    const std::size_t nx = static_cast<std::size_t>(g.n[0]);
    const int ylim = g.dim == 2 ? g.n[1] - 1 : 1;
    double acc = 0.0;
    for (int iy = 0; iy < ylim; ++iy)
        for (int ix = 0; ix + 1 < g.n[0]; ++ix) {
            const std::size_t idx = g.index(ix, iy);
            bool touch = g.mask[idx] || g.mask[idx + 1];
            if (g.dim == 2) touch = touch || g.mask[idx + nx];
            if (!touch) continue;
            const double g1 = (f.values[idx + 1] - f.values[idx]) / g.h;
            const double g2 = g.dim == 2 ? (f.values[idx + nx] - f.values[idx]) / g.h : 0.0;
            const double w2 = g1 * g1 + g2 * g2;
            acc += (p == 2.0) ? w2 : std::pow(w2, 0.5 * p);
        }
    return hN_of(g) * acc;
}

std::pair<GridFunction, pde::SolveReport> run_solver(const geometry::ConvexDomain& domain,
                                                     const pde::PQParams& prm, double h,
                                                     const CheckOptions& opts) {
    auto result = (opts.engine == frequencies::Engine::FixedPoint)
                      ? pde::fixed_point_solve(domain, prm, h, opts.solve)
                      : pde::solve_lane_emden(domain, prm, h, opts.solve);
    if (!result.second.converged)
        throw NumericError("verification solve did not converge on " + domain.describe());
    return result;
}

geometry::Point node_point(const Grid& g, int ix, int iy) {
    return {g.coord(0, ix), g.dim == 2 ? g.coord(1, iy) : 0.0};
}

/// Combines sub-margins with individual tolerances into a single
/// (worst, tol) pair: each margin is rescaled so that margin_i >= -tol_i
/// holds iff the combined worst >= -tol.
struct MarginSet {
    double worst = std::numeric_limits<double>::infinity();
    double tol = 0.0;
    void add(double margin, double tol_i) {
        tol = std::max(tol, tol_i);
        margins.push_back(margin);
        tols.push_back(tol_i);
    }
    void finalize() {
        for (std::size_t i = 0; i < margins.size(); ++i) {
            const double scaled = tols[i] > 0.0 ? margins[i] * (tol / tols[i]) : margins[i];
            worst = std::min(worst, scaled);
        }
        if (margins.empty()) worst = 0.0;
    }
    std::vector<double> margins, tols;
};

} // namespace

VerifyReport check_comparison(const geometry::ConvexDomain& inner,
                              const geometry::ConvexDomain& outer, double p, double q, double h,
                              const CheckOptions& opts) {
    const auto mi = inner.metrics();
    const auto mo = outer.metrics();
    for (const auto& pt : inner.boundary_sample())
        if (outer.distance_to_boundary(pt) < -1e-9 * (1.0 + mo.inradius))
            throw ParameterError("check_comparison: inner domain is not contained in outer");

    const pde::PQParams prm{p, q, 1.0};
    auto [win, rin] = run_solver(inner, prm, h, opts);
    auto [wout, rout] = run_solver(outer, prm, h, opts);
    const Grid& gi = *win.grid;
    const Grid& go = *wout.grid;

    double worst = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < gi.n[1]; ++iy)
        for (int ix = 0; ix < gi.n[0]; ++ix) {
            const std::size_t i = gi.index(ix, iy);
            if (!gi.mask[i]) continue;
            const long jx = gi.i0[0] + ix - go.i0[0];
            const long jy = gi.dim == 2 ? gi.i0[1] + iy - go.i0[1] : 0;
            if (jx < 0 || jx >= go.n[0] || jy < 0 || jy >= go.n[1])
                throw NumericError("check_comparison: inner node fell outside the outer grid");
            worst = std::min(worst,
                             wout.values[go.index(static_cast<int>(jx), static_cast<int>(jy))] -
                                 win.values[i]);
        }

    const double sup = wout.max_interior();
    const double tolsolve = opts.solve.resolved_tol(gi.dim);
    VerifyReport rep;
    rep.check = "comparison";
    rep.worst = worst;
    rep.tol = 10.0 * h * sup / mi.inradius + 10.0 * tolsolve * (1.0 + sup);
    rep.pass = rep.worst >= -rep.tol;
    rep.h = h;
    rep.p = p;
    rep.q = q;
    rep.domain_id = inner.describe() + " in " + outer.describe();
    rep.extra["sup_inner"] = win.max_interior();
    rep.extra["sup_outer"] = sup;
    return rep;
}

VerifyReport check_pointwise_bounds(const geometry::ConvexDomain& domain, double p, double q,
                                    double alpha, double h, const CheckOptions& opts) {
    const auto m = domain.metrics();
    const int N = domain.dim();
    pde::PQParams prm{p, q, alpha};
    auto [w, rep0] = run_solver(domain, prm, h, opts);
    const Grid& g = *w.grid;

    const double ascale = std::pow(alpha, 1.0 / (p - q));
    const double rscale = std::pow(m.inradius, p / (p - q));
    const auto profI = onedim::wI_profile(p, q, 257);
    const auto profB = onedim::wB1_profile(p, q, N, 257);

    double worst_lower = std::numeric_limits<double>::infinity();
    double worst_upper = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (!g.mask[i]) continue;
            const auto x = node_point(g, ix, iy);
            const double dx0 = x[0] - m.incenter[0];
            const double dx1 = g.dim == 2 ? x[1] - m.incenter[1] : 0.0;
            const double rdist = std::sqrt(dx0 * dx0 + dx1 * dx1) / m.inradius;
            const double lower = ascale * rscale * profB.value_at(std::min(rdist, 1.0));
            const double d = domain.distance_to_boundary(x);
            const double upper =
                ascale * rscale * profI.value_at(std::min(d / m.inradius - 1.0, 0.0));
            worst_lower = std::min(worst_lower, w.values[i] - lower);
            worst_upper = std::min(worst_upper, upper - w.values[i]);
        }

    const double sup = w.max_interior();
    VerifyReport rep;
    rep.check = "pointwise-bounds";
    rep.tol = 10.0 * h * sup / m.inradius;
    rep.worst = std::min(worst_lower, worst_upper);
    rep.pass = rep.worst >= -rep.tol;
    rep.h = h;
    rep.p = p;
    rep.q = q;
    rep.alpha = alpha;
    rep.domain_id = domain.describe();
    rep.extra["worst_lower"] = worst_lower;
    rep.extra["worst_upper"] = worst_upper;
    rep.extra["sup"] = sup;
    return rep;
}

VerifyReport check_linfty(const geometry::ConvexDomain& domain, double p, double q, double alpha,
                          double h, const CheckOptions& opts) {
    const auto m = domain.metrics();
    const int N = domain.dim();
    pde::PQParams prm{p, q, alpha};
    auto [w, rep0] = run_solver(domain, prm, h, opts);

    const double ascale = std::pow(alpha, 1.0 / (p - q));
    const double normalized = std::pow(m.inradius, -p / (p - q)) * w.max_interior();
    const double lower = ascale * onedim::wB1_profile(p, q, N, 65).values.front();
    const double upper = ascale * onedim::wI_center(p, q);

    VerifyReport rep;
    rep.check = "linfty";
    rep.tol = 10.0 * h * w.max_interior() / m.inradius * std::pow(m.inradius, -p / (p - q));
    rep.worst = std::min(normalized - lower, upper - normalized);
    rep.pass = rep.worst >= -rep.tol;
    rep.h = h;
    rep.p = p;
    rep.q = q;
    rep.alpha = alpha;
    rep.domain_id = domain.describe();
    rep.extra["normalized_sup"] = normalized;
    rep.extra["ball_lower"] = lower;
    rep.extra["slab_upper"] = upper;
    return rep;
}

VerifyReport check_localization(const geometry::ConvexDomain& domain, double p, double q, double h,
                                const CheckOptions& opts) {
    const auto m = domain.metrics();
    const int N = domain.dim();
    pde::PQParams prm{p, q, 1.0};
    auto [w, rep0] = run_solver(domain, prm, h, opts);
    const Grid& g = *w.grid;

    const double C = onedim::localization_constant(N, p, q);
    const double wmax = w.max_interior();
    const double near = 10.0 * opts.solve.resolved_tol(g.dim) * (1.0 + wmax);

    double worst = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (!g.mask[i] || w.values[i] < wmax - near) continue;
            ++count;
            worst = std::min(worst, domain.distance_to_boundary(node_point(g, ix, iy)) -
                                        C * m.inradius);
        }

    VerifyReport rep;
    rep.check = "localization";
    rep.tol = h;
    rep.worst = worst;
    rep.pass = rep.worst >= -rep.tol;
    rep.h = h;
    rep.p = p;
    rep.q = q;
    rep.domain_id = domain.describe();
    rep.extra["constant"] = C;
    rep.extra["near_max_nodes"] = static_cast<double>(count);
    rep.extra["max_value"] = wmax;
    return rep;
}

VerifyReport check_slab_asymptotics(double p, double q, const std::vector<double>& L_list,
                                    double h, const CheckOptions& opts) {
    if (L_list.size() < 2) throw ParameterError("check_slab_asymptotics requires >= 2 lengths");
    for (std::size_t i = 0; i + 1 < L_list.size(); ++i)
        if (!(L_list[i] <= L_list[i + 1]))
            throw ParameterError("check_slab_asymptotics requires increasing lengths");

    const pde::PQParams prm{p, q, 1.0};
    const double wI0 = onedim::wI_center(p, q);
    const auto profI = onedim::wI_profile(p, q, 257);
    const double tolsolve = opts.solve.resolved_tol(2);

    std::vector<GridFunction> sols;
    std::vector<double> errs;
    VerifyReport rep;
    for (double L : L_list) {
        const auto dom = geometry::ConvexDomain::box({-L / 2.0, -1.0}, {L / 2.0, 1.0});
        auto [w, r0] = run_solver(dom, prm, h, opts);
        const Grid& g = *w.grid;
        double e = 0.0;
        for (int iy = 0; iy < g.n[1]; ++iy)
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const std::size_t i = g.index(ix, iy);
                if (!g.mask[i]) continue;
                if (std::abs(g.coord(0, ix)) > L / 8.0) continue;  // central quarter
                e = std::max(e, std::abs(w.values[i] - profI.value_at(-std::abs(g.coord(1, iy)))));
            }
        errs.push_back(e);
        sols.push_back(std::move(w));
    }

    MarginSet ms;
    // (i) monotone in L at common nodes
    double worst_mono = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
        const Grid& ga = *sols[k].grid;
        const Grid& gb = *sols[k + 1].grid;
        for (int iy = 0; iy < ga.n[1]; ++iy)
            for (int ix = 0; ix < ga.n[0]; ++ix) {
                const std::size_t i = ga.index(ix, iy);
                if (!ga.mask[i]) continue;
                const long jx = ga.i0[0] + ix - gb.i0[0];
                const long jy = ga.i0[1] + iy - gb.i0[1];
                worst_mono = std::min(
                    worst_mono,
                    sols[k + 1].values[gb.index(static_cast<int>(jx), static_cast<int>(jy))] -
                        sols[k].values[i]);
            }
    }
    ms.add(worst_mono, 10.0 * tolsolve * (1.0 + wI0));
    // (ii) central-profile error decreasing in L
    double worst_dec = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < errs.size(); ++k)
        worst_dec = std::min(worst_dec, errs[k] - errs[k + 1]);
    ms.add(worst_dec, 10.0 * tolsolve * (1.0 + wI0));
    // (iii) uniform upper bound w <= w_I(0)
    double worst_upper = std::numeric_limits<double>::infinity();
    for (const auto& w : sols) worst_upper = std::min(worst_upper, wI0 - w.max_interior());
    ms.add(worst_upper, 10.0 * h * wI0);
    ms.finalize();

    rep.check = "slab-asymptotics";
    rep.worst = ms.worst;
    rep.tol = ms.tol;
    rep.pass = rep.worst >= -rep.tol;
    rep.h = h;
    rep.p = p;
    rep.q = q;
    rep.domain_id = "slab family";
    for (std::size_t k = 0; k < errs.size(); ++k)
        rep.extra["central_err_L" + std::to_string(static_cast<long>(L_list[k]))] = errs[k];
    rep.extra["worst_monotone"] = worst_mono;
    rep.extra["worst_decreasing"] = worst_dec;
    rep.extra["worst_upper"] = worst_upper;
    return rep;
}

namespace {

GridFunction sigma_curve(const GridFunction& v, const GridFunction& w, double t, double r) {
    GridFunction s(v.grid);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double a = v.values[i], b = w.values[i];
        if (r == 1.0)
            s.values[i] = (1.0 - t) * a + t * b;
        else
            s.values[i] = std::pow((1.0 - t) * std::pow(a, r) + t * std::pow(b, r), 1.0 / r);
    }
    return s;
}

void validate_pair(const GridFunction& v, const GridFunction& w, double t, double r, double p) {
    if (!v.grid || !w.grid || !same_lattice(*v.grid, *w.grid))
        throw ParameterError("hidden convexity requires functions on the same grid");
    if (t < 0.0 || t > 1.0) throw ParameterError("hidden convexity requires 0 <= t <= 1");
    if (!(r >= 1.0) || !(r <= p))
        throw ParameterError("hidden convexity requires 1 <= r <= p");
    for (std::size_t i = 0; i < v.values.size(); ++i)
        if (v.values[i] < 0.0 || w.values[i] < 0.0)
            throw ParameterError("hidden convexity requires nonnegative functions");
}

} // namespace

VerifyReport check_hidden_convexity(const GridFunction& v, const GridFunction& w, double t,
                                    double r, double p) {
    validate_pair(v, w, t, r, p);
    const Grid& g = *v.grid;
    const GridFunction s = sigma_curve(v, w, t, r);
    const double Dv = dirichlet_h(v, p);
    const double Dw = dirichlet_h(w, p);
    const double Ds = dirichlet_h(s, p);
    const double rhs = (1.0 - t) * Dv + t * Dw;

    VerifyReport rep;
    rep.check = "hidden-convexity";
    rep.worst = rhs - Ds;
    const bool exact = (g.dim == 1) || (r <= 2.0);
    rep.tol = exact ? 1e-12 * std::max(1.0, Dv + Dw) : 10.0 * g.h * (1.0 + Dv + Dw);
    rep.pass = rep.worst >= -rep.tol;
    rep.h = g.h;
    rep.p = p;
    rep.q = r;  // the curve exponent plays the role of q here
    rep.domain_id = g.dim == 1 ? "grid-1d" : "grid-2d";
    rep.extra["dirichlet_sigma"] = Ds;
    rep.extra["dirichlet_rhs"] = rhs;
    rep.extra["zero_slack"] = exact ? 1.0 : 0.0;
    return rep;
}

VerifyReport check_equality_cases(const GridFunction& v, const GridFunction& w, double t,
                                  double r, double p) {
    validate_pair(v, w, t, r, p);
    const Grid& g = *v.grid;
    double scale = std::max(v.max_abs(), w.max_abs());
    if (scale == 0.0) scale = 1.0;

    // detect the structural relation between v and w on interior nodes
    double vw = 0.0, ww = 0.0, diff_sum = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        vw += v.values[i] * w.values[i];
        ww += w.values[i] * w.values[i];
        diff_sum += v.values[i] - w.values[i];
    }
    const double C_prop = ww > 0.0 ? vw / ww : 0.0;
    const double C_add = diff_sum / static_cast<double>(v.values.size());
    double dev_prop = 0.0, dev_add = 0.0, dev_eq = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        dev_prop = std::max(dev_prop, std::abs(v.values[i] - C_prop * w.values[i]));
        dev_add = std::max(dev_add, std::abs(v.values[i] - w.values[i] - C_add));
        dev_eq = std::max(dev_eq, std::abs(v.values[i] - w.values[i]));
    }
    const double detect = 1e-12 * scale;
    const bool equal = dev_eq <= detect;
    const bool proportional = dev_prop <= detect && C_prop > 0.0;
    const bool additive = dev_add <= detect;

    bool expect_equality = false;
    if (r == 1.0)
        expect_equality = additive;
    else if (r < p)
        expect_equality = equal;
    else  // r == p
        expect_equality = proportional;

    const GridFunction s = sigma_curve(v, w, t, r);
    const double rhs = (1.0 - t) * dirichlet_h(v, p) + t * dirichlet_h(w, p);
    const double gap = rhs - dirichlet_h(s, p);

    VerifyReport rep;
    rep.check = "equality-cases";
    rep.h = g.h;
    rep.p = p;
    rep.q = r;
    rep.domain_id = g.dim == 1 ? "grid-1d" : "grid-2d";
    if (expect_equality) {
        rep.worst = -std::abs(gap);
        rep.tol = 1e-10 * std::max(1.0, rhs);
    } else {
        // strict inequality expected: a positive gap is required
        rep.worst = gap;
        rep.tol = -1e-14 * std::max(1.0, rhs);
    }
    rep.pass = rep.worst >= -rep.tol;
    rep.extra["gap"] = gap;
    rep.extra["expected_equality"] = expect_equality ? 1.0 : 0.0;
    return rep;
}

VerifyReport check_hersch_protter(const geometry::ConvexDomain& domain, double p, double q,
                                  double h, const CheckOptions& opts) {
    frequencies::FrequencyOptions fopts;
    fopts.engine = opts.engine;
    fopts.solve = opts.solve;
    const auto fr = frequencies::lambda_pq(domain, p, q, h, fopts);

    VerifyReport rep;
    rep.check = "hersch-protter";
    rep.worst = fr.normalized_gap;
    rep.tol = std::max(0.02, 10.0 * h);
    rep.pass = rep.worst >= -rep.tol;
    rep.h = h;
    rep.p = p;
    rep.q = q;
    rep.domain_id = domain.describe();
    rep.extra["lambda"] = fr.lambda;
    rep.extra["mass"] = fr.mass;
    rep.extra["ratio"] = fr.normalized_gap + 1.0;
    rep.extra["perimeter_upper"] = frequencies::perimeter_upper_bound(domain, p, q);
    return rep;
}

namespace {

double norm_of(std::span<const double> z) {
    double s = 0.0;
    for (double c : z) s += c * c;
    return std::sqrt(s);
}

} // namespace

double quantified_gap_r_ge2(std::span<const double> z, std::span<const double> w, double t,
                            double r) {
    if (!(r >= 2.0)) throw ParameterError("quantified_gap_r_ge2 requires r >= 2");
    if (!(t > 0.0) || !(t < 1.0)) throw ParameterError("quantified gap requires 0 < t < 1");
    if (z.size() != w.size()) throw ParameterError("quantified gap requires equal dimensions");
    std::vector<double> mid(z.size()), diff(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        mid[i] = t * z[i] + (1.0 - t) * w[i];
        diff[i] = z[i] - w[i];
    }
    const double dn = norm_of(diff);
    if (dn == 0.0) throw ParameterError("quantified gap undefined for z = w");
    const double num =
        t * std::pow(norm_of(z), r) + (1.0 - t) * std::pow(norm_of(w), r) - std::pow(norm_of(mid), r);
    return num / (t * (1.0 - t) * std::pow(dn, r));
}

double quantified_gap_r_lt2(std::span<const double> z, std::span<const double> w, double t,
                            double r) {
    if (!(r > 1.0) || !(r < 2.0)) throw ParameterError("quantified_gap_r_lt2 requires 1 < r < 2");
    if (!(t > 0.0) || !(t < 1.0)) throw ParameterError("quantified gap requires 0 < t < 1");
    if (z.size() != w.size()) throw ParameterError("quantified gap requires equal dimensions");
    std::vector<double> mid(z.size()), diff(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        mid[i] = t * z[i] + (1.0 - t) * w[i];
        diff[i] = z[i] - w[i];
    }
    const double zn = norm_of(z), wn = norm_of(w), dn = norm_of(diff);
    if (dn == 0.0) throw ParameterError("quantified gap undefined for z = w");
    if (zn == 0.0 && wn == 0.0) throw ParameterError("quantified gap undefined for z = w = 0");
    const double num = t * std::pow(zn, r) + (1.0 - t) * std::pow(wn, r) - std::pow(norm_of(mid), r);
    const double den =
        t * (1.0 - t) * std::pow(zn * zn + wn * wn, 0.5 * (r - 2.0)) * dn * dn;
    return num / den;
}

} // namespace lek::verify
