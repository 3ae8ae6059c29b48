// lek: Lane-Emden solves, sharp constants, principal frequencies, and
// inequality verification for the p-Laplacian on convex domains.
//
// Exit codes: 0 success/pass, 1 verification failure, 2 usage error,
// 3 numeric non-convergence.

#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lek/errors.hpp"
#include "lek/frequencies.hpp"
#include "lek/geometry.hpp"
#include "lek/io.hpp"
#include "lek/onedim.hpp"
#include "lek/pde.hpp"
#include "lek/verify.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 20260811ULL;

struct CommonSolveFlags {
    std::string domain_path;
    double p = 2.0, q = 1.0, alpha = 1.0, h = 0.03125;
    double tol = 0.0;
    long max_iters = 200000;
    std::string solver = "minimize";
    std::string init = "supersolution";
    double init_constant = 0.01;
    bool json_out = false;
};

CLI::App* make_subcommand(CLI::App& app, const std::string& name, const std::string& desc) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", "print help and exit");
    return cmd;
}

void add_exponent_flags(CLI::App* cmd, CommonSolveFlags& f, bool with_alpha = true) {
    cmd->add_option("--p", f.p, "exponent p (1 < p)")->required();
    cmd->add_option("--q", f.q, "exponent q (1 <= q < p)")->required();
    if (with_alpha) cmd->add_option("--alpha", f.alpha, "source multiplier alpha > 0");
}

void add_grid_flags(CLI::App* cmd, CommonSolveFlags& f) {
    cmd->add_option("--h", f.h, "grid spacing (must satisfy h <= inradius/4)")->required();
    cmd->add_option("--tol", f.tol, "solver tolerance override (default 1e-8 1D, 1e-6 2D)");
    cmd->add_option("--max-iters", f.max_iters, "iteration cap for the descent solver");
    cmd->add_option("--solver", f.solver, "solver engine: minimize | fixed-point")
        ->check(CLI::IsMember({"minimize", "fixed-point"}));
    cmd->add_option("--init", f.init,
                    "descent initialization: supersolution | constant | distance | torsion")
        ->check(CLI::IsMember({"supersolution", "constant", "distance", "torsion"}));
    cmd->add_option("--init-constant", f.init_constant, "value for --init constant");
}

lek::pde::SolveOptions solve_options(const CommonSolveFlags& f) {
    lek::pde::SolveOptions opts;
    opts.tol = f.tol;
    opts.max_iterations = f.max_iters;
    opts.init_constant = f.init_constant;
    if (f.init == "constant") opts.init = lek::pde::InitKind::Constant;
    else if (f.init == "distance") opts.init = lek::pde::InitKind::Distance;
    else if (f.init == "torsion") opts.init = lek::pde::InitKind::Torsion;
    else opts.init = lek::pde::InitKind::Supersolution;
    return opts;
}

lek::verify::CheckOptions check_options(const CommonSolveFlags& f) {
    lek::verify::CheckOptions opts;
    opts.solve = solve_options(f);
    opts.engine = f.solver == "fixed-point" ? lek::frequencies::Engine::FixedPoint
                                            : lek::frequencies::Engine::Minimize;
    return opts;
}

void emit_report(const lek::verify::VerifyReport& rep, bool as_json) {
    if (as_json) {
        std::cout << lek::io::report_to_json(rep).dump(2) << "\n";
        return;
    }
    std::printf("%s: %s  worst=%s  tol=%s  (h=%s, p=%g, q=%g, domain=%s)\n", rep.check.c_str(),
                rep.pass ? "pass" : "FAIL", lek::io::format_double(rep.worst).c_str(),
                lek::io::format_double(rep.tol).c_str(), lek::io::format_double(rep.h).c_str(),
                rep.p, rep.q, rep.domain_id.c_str());
    for (const auto& [k, v] : rep.extra)
        std::printf("  %s = %s\n", k.c_str(), lek::io::format_double(v).c_str());
}

int run(int argc, char** argv) {
    CLI::App app{"Lane-Emden solver and geometric-inequality verifier for the p-Laplacian"};
    // grid spacing is exposed as --h, so help lives on --help only
    app.set_help_flag("--help", "print help and exit");
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    std::uint64_t seed = kDefaultSeed;
    app.add_option("--seed", seed, "seed for all randomized sampling");

    // constants
    double cp = 2.0, cq = 1.0;
    int cN = 2;
    int csamples = 257;
    std::string wi_csv, wb1_csv;
    auto* constants = make_subcommand(app, "constants", "closed-form constants for (p, q, N)");
    constants->add_option("--p", cp)->required();
    constants->add_option("--q", cq)->required();
    constants->add_option("--N", cN, "dimension for ball/localization constants");
    constants->add_option("--samples", csamples, "profile sample count (>= 16)");
    constants->add_option("--wi-csv", wi_csv, "write the interval profile as t,value CSV");
    constants->add_option("--wb1-csv", wb1_csv, "write the radial profile as r,value CSV");

    // solve
    CommonSolveFlags sf;
    std::string out_path;
    auto* solve = make_subcommand(app, "solve", "compute the positive solution on a grid");
    solve->add_option("--domain", sf.domain_path, "domain description JSON")->required();
    add_exponent_flags(solve, sf);
    add_grid_flags(solve, sf);
    solve->add_option("--out", out_path, "write the solution as CSV (x[,y],value)");
    solve->add_flag("--json", sf.json_out, "machine-readable report");

    // lambda
    CommonSolveFlags lf;
    auto* lambda = make_subcommand(app, "lambda", "generalized principal frequency lambda_{p,q}");
    lambda->add_option("--domain", lf.domain_path)->required();
    add_exponent_flags(lambda, lf, false);
    lf.solver = "fixed-point";
    add_grid_flags(lambda, lf);
    lambda->add_flag("--json", lf.json_out);

    // verify
    CommonSolveFlags vf;
    vf.solver = "fixed-point";
    std::string outer_path;
    double vr = 1.5, vt = 0.5;
    int trials = 1000;
    auto* verify = make_subcommand(app, "verify", "inequality checks");
    verify->require_subcommand(1);
    auto add_verify_common = [&](CLI::App* c, bool needs_domain) {
        if (needs_domain) c->add_option("--domain", vf.domain_path)->required();
        c->add_option("--p", vf.p)->required();
        c->add_option("--q", vf.q)->required();
        c->add_option("--alpha", vf.alpha);
        add_grid_flags(c, vf);
        c->add_flag("--json", vf.json_out);
    };
    auto* v_cmp = make_subcommand(*verify, "comparison", "w_inner <= w_outer for nested domains");
    v_cmp->add_option("--outer", outer_path, "outer domain JSON")->required();
    add_verify_common(v_cmp, true);
    auto* v_pw = make_subcommand(*verify, "pointwise", "double-sided pointwise bounds");
    add_verify_common(v_pw, true);
    auto* v_li = make_subcommand(*verify, "linfty", "double-sided sup-norm bounds");
    add_verify_common(v_li, true);
    auto* v_loc = make_subcommand(*verify, "localization", "maximum-point depth bound");
    add_verify_common(v_loc, true);
    auto* v_hp = make_subcommand(*verify, "hersch-protter", "frequency lower bound");
    add_verify_common(v_hp, true);
    auto* v_hc = make_subcommand(*verify, "hidden-convexity",
                                        "Dirichlet convexity along nonlinear interpolation");
    v_hc->add_option("--r", vr, "curve exponent (1 <= r <= p)");
    v_hc->add_option("--t", vt, "interpolation parameter in [0,1]");
    v_hc->add_option("--trials", trials, "number of random pairs");
    add_verify_common(v_hc, true);
    auto* v_gap = make_subcommand(*verify, "gaps", "quantified convexity gap sampling");
    v_gap->add_option("--r", vr, "power exponent (> 1)")->required();
    v_gap->add_option("--trials", trials, "number of random samples");
    v_gap->add_flag("--json", vf.json_out);

    // slab
    CommonSolveFlags bf;
    bf.solver = "fixed-point";
    std::vector<double> L_list{2.0, 4.0, 8.0, 16.0};
    auto* slab = make_subcommand(app, "slab", "slab family asymptotics");
    slab->add_option("--p", bf.p)->required();
    slab->add_option("--q", bf.q)->required();
    slab->add_option("--L", L_list, "increasing slab lengths");
    add_grid_flags(slab, bf);
    slab->add_flag("--json", bf.json_out);

    // scan
    CommonSolveFlags cf;
    cf.solver = "fixed-point";
    std::vector<double> q_list;
    std::string scan_out;
    auto* scan = make_subcommand(app, "scan", "lambda_{p,q} over a q list with brackets");
    scan->add_option("--domain", cf.domain_path)->required();
    scan->add_option("--p", cf.p)->required();
    scan->add_option("--q-list", q_list, "strictly increasing q values in [1, p)")->required();
    add_grid_flags(scan, cf);
    scan->add_option("--out", scan_out, "write the scan table as CSV");
    scan->add_flag("--json", cf.json_out);

    CLI11_PARSE(app, argc, argv);

    if (constants->parsed()) {
        json j;
        j["p"] = cp;
        j["q"] = cq;
        j["N"] = cN;
        j["pi_pq"] = lek::onedim::pi_pq(cp, cq);
        j["lambda_interval_halfwidth1"] = lek::onedim::lambda_pq_interval(cp, cq, 1.0);
        j["wI_center"] = lek::onedim::wI_center(cp, cq);
        j["wI_mass"] = lek::onedim::wI_mass(cp, cq);
        j["wB1_center"] = lek::onedim::wB1_profile(cp, cq, cN, 65).values.front();
        j["localization_constant"] = lek::onedim::localization_constant(cN, cp, cq);
        if (cq == 1.0)
            j["localization_constant_closed"] = lek::onedim::localization_constant_q1_closed(cN, cp);
        j["consistency_identity"] = lek::onedim::consistency_identity(cp, cq);
        if (!wi_csv.empty())
            lek::io::write_profile_csv(wi_csv, lek::onedim::wI_profile(cp, cq, csamples));
        if (!wb1_csv.empty())
            lek::io::write_profile_csv(wb1_csv, lek::onedim::wB1_profile(cp, cq, cN, csamples));
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (solve->parsed()) {
        const auto dom = lek::io::load_domain(sf.domain_path);
        const lek::pde::PQParams prm{sf.p, sf.q, sf.alpha};
        auto opts = solve_options(sf);
        auto [u, rep] = sf.solver == "fixed-point"
                            ? lek::pde::fixed_point_solve(dom, prm, sf.h, opts)
                            : lek::pde::solve_lane_emden(dom, prm, sf.h, opts);
        if (!out_path.empty()) lek::io::write_solution_csv(out_path, u);
        if (sf.json_out) {
            json j;
            j["domain"] = dom.describe();
            j["p"] = sf.p;
            j["q"] = sf.q;
            j["alpha"] = sf.alpha;
            j["h"] = sf.h;
            j["max_value"] = u.max_interior();
            j["iterations"] = rep.iterations;
            j["energy"] = rep.energy;
            j["residual"] = rep.residual;
            j["converged"] = rep.converged;
            std::cout << j.dump(2) << "\n";
        } else {
            std::printf("domain %s  p=%g q=%g alpha=%g h=%s\n", dom.describe().c_str(), sf.p,
                        sf.q, sf.alpha, lek::io::format_double(sf.h).c_str());
            std::printf("max value  %s\n", lek::io::format_double(u.max_interior()).c_str());
            std::printf("energy     %s\n", lek::io::format_double(rep.energy).c_str());
            std::printf("residual   %s after %ld iterations (%s)\n",
                        lek::io::format_double(rep.residual).c_str(), rep.iterations,
                        rep.converged ? "converged" : "NOT converged");
        }
        return rep.converged ? 0 : 3;
    }

    if (lambda->parsed()) {
        const auto dom = lek::io::load_domain(lf.domain_path);
        lek::frequencies::FrequencyOptions fopts;
        fopts.engine = lf.solver == "minimize" ? lek::frequencies::Engine::Minimize
                                               : lek::frequencies::Engine::FixedPoint;
        fopts.solve = solve_options(lf);
        const auto fr = lek::frequencies::lambda_pq(dom, lf.p, lf.q, lf.h, fopts);
        json j;
        j["domain"] = dom.describe();
        j["p"] = lf.p;
        j["q"] = lf.q;
        j["h"] = lf.h;
        j["lambda"] = fr.lambda;
        j["mass"] = fr.mass;
        j["hersch_protter_ratio"] = fr.normalized_gap + 1.0;
        j["hp_lower"] = lek::frequencies::hersch_protter_lower(dom, lf.p, lf.q);
        j["perimeter_upper"] = lek::frequencies::perimeter_upper_bound(dom, lf.p, lf.q);
        if (lf.json_out)
            std::cout << j.dump(2) << "\n";
        else
            for (const auto& [k, v] : j.items()) std::cout << k << " = " << v << "\n";
        return 0;
    }

    if (verify->parsed()) {
        const auto opts = check_options(vf);
        lek::verify::VerifyReport rep;
        if (v_cmp->parsed()) {
            rep = lek::verify::check_comparison(lek::io::load_domain(vf.domain_path),
                                                lek::io::load_domain(outer_path), vf.p, vf.q,
                                                vf.h, opts);
        } else if (v_pw->parsed()) {
            rep = lek::verify::check_pointwise_bounds(lek::io::load_domain(vf.domain_path), vf.p,
                                                      vf.q, vf.alpha, vf.h, opts);
        } else if (v_li->parsed()) {
            rep = lek::verify::check_linfty(lek::io::load_domain(vf.domain_path), vf.p, vf.q,
                                            vf.alpha, vf.h, opts);
        } else if (v_loc->parsed()) {
            rep = lek::verify::check_localization(lek::io::load_domain(vf.domain_path), vf.p,
                                                  vf.q, vf.h, opts);
        } else if (v_hp->parsed()) {
            rep = lek::verify::check_hersch_protter(lek::io::load_domain(vf.domain_path), vf.p,
                                                    vf.q, vf.h, opts);
        } else if (v_hc->parsed()) {
            const auto dom = lek::io::load_domain(vf.domain_path);
            auto grid = std::make_shared<const lek::Grid>(lek::geometry::rasterize(dom, vf.h));
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            rep.check = "hidden-convexity";
            rep.worst = 1e300;
            rep.pass = true;
            for (int k = 0; k < trials; ++k) {
                lek::GridFunction a(grid), b(grid);
                for (std::size_t i = 0; i < grid->size(); ++i)
                    if (grid->mask[i]) {
                        a.values[i] = uni(rng);
                        b.values[i] = uni(rng);
                    }
                const auto r1 = lek::verify::check_hidden_convexity(a, b, vt, vr, vf.p);
                if (r1.worst < rep.worst) {
                    const bool keep_pass = rep.pass;
                    rep = r1;
                    rep.pass = keep_pass && r1.pass;
                } else {
                    rep.pass = rep.pass && r1.pass;
                }
            }
            rep.extra["trials"] = trials;
            rep.domain_id = dom.describe();
        } else if (v_gap->parsed()) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> uni(-1.0, 1.0);
            double inf = 1e300;
            long used = 0;
            for (int k = 0; k < trials; ++k) {
                std::array<double, 2> z{uni(rng), uni(rng)}, w{uni(rng), uni(rng)};
                const double t = 0.01 + 0.98 * 0.5 * (1.0 + uni(rng));
                if (std::hypot(z[0] - w[0], z[1] - w[1]) < 1e-9) continue;
                if (vr < 2.0 && std::hypot(z[0], z[1]) + std::hypot(w[0], w[1]) < 1e-9) continue;
                const double g = vr >= 2.0 ? lek::verify::quantified_gap_r_ge2(z, w, t, vr)
                                           : lek::verify::quantified_gap_r_lt2(z, w, t, vr);
                inf = std::min(inf, g);
                ++used;
            }
            rep.check = "quantified-gap";
            rep.worst = used > 0 ? inf : 0.0;
            rep.tol = -1e-12;  // pass requires a strictly positive infimum
            rep.pass = used > 0 && inf > 1e-12;
            rep.p = vr;
            rep.q = vr;
            rep.domain_id = "vector samples";
            rep.extra["samples"] = static_cast<double>(used);
        }
        emit_report(rep, vf.json_out);
        return rep.pass ? 0 : 1;
    }

    if (slab->parsed()) {
        const auto opts = check_options(bf);
        const auto rep = lek::verify::check_slab_asymptotics(bf.p, bf.q, L_list, bf.h, opts);
        emit_report(rep, bf.json_out);
        return rep.pass ? 0 : 1;
    }

    if (scan->parsed()) {
        const auto dom = lek::io::load_domain(cf.domain_path);
        lek::frequencies::FrequencyOptions fopts;
        fopts.engine = cf.solver == "minimize" ? lek::frequencies::Engine::Minimize
                                               : lek::frequencies::Engine::FixedPoint;
        fopts.solve = solve_options(cf);
        const auto res = lek::frequencies::continuity_scan(dom, cf.p, q_list, cf.h, fopts);
        if (!scan_out.empty()) lek::io::write_scan_csv(scan_out, res);
        if (cf.json_out) {
            json rows = json::array();
            for (const auto& r : res.rows)
                rows.push_back({{"q", r.q},
                                {"lambda", r.lambda},
                                {"hp_lower", r.hp_lower},
                                {"perim_upper", r.perim_upper},
                                {"ratio", r.ratio},
                                {"bracket_ok", r.bracket_ok}});
            json j;
            j["rows"] = rows;
            j["max_normalized_jump"] = res.max_normalized_jump;
            j["all_bracketed"] = res.all_bracketed;
            std::cout << j.dump(2) << "\n";
        } else {
            std::printf("q,lambda,hp_lower,perim_upper,ratio\n");
            for (const auto& r : res.rows)
                std::printf("%s,%s,%s,%s,%s\n", lek::io::format_double(r.q).c_str(),
                            lek::io::format_double(r.lambda).c_str(),
                            lek::io::format_double(r.hp_lower).c_str(),
                            lek::io::format_double(r.perim_upper).c_str(),
                            lek::io::format_double(r.ratio).c_str());
        }
        return res.all_bracketed ? 0 : 1;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const lek::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const lek::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const lek::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
