#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lek/frequencies.hpp"
#include "lek/pde.hpp"

namespace lek::verify {

/// Executable certificate for one inequality check.
/// The pass predicate is exactly `worst >= -tol`.
struct VerifyReport {
    std::string check;
    bool pass = false;
    double worst = 0.0;  // signed worst violation (positive = margin)
    double tol = 0.0;
    double h = 0.0;
    double p = 0.0;
    double q = 0.0;
    double alpha = 1.0;
    std::string domain_id;
    std::map<std::string, double> extra;  // per-check diagnostics
};

struct CheckOptions {
    frequencies::Engine engine = frequencies::Engine::FixedPoint;
    pde::SolveOptions solve;
};

/// Comparison principle on nested domains: w_inner <= w_outer at every
/// interior node of the inner grid (same lattice).
VerifyReport check_comparison(const geometry::ConvexDomain& inner,
                              const geometry::ConvexDomain& outer, double p, double q, double h,
                              const CheckOptions& opts = {});

/// Double-sided pointwise estimate: scaled ball profile below, scaled
/// interval profile of the boundary distance above.
VerifyReport check_pointwise_bounds(const geometry::ConvexDomain& domain, double p, double q,
                                    double alpha, double h, const CheckOptions& opts = {});

/// Double-sided sup-norm estimate.
VerifyReport check_linfty(const geometry::ConvexDomain& domain, double p, double q, double alpha,
                          double h, const CheckOptions& opts = {});

/// Maximum points sit at depth >= C_{N,p,q} * inradius.
VerifyReport check_localization(const geometry::ConvexDomain& domain, double p, double q, double h,
                                const CheckOptions& opts = {});

/// Slab family (-L/2,L/2) x (-1,1): monotone in L, central profile converging
/// to the interval profile, uniform bound w <= w_I(0).
VerifyReport check_slab_asymptotics(double p, double q, const std::vector<double>& L_list,
                                    double h, const CheckOptions& opts = {});

/// Discrete hidden convexity of the p-Dirichlet sum along
/// sigma^t = ((1-t) v^r + t w^r)^{1/r}; exact (zero slack) on 1D grids and on
/// 2D grids with r <= 2.
VerifyReport check_hidden_convexity(const GridFunction& v, const GridFunction& w, double t,
                                    double r, double p);

/// Equality cases of hidden convexity: proportional pairs at r = p, additive
/// shifts at r = 1, strict inequality otherwise.
VerifyReport check_equality_cases(const GridFunction& v, const GridFunction& w, double t,
                                  double r, double p);

/// Hersch-Protter ratio check: ratio >= 1 - max(2%, 10h).
VerifyReport check_hersch_protter(const geometry::ConvexDomain& domain, double p, double q,
                                  double h, const CheckOptions& opts = {});

/// Normalized convexity gap of |.|^r for r >= 2 (positive lower bound C(r)):
/// [t|z|^r + (1-t)|w|^r - |tz+(1-t)w|^r] / [t(1-t)|z-w|^r].
double quantified_gap_r_ge2(std::span<const double> z, std::span<const double> w, double t,
                            double r);

/// Normalized gap for 1 < r < 2, weighted by (|z|^2+|w|^2)^{(r-2)/2} |z-w|^2.
double quantified_gap_r_lt2(std::span<const double> z, std::span<const double> w, double t,
                            double r);

} // namespace lek::verify
