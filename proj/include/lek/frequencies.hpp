#pragma once

#include <vector>

#include "lek/pde.hpp"

namespace lek::frequencies {

enum class Engine { Minimize, FixedPoint };

struct FrequencyOptions {
    Engine engine = Engine::FixedPoint;
    pde::SolveOptions solve;
};

struct FrequencyResult {
    double lambda = 0.0;
    double mass = 0.0;            // discrete integral of w^q at alpha = 1
    double normalized_gap = 0.0;  // Hersch-Protter ratio - 1
    GridFunction solution;        // the alpha = 1 solve behind lambda
};

/// lambda_{p,q}(Omega) from the mass of the positive alpha = 1 solution:
/// lambda = (integral w^q)^{-(p-q)/q}.
FrequencyResult lambda_pq(const geometry::ConvexDomain& domain, double p, double q, double h,
                          const FrequencyOptions& opts = {});

/// (h^N sum |grad_h f|^p) / (h^N sum |f|^q)^{p/q}; zero-homogeneous.
double rayleigh_quotient(const GridFunction& f, double p, double q);

/// lambda_{p,q}(Omega) |Omega|^{(p-q)/q} r^p (2/pi_{p,q})^p, >= 1 on convex sets.
double hersch_protter_ratio(const geometry::ConvexDomain& domain, double p, double q, double h,
                            const FrequencyOptions& opts = {});

/// The proved lower bound (pi_{p,q}/2)^p r^{-p} |Omega|^{-(p-q)/q}.
double hersch_protter_lower(const geometry::ConvexDomain& domain, double p, double q);

/// Upper bound (pi_{p,q}/2)^p (P(Omega)/|Omega|^{1-1/p+1/q})^p from exact
/// perimeter and area.
double perimeter_upper_bound(const geometry::ConvexDomain& domain, double p, double q);

struct ScanRow {
    double q = 0.0;
    double lambda = 0.0;
    double hp_lower = 0.0;
    double perim_upper = 0.0;
    double ratio = 0.0;  // Hersch-Protter ratio
    bool bracket_ok = false;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double max_normalized_jump = 0.0;  // max step of lambda |Omega|^{(p-q)/q} over the scan
    double bracket_margin = 0.0;       // max(2%, 10h) used for the bracket test
    bool all_bracketed = false;
};

/// Computes lambda_{p,q} over an increasing q list together with the proved
/// two-sided bracket; rows run in parallel (capped by LEK_THREADS).
ScanResult continuity_scan(const geometry::ConvexDomain& domain, double p,
                           const std::vector<double>& q_list, double h,
                           const FrequencyOptions& opts = {});

} // namespace lek::frequencies
