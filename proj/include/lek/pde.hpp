#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "lek/geometry.hpp"
#include "lek/grid.hpp"
#include "lek/onedim.hpp"

namespace lek::pde {

using onedim::PQParams;

enum class InitKind { Supersolution, Constant, Distance, Torsion };

struct SolveOptions {
    double tol = 0.0;  // 0 -> dimension default: 1e-8 in 1D, 1e-6 in 2D
    long max_iterations = 200000;
    InitKind init = InitKind::Supersolution;
    double init_constant = 0.01;
    std::size_t node_budget = (std::size_t{1} << 24);
    int fp_max_outer = 400;
    // optional nonnegative Dirichlet datum, evaluated at exterior nodes
    std::function<double(const geometry::Point&)> datum;
    // when set, receives the energy value of every accepted descent iterate
    std::vector<double>* energy_trace = nullptr;

    double resolved_tol(int dim) const { return tol > 0.0 ? tol : (dim == 1 ? 1e-8 : 1e-6); }
};

struct SolveReport {
    long iterations = 0;
    double energy = 0.0;
    double projected_gradient_sup = 0.0;
    double residual = 0.0;  // sup-norm of the discrete Euler-Lagrange residual
    double seconds = 0.0;
    bool converged = false;
};

/// Discrete energy h^N sum (1/p)|grad_h f|^p - alpha h^N sum (1/q)|f|^q with
/// forward differences; the Dirichlet sum runs over stencils touching the
/// interior mask, the lower-order sum over interior nodes. Deterministic
/// summation order.
double energy(const GridFunction& f, const PQParams& prm);

/// Exact gradient of the discrete energy with respect to interior node
/// values; exterior nodes carry zero.
GridFunction energy_gradient(const GridFunction& f, const PQParams& prm);

/// Sup over interior nodes of |discrete p-Laplacian of f - alpha f^{q-1}|.
double residual(const GridFunction& f, const PQParams& prm);

/// Nonnegative minimizer of the discrete energy subject to the datum, via
/// projected Barzilai-Borwein descent with monotone Armijo backtracking.
std::pair<GridFunction, SolveReport> solve_lane_emden(const geometry::ConvexDomain& domain,
                                                      const PQParams& prm, double h,
                                                      const SolveOptions& opts = {});

/// Minimizes (1/p) sum |grad_h u|^p - sum rhs * u over the datum class
/// (direct sparse solve for p = 2, damped Newton otherwise).
GridFunction solve_plaplace_fixed_rhs(const geometry::ConvexDomain& domain, double p,
                                      const GridFunction& rhs, double h,
                                      const SolveOptions& opts = {});

/// Sub-homogeneous fixed-point iteration u_{k+1} = (-Delta_p)^{-1}(alpha u_k^{q-1});
/// independent route to the same unique positive solution.
std::pair<GridFunction, SolveReport> fixed_point_solve(const geometry::ConvexDomain& domain,
                                                       const PQParams& prm, double h,
                                                       const SolveOptions& opts = {});

/// Builds a grid function on the rasterized lattice with the datum applied on
/// exterior nodes (zero when no datum is given).
GridFunction make_function(std::shared_ptr<const Grid> grid, const SolveOptions& opts = {});

} // namespace lek::pde
