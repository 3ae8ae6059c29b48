#include "lek/pde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "lek/errors.hpp"

namespace lek::pde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Precomputed stencil lists for a grid: `cells` are the nodes whose forward
/// stencil touches the interior mask (the Dirichlet sum runs over these),
/// `interior` are the unknowns.
struct Mesh {
    const Grid* grid = nullptr;
    int dim = 2;
    double h = 0.0;
    double hN = 0.0;
    std::size_t nx = 0;
    std::vector<std::size_t> cells;
    std::vector<std::size_t> interior;
};

Mesh build_mesh(const Grid& g) {
    Mesh m;
    m.grid = &g;
    m.dim = g.dim;
    m.h = g.h;
    m.hN = g.dim == 1 ? g.h : g.h * g.h;
    m.nx = static_cast<std::size_t>(g.n[0]);
    const int ylim = g.dim == 2 ? g.n[1] - 1 : 1;
    for (int iy = 0; iy < ylim; ++iy)
        for (int ix = 0; ix + 1 < g.n[0]; ++ix) {
            const std::size_t idx = g.index(ix, iy);
            bool touch = g.mask[idx] || g.mask[idx + 1];
            if (g.dim == 2) touch = touch || g.mask[idx + m.nx];
            if (touch) m.cells.push_back(idx);
        }
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask[i]) m.interior.push_back(i);
    return m;
}

double grad_regularization(const Mesh& m, const std::vector<double>& v, double p) {
    if (p >= 2.0) return 0.0;
    double gmax = 0.0;
    for (std::size_t idx : m.cells) {
        const double g1 = (v[idx + 1] - v[idx]) / m.h;
        gmax = std::max(gmax, std::abs(g1));
        if (m.dim == 2) gmax = std::max(gmax, std::abs((v[idx + m.nx] - v[idx]) / m.h));
    }
    return 1e-10 * (1.0 + gmax);
}

double dirichlet_sum(const Mesh& m, const std::vector<double>& v, double p, double eps) {
    const bool p2 = (p == 2.0) && (eps == 0.0);
    const double e2 = eps * eps;
    double acc = 0.0;
    for (std::size_t idx : m.cells) {
        const double g1 = (v[idx + 1] - v[idx]) / m.h;
        const double g2 = m.dim == 2 ? (v[idx + m.nx] - v[idx]) / m.h : 0.0;
        const double w = g1 * g1 + g2 * g2 + e2;
        acc += p2 ? w : std::pow(w, 0.5 * p);
    }
    return acc;
}

double energy_impl(const Mesh& m, const std::vector<double>& v, const PQParams& prm, double eps) {
    const double dir = m.hN / prm.p * dirichlet_sum(m, v, prm.p, eps);
    const bool q1 = (prm.q == 1.0);
    double low = 0.0;
    for (std::size_t i : m.interior) {
        const double a = std::abs(v[i]);
        low += q1 ? a : std::pow(a, prm.q);
    }
    return dir - prm.alpha * m.hN / prm.q * low;
}

/// phi_q(s) = |s|^{q-2} s, with the q = 1 convention phi_1 = 1 on s >= 0.
double phi_q(double s, double q) {
    if (q == 1.0) return s >= 0.0 ? 1.0 : -1.0;
    if (s == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(s), q - 1.0), s);
}

void dirichlet_gradient(const Mesh& m, const std::vector<double>& v, double p, double eps,
                        std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    const bool p2 = (p == 2.0) && (eps == 0.0);
    const double e2 = eps * eps;
    const double scale = m.hN / m.h;
    for (std::size_t idx : m.cells) {
        const double g1 = (v[idx + 1] - v[idx]) / m.h;
        const double g2 = m.dim == 2 ? (v[idx + m.nx] - v[idx]) / m.h : 0.0;
        const double w = g1 * g1 + g2 * g2 + e2;
        const double wq = p2 ? 1.0 : std::pow(w, 0.5 * p - 1.0);
        const double W1 = scale * wq * g1;
        const double W2 = scale * wq * g2;
        out[idx] -= W1 + W2;
        out[idx + 1] += W1;
        if (m.dim == 2) out[idx + m.nx] += W2;
    }
}

/// Full energy gradient restricted to interior unknowns (exterior zeroed).
void gradient_impl(const Mesh& m, const std::vector<double>& v, const PQParams& prm, double eps,
                   std::vector<double>& out, std::vector<double>& scratch) {
    dirichlet_gradient(m, v, prm.p, eps, scratch);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i : m.interior)
        out[i] = scratch[i] - prm.alpha * m.hN * phi_q(v[i], prm.q);
}

[[maybe_unused]] double dot_interior(const Mesh& m, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i : m.interior) s += a[i] * b[i];
    return s;
}

double sup_interior(const Mesh& m, const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t i : m.interior) s = std::max(s, std::abs(a[i]));
    return s;
}

/// Inner convex solver for min (1/p) sum |grad_h u|^p - sum rhs*u over the
/// datum class. Direct sparse Cholesky for p = 2 (matrix is fixed per grid),
/// damped Newton with a regularized Hessian otherwise.
class PLaplaceInner {
public:
    PLaplaceInner(std::shared_ptr<const Grid> grid, double p)
        : grid_(std::move(grid)), mesh_(build_mesh(*grid_)), p_(p) {
        uid_.assign(grid_->size(), -1);
        for (std::size_t k = 0; k < mesh_.interior.size(); ++k)
            uid_[mesh_.interior[k]] = static_cast<int>(k);
        if (p_ == 2.0) assemble_linear();
    }

    /// rhs and bc share the solve grid; bc supplies exterior (datum) values.
    GridFunction solve(const std::vector<double>& rhs, const GridFunction& bc,
                       double tol_abs, const GridFunction* warm) {
        if (p_ == 2.0) return solve_linear(rhs, bc);
        return solve_newton(rhs, bc, tol_abs, warm);
    }

    const Mesh& mesh() const { return mesh_; }

private:
    using SpMat = Eigen::SparseMatrix<double>;

    void assemble_linear() {
        const auto& g = *grid_;
        const std::size_t nun = mesh_.interior.size();
        const double offc = mesh_.hN / (g.h * g.h);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nun * 5);
        const long nbr_count = 2 * g.dim;
        for (std::size_t k = 0; k < nun; ++k) {
            const std::size_t i = mesh_.interior[k];
            trip.emplace_back(static_cast<int>(k), static_cast<int>(k), nbr_count * offc);
            const long nbrs[4] = {static_cast<long>(i) - 1, static_cast<long>(i) + 1,
                                  static_cast<long>(i) - static_cast<long>(mesh_.nx),
                                  static_cast<long>(i) + static_cast<long>(mesh_.nx)};
            for (int d = 0; d < nbr_count; ++d) {
                const long j = nbrs[d];
                if (uid_[j] >= 0) trip.emplace_back(static_cast<int>(k), uid_[j], -offc);
            }
        }
        A_.resize(static_cast<int>(nun), static_cast<int>(nun));
        A_.setFromTriplets(trip.begin(), trip.end());
        ldlt_.compute(A_);
        if (ldlt_.info() != Eigen::Success)
            throw NumericError("p-Laplace inner solver: Cholesky factorization failed");
    }

    GridFunction solve_linear(const std::vector<double>& rhs, const GridFunction& bc) {
        const auto& g = *grid_;
        const std::size_t nun = mesh_.interior.size();
        const double offc = mesh_.hN / (g.h * g.h);
        Eigen::VectorXd b(nun);
        const int nbr_count = 2 * g.dim;
        for (std::size_t k = 0; k < nun; ++k) {
            const std::size_t i = mesh_.interior[k];
            double bi = mesh_.hN * rhs[i];
            const long nbrs[4] = {static_cast<long>(i) - 1, static_cast<long>(i) + 1,
                                  static_cast<long>(i) - static_cast<long>(mesh_.nx),
                                  static_cast<long>(i) + static_cast<long>(mesh_.nx)};
            for (int d = 0; d < nbr_count; ++d)
                if (uid_[nbrs[d]] < 0) bi += offc * bc.values[nbrs[d]];
            b[static_cast<int>(k)] = bi;
        }
        Eigen::VectorXd x = ldlt_.solve(b);
        GridFunction u = bc;
        for (std::size_t k = 0; k < nun; ++k) u.values[mesh_.interior[k]] = x[static_cast<int>(k)];
        return u;
    }

    double objective(const std::vector<double>& v, const std::vector<double>& rhs,
                     double eps) const {
        double lin = 0.0;
        for (std::size_t i : mesh_.interior) lin += rhs[i] * v[i];
        return mesh_.hN / p_ * dirichlet_sum(mesh_, v, p_, eps) - mesh_.hN * lin;
    }

    void objective_gradient(const std::vector<double>& v, const std::vector<double>& rhs,
                            double eps, std::vector<double>& out,
                            std::vector<double>& scratch) const {
        dirichlet_gradient(mesh_, v, p_, eps, scratch);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i : mesh_.interior) out[i] = scratch[i] - mesh_.hN * rhs[i];
    }

    GridFunction solve_newton(const std::vector<double>& rhs, const GridFunction& bc,
                              double tol_abs, const GridFunction* warm) {
        const std::size_t nun = mesh_.interior.size();
        GridFunction u = bc;
        if (warm && warm->grid.get() == grid_.get()) {
            u.values = warm->values;
        } else {
            // seed with the p = 2 solution, rescaled to minimize the energy
            // along its ray
            PLaplaceInner poisson(grid_, 2.0);
            u = poisson.solve(rhs, bc, tol_abs, nullptr);
            const double D = mesh_.hN * dirichlet_sum(mesh_, u.values, p_, 0.0);
            double R = 0.0;
            for (std::size_t i : mesh_.interior) R += mesh_.hN * rhs[i] * u.values[i];
            if (D > 0.0 && R > 0.0) {
                const double c = std::pow(R / D, 1.0 / (p_ - 1.0));
                for (std::size_t i : mesh_.interior) u.values[i] *= c;
            }
        }
        const double eps = grad_regularization(mesh_, u.values, p_);
        std::vector<double> grad(u.values.size()), scratch(u.values.size());
        std::vector<double> trial(u.values.size());
        double fval = objective(u.values, rhs, eps);

        Eigen::VectorXd d(nun);
        for (int it = 0; it < 200; ++it) {
            objective_gradient(u.values, rhs, eps, grad, scratch);
            const double res = sup_interior(mesh_, grad) / mesh_.hN;
            if (res <= tol_abs) return u;

            assemble_hessian(u.values, eps);
            Eigen::VectorXd gi(nun);
            for (std::size_t k = 0; k < nun; ++k) gi[static_cast<int>(k)] = grad[mesh_.interior[k]];
            double mu = 0.0;
            for (int attempt = 0;; ++attempt) {
                SpMat Hs = H_;
                if (mu > 0.0)
                    for (std::size_t k = 0; k < nun; ++k)
                        Hs.coeffRef(static_cast<int>(k), static_cast<int>(k)) += mu;
                newton_ldlt_.compute(Hs);
                if (newton_ldlt_.info() == Eigen::Success) {
                    d = newton_ldlt_.solve(-gi);
                    if (d.allFinite()) break;
                }
                if (attempt >= 8)
                    throw NumericError("p-Laplace inner solver: Hessian factorization failed");
                mu = (mu == 0.0) ? 1e-10 * mesh_.hN : mu * 100.0;
            }

            double gd = 0.0;
            for (std::size_t k = 0; k < nun; ++k) gd += gi[static_cast<int>(k)] * d[static_cast<int>(k)];
            if (gd > 0.0) d = -gi;  // fall back to steepest descent

            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                trial = u.values;
                for (std::size_t k = 0; k < nun; ++k)
                    trial[mesh_.interior[k]] += step * d[static_cast<int>(k)];
                const double ftrial = objective(trial, rhs, eps);
                const double decrease = 1e-4 * step * gd;
                if (std::isfinite(ftrial) &&
                    (ftrial <= fval + decrease || std::abs(decrease) <= 1e-13 * (1.0 + std::abs(fval)))) {
                    u.values.swap(trial);
                    fval = ftrial;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                throw NumericError("p-Laplace inner solver: line search failed");
        }
        throw NumericError("p-Laplace inner solver: Newton did not converge");
    }

    void assemble_hessian(const std::vector<double>& v, double eps) {
        const double e2 = eps * eps;
        double gmax2 = e2;
        for (std::size_t idx : mesh_.cells) {
            const double g1 = (v[idx + 1] - v[idx]) / mesh_.h;
            const double g2 = mesh_.dim == 2 ? (v[idx + mesh_.nx] - v[idx]) / mesh_.h : 0.0;
            gmax2 = std::max(gmax2, g1 * g1 + g2 * g2);
        }
        // keep the Hessian nondegenerate where the gradient vanishes; p < 2
        // needs a larger floor or the singular weights stiffen the system
        const double d2 = std::max(e2, (p_ < 2.0 ? 1e-8 : 1e-14) * gmax2);

        triplets_.clear();
        const double scale = mesh_.hN / (mesh_.h * mesh_.h);
        const int nloc = mesh_.dim + 1;
        for (std::size_t idx : mesh_.cells) {
            const double g1 = (v[idx + 1] - v[idx]) / mesh_.h;
            const double g2 = mesh_.dim == 2 ? (v[idx + mesh_.nx] - v[idx]) / mesh_.h : 0.0;
            const double w = g1 * g1 + g2 * g2 + d2;
            const double w1 = std::pow(w, 0.5 * p_ - 1.0);
            const double w2 = (p_ - 2.0) * std::pow(w, 0.5 * p_ - 2.0);
            double J[2][2] = {{w1 + w2 * g1 * g1, w2 * g1 * g2},
                              {w2 * g1 * g2, w1 + w2 * g2 * g2}};
            // local nodes: 0 -> idx, 1 -> idx+1, 2 -> idx+nx; B[a][n] = dg_a/du_n
            const double B[2][3] = {{-1.0, 1.0, 0.0}, {-1.0, 0.0, 1.0}};
            const std::size_t nodes[3] = {idx, idx + 1, mesh_.dim == 2 ? idx + mesh_.nx : idx};
            for (int a = 0; a < nloc; ++a) {
                const int ia = uid_[nodes[a]];
                if (ia < 0) continue;
                for (int b = 0; b < nloc; ++b) {
                    const int ib = uid_[nodes[b]];
                    if (ib < 0) continue;
                    double k = 0.0;
                    for (int c1 = 0; c1 < mesh_.dim; ++c1)
                        for (int c2 = 0; c2 < mesh_.dim; ++c2)
                            k += J[c1][c2] * B[c1][a] * B[c2][b];
                    if (k != 0.0) triplets_.emplace_back(ia, ib, scale * k);
                }
            }
        }
        const int nun = static_cast<int>(mesh_.interior.size());
        H_.resize(nun, nun);
        H_.setFromTriplets(triplets_.begin(), triplets_.end());
    }

    std::shared_ptr<const Grid> grid_;
    Mesh mesh_;
    double p_;
    std::vector<int> uid_;
    SpMat A_, H_;
    Eigen::SimplicialLDLT<SpMat> ldlt_, newton_ldlt_;
    std::vector<Eigen::Triplet<double>> triplets_;
};

void check_same_grid(const GridFunction& f, const Grid& g) {
    const Grid& fg = *f.grid;
    if (fg.dim != g.dim || fg.h != g.h || fg.i0 != g.i0 || fg.n != g.n)
        throw ParameterError("grid functions must live on the solve grid");
}

void require_solver_spacing(const geometry::ConvexDomain& domain, double h) {
    if (h > domain.metrics().inradius / 4.0 * (1.0 + 1e-12))
        throw ParameterError("solver grids require h <= inradius/4");
}

double seed_scale(const geometry::ConvexDomain& domain, const PQParams& prm) {
    const auto m = domain.metrics();
    return std::pow(prm.alpha, 1.0 / (prm.p - prm.q)) *
           std::pow(m.inradius, prm.p / (prm.p - prm.q));
}

GridFunction initial_guess(const geometry::ConvexDomain& domain, const PQParams& prm,
                           std::shared_ptr<const Grid> grid, const SolveOptions& opts) {
    GridFunction u = make_function(grid, opts);
    const auto metrics = domain.metrics();
    switch (opts.init) {
        case InitKind::Constant: {
            for (std::size_t i = 0; i < grid->size(); ++i)
                if (grid->mask[i]) u.values[i] = opts.init_constant;
            break;
        }
        case InitKind::Distance: {
            for (int iy = 0; iy < grid->n[1]; ++iy)
                for (int ix = 0; ix < grid->n[0]; ++ix) {
                    const std::size_t i = grid->index(ix, iy);
                    if (!grid->mask[i]) continue;
                    const geometry::Point x{grid->coord(0, ix),
                                            grid->dim == 2 ? grid->coord(1, iy) : 0.0};
                    u.values[i] = domain.distance_to_boundary(x);
                }
            break;
        }
        case InitKind::Torsion: {
            PLaplaceInner inner(grid, prm.p);
            std::vector<double> rhs(grid->size(), 0.0);
            for (std::size_t i = 0; i < grid->size(); ++i)
                if (grid->mask[i]) rhs[i] = prm.alpha;
            u = inner.solve(rhs, u, 1e-10, nullptr);
            break;
        }
        case InitKind::Supersolution: {
            // the paper-style upper barrier built from the interval profile
            const auto prof = onedim::wI_profile(prm.p, prm.q, 257);
            const double scale = seed_scale(domain, prm);
            for (int iy = 0; iy < grid->n[1]; ++iy)
                for (int ix = 0; ix < grid->n[0]; ++ix) {
                    const std::size_t i = grid->index(ix, iy);
                    if (!grid->mask[i]) continue;
                    const geometry::Point x{grid->coord(0, ix),
                                            grid->dim == 2 ? grid->coord(1, iy) : 0.0};
                    const double t =
                        std::min(domain.distance_to_boundary(x) / metrics.inradius - 1.0, 0.0);
                    u.values[i] = scale * prof.value_at(t);
                }
            break;
        }
    }
    return u;
}

} // namespace

GridFunction make_function(std::shared_ptr<const Grid> grid, const SolveOptions& opts) {
    GridFunction f(std::move(grid));
    if (opts.datum) {
        const Grid& g = *f.grid;
        for (int iy = 0; iy < g.n[1]; ++iy)
            for (int ix = 0; ix < g.n[0]; ++ix) {
                const std::size_t i = g.index(ix, iy);
                if (g.mask[i]) continue;
                const geometry::Point x{g.coord(0, ix), g.dim == 2 ? g.coord(1, iy) : 0.0};
                const double d = opts.datum(x);
                if (d < 0.0) throw ParameterError("Dirichlet datum must be nonnegative");
                f.values[i] = d;
            }
    }
    return f;
}

double energy(const GridFunction& f, const PQParams& prm) {
    prm.validate();
    const Mesh m = build_mesh(*f.grid);
    if (m.interior.empty()) throw ParameterError("energy requires a nonempty interior mask");
    const double e = energy_impl(m, f.values, prm, grad_regularization(m, f.values, prm.p));
    if (!std::isfinite(e)) throw NumericError("energy evaluated to a non-finite value");
    return e;
}

GridFunction energy_gradient(const GridFunction& f, const PQParams& prm) {
    prm.validate();
    const Mesh m = build_mesh(*f.grid);
    GridFunction g(f.grid);
    std::vector<double> scratch(f.values.size());
    gradient_impl(m, f.values, prm, grad_regularization(m, f.values, prm.p), g.values, scratch);
    return g;
}

double residual(const GridFunction& f, const PQParams& prm) {
    prm.validate();
    const Mesh m = build_mesh(*f.grid);
    GridFunction g(f.grid);
    std::vector<double> scratch(f.values.size());
    gradient_impl(m, f.values, prm, grad_regularization(m, f.values, prm.p), g.values, scratch);
    return sup_interior(m, g.values) / m.hN;
}

std::pair<GridFunction, SolveReport> solve_lane_emden(const geometry::ConvexDomain& domain,
                                                      const PQParams& prm, double h,
                                                      const SolveOptions& opts) {
    prm.validate();
    require_solver_spacing(domain, h);
    const auto t0 = Clock::now();
    auto grid = std::make_shared<const Grid>(geometry::rasterize(domain, h, opts.node_budget));
    const Mesh mesh = build_mesh(*grid);
    const double tol = opts.resolved_tol(grid->dim);

    GridFunction u = initial_guess(domain, prm, grid, opts);
    const double eps = grad_regularization(mesh, u.values, prm.p);

    double fval = energy_impl(mesh, u.values, prm, eps);
    if (!opts.datum) {
        // keep the energy strictly below F(0) = 0 so the descent can never
        // collapse onto the trivial critical point
        int halvings = 0;
        while (fval >= 0.0 && halvings < 200) {
            for (std::size_t i : mesh.interior) u.values[i] *= 0.5;
            fval = energy_impl(mesh, u.values, prm, eps);
            ++halvings;
        }
        if (fval >= 0.0) throw NumericError("could not find a negative-energy starting point");
    }
    if (!std::isfinite(fval)) throw NumericError("energy of the initial guess is not finite");
    if (opts.energy_trace) opts.energy_trace->push_back(fval);

    const std::size_t nval = u.values.size();
    std::vector<double> grad(nval), scratch(nval), gnew(nval), trial(nval);
    gradient_impl(mesh, u.values, prm, eps, grad, scratch);

    auto threshold = [&](double umax) {
        return tol * prm.alpha * (prm.q == 1.0 ? 1.0 : std::pow(std::max(umax, 1e-300), prm.q - 1.0));
    };
    auto projected_res = [&](const std::vector<double>& v, const std::vector<double>& g) {
        double s = 0.0;
        for (std::size_t i : mesh.interior) {
            const double gi = v[i] > 0.0 ? g[i] : std::min(g[i], 0.0);
            s = std::max(s, std::abs(gi));
        }
        return s / mesh.hN;
    };

    double lam = mesh.h * mesh.h;  // first trial step; BB estimates take over after one iterate
    SolveReport rep;
    bool converged = false;
    double best_res = std::numeric_limits<double>::infinity();
    std::vector<double> best_u = u.values;

    long it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double res = projected_res(u.values, grad);
        if (res < best_res) {
            best_res = res;
            best_u = u.values;
        }
        double umax = 0.0;
        for (std::size_t i : mesh.interior) umax = std::max(umax, u.values[i]);
        if (res <= threshold(umax)) {
            converged = true;
            break;
        }

        // projected BB trial step with monotone Armijo backtracking; the
        // sufficient-decrease test is waived once predicted decreases fall
        // below the rounding floor of the energy sum
        bool accepted = false;
        double ftrial = fval;
        for (int ls = 0; ls < 60 && !accepted; ++ls) {
            double gd = 0.0;
            for (std::size_t i : mesh.interior) {
                const double vi = std::max(u.values[i] - lam * grad[i], 0.0);
                trial[i] = vi;
                gd += grad[i] * (vi - u.values[i]);
            }
            ftrial = energy_impl(mesh, trial, prm, eps);
            const double decrease = 1e-4 * gd;
            const double noise = 1e-13 * (1.0 + std::abs(fval));
            if (std::isfinite(ftrial) &&
                (ftrial <= fval + decrease ||
                 (std::abs(decrease) <= noise && ftrial <= fval + noise))) {
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) break;  // progress below rounding floor: return best iterate

        // exterior entries of trial were never touched; copy interior update
        double sy = 0.0, ss = 0.0, yy = 0.0;
        gradient_impl(mesh, trial, prm, eps, gnew, scratch);
        for (std::size_t i : mesh.interior) {
            const double s = trial[i] - u.values[i];
            const double y = gnew[i] - grad[i];
            sy += s * y;
            ss += s * s;
            yy += y * y;
            u.values[i] = trial[i];
        }
        grad.swap(gnew);
        fval = ftrial;
        if (opts.energy_trace) opts.energy_trace->push_back(fval);

        if (sy > 0.0) {
            const double bb1 = ss / sy;
            const double bb2 = sy / std::max(yy, 1e-300);
            lam = (it % 2 == 0) ? bb1 : bb2;
        } else {
            lam *= 2.0;
        }
        lam = std::clamp(lam, 1e-12, 1e12);
    }

    if (!converged) u.values = best_u;

    gradient_impl(mesh, u.values, prm, eps, grad, scratch);
    double umax = 0.0;
    for (std::size_t i : mesh.interior) umax = std::max(umax, u.values[i]);
    rep.iterations = it;
    rep.energy = energy_impl(mesh, u.values, prm, eps);
    rep.projected_gradient_sup = projected_res(u.values, grad) * mesh.hN;
    rep.residual = sup_interior(mesh, grad) / mesh.hN;
    rep.converged = converged || projected_res(u.values, grad) <= threshold(umax);
    rep.seconds = seconds_since(t0);
    return {std::move(u), rep};
}

GridFunction solve_plaplace_fixed_rhs(const geometry::ConvexDomain& domain, double p,
                                      const GridFunction& rhs, double h,
                                      const SolveOptions& opts) {
    if (!(p > 1.0)) throw ParameterError("solve_plaplace_fixed_rhs requires p > 1");
    for (double v : rhs.values)
        if (v < 0.0) throw ParameterError("solve_plaplace_fixed_rhs requires rhs >= 0");
    require_solver_spacing(domain, h);
    auto grid = std::make_shared<const Grid>(geometry::rasterize(domain, h, opts.node_budget));
    check_same_grid(rhs, *grid);
    PLaplaceInner inner(grid, p);
    GridFunction bc = make_function(grid, opts);
    double rmax = 0.0;
    for (double v : rhs.values) rmax = std::max(rmax, v);
    const double tol_abs = opts.resolved_tol(grid->dim) * std::max(rmax, 1e-12);
    return inner.solve(rhs.values, bc, tol_abs, nullptr);
}

std::pair<GridFunction, SolveReport> fixed_point_solve(const geometry::ConvexDomain& domain,
                                                       const PQParams& prm, double h,
                                                       const SolveOptions& opts) {
    prm.validate();
    require_solver_spacing(domain, h);
    const auto t0 = Clock::now();
    auto grid = std::make_shared<const Grid>(geometry::rasterize(domain, h, opts.node_budget));
    const double tol = opts.resolved_tol(grid->dim);
    PLaplaceInner inner(grid, prm.p);
    const Mesh& mesh = inner.mesh();
    GridFunction bc = make_function(grid, opts);

    const double scale = seed_scale(domain, prm) * onedim::wI_center(prm.p, prm.q);
    const double inner_tol =
        0.25 * tol * prm.alpha *
        (prm.q == 1.0 ? 1.0 : std::pow(std::max(scale, 1e-300), prm.q - 1.0));

    std::vector<double> rhs(grid->size(), 0.0);
    for (std::size_t i : mesh.interior) rhs[i] = prm.alpha;
    GridFunction u = inner.solve(rhs, bc, inner_tol, nullptr);

    SolveReport rep;
    bool converged = (prm.q == 1.0);
    long it = 1;
    if (!converged) {
        for (; it <= opts.fp_max_outer; ++it) {
            for (std::size_t i : mesh.interior)
                rhs[i] = prm.alpha * std::pow(std::max(u.values[i], 0.0), prm.q - 1.0);
            GridFunction next = inner.solve(rhs, bc, inner_tol, &u);
            double diff = 0.0;
            for (std::size_t i : mesh.interior)
                diff = std::max(diff, std::abs(next.values[i] - u.values[i]));
            u = std::move(next);
            if (diff <= tol) {
                converged = true;
                break;
            }
        }
        if (converged) {
            // polish: one tighter solve at the converged right-hand side
            for (std::size_t i : mesh.interior)
                rhs[i] = prm.alpha * std::pow(std::max(u.values[i], 0.0), prm.q - 1.0);
            u = inner.solve(rhs, bc, 0.1 * inner_tol, &u);
        }
    }

    std::vector<double> grad(u.values.size()), scratch(u.values.size());
    gradient_impl(mesh, u.values, prm, grad_regularization(mesh, u.values, prm.p), grad, scratch);
    rep.iterations = it;
    rep.energy = energy_impl(mesh, u.values, prm, grad_regularization(mesh, u.values, prm.p));
    rep.projected_gradient_sup = sup_interior(mesh, grad);
    rep.residual = sup_interior(mesh, grad) / mesh.hN;
    rep.converged = converged;
    rep.seconds = seconds_since(t0);
    if (!converged)
        rep.iterations = opts.fp_max_outer;
    return {std::move(u), rep};
}

} // namespace lek::pde
