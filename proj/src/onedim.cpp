#include "lek/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "lek/errors.hpp"

namespace lek::onedim {

namespace {

constexpr int kDenseSamples = 800;

double checked_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) + " produced a non-finite value");
    return v;
}

/// Integral of (M^q - tau^q)^{-1/p} over (lo, hi), 0 <= lo <= hi <= M.
/// The integrand is singular (integrably) at tau = M; near that endpoint the
/// difference M^q - tau^q is evaluated through expm1/log1p and the quadrature
/// runs in the distance variable delta = M - tau, which keeps full precision
/// arbitrarily close to the singularity.
double singular_power_integral(double M, double q, double p, double lo, double hi) {
    if (hi <= lo) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integ(15);
    const double Mq = std::pow(M, q);
    const double tol = 1e-13;
    double total = 0.0;
    const double split = 0.5 * M;
    if (lo < split) {
        const double upper = std::min(hi, split);
        auto f = [&](double tau) { return std::pow(Mq - std::pow(tau, q), -1.0 / p); };
        double err = 0.0;
        total += integ.integrate(f, lo, upper, tol, &err);
        if (!(err <= 1e-6)) {
            std::ostringstream os;
            os << "profile quadrature achieved tolerance " << err << " only (regular part)";
            throw NumericError(os.str());
        }
    }
    if (hi > split) {
        const double dlo = M - hi;  // may be 0: singular endpoint
        const double dhi = M - std::max(lo, split);
        auto g = [&](double delta) {
            // M^q - (M-delta)^q = -M^q * expm1(q*log1p(-delta/M))
            const double diff = -Mq * std::expm1(q * std::log1p(-delta / M));
            return std::pow(diff, -1.0 / p);
        };
        double err = 0.0;
        total += integ.integrate(g, dlo, dhi, tol, &err);
        if (!(err <= 1e-6)) {
            std::ostringstream os;
            os << "profile quadrature achieved tolerance " << err << " only (singular part)";
            throw NumericError(os.str());
        }
    }
    return checked_finite(total, "profile quadrature");
}

std::size_t hermite_segment(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t j = static_cast<std::size_t>(it - xs.begin());
    if (j == 0) j = 1;
    if (j >= xs.size()) j = xs.size() - 1;
    return j - 1;
}

double hermite_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<double>& ds, double x, bool derivative) {
    if (x <= xs.front()) return derivative ? ds.front() : ys.front();
    if (x >= xs.back()) return derivative ? ds.back() : ys.back();
    const std::size_t j = hermite_segment(xs, x);
    const double hseg = xs[j + 1] - xs[j];
    const double s = (x - xs[j]) / hseg;
    const double s2 = s * s, s3 = s2 * s;
    if (!derivative) {
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * ys[j] + hseg * h10 * ds[j] + h01 * ys[j + 1] + hseg * h11 * ds[j + 1];
    }
    const double g00 = (6 * s2 - 6 * s) / hseg;
    const double g10 = 3 * s2 - 4 * s + 1;
    const double g01 = (-6 * s2 + 6 * s) / hseg;
    const double g11 = 3 * s2 - 2 * s;
    return g00 * ys[j] + g10 * ds[j] + g01 * ys[j + 1] + g11 * ds[j + 1];
}

/// Radial shooting state: u' = -(m / r^{N-1})^{1/(p-1)},
/// m' = r^{N-1} u_+^{q-1}, with u(0) = a, m(0) = 0.
struct RadialOde {
    double p, q;
    int N;

    double uprime(double r, double m) const {
        if (r <= 0.0) return 0.0;
        const double flux = m / std::pow(r, N - 1);
        return -std::pow(std::max(flux, 0.0), 1.0 / (p - 1.0));
    }
    double mprime(double r, double u) const {
        const double src = (q == 1.0) ? (u >= 0.0 ? 1.0 : 0.0)
                                      : (u > 0.0 ? std::pow(u, q - 1.0) : 0.0);
        return std::pow(r, N - 1) * src;
    }
};

struct Trajectory {
    std::vector<double> r, u, du;
};

/// Integrates the radial IVP from center value a to r = 1 with fixed-step
/// RK4, starting from the series expansion at r0 (the flux term is singular
/// at the origin). Optionally records the trajectory.
double integrate_radial(const RadialOde& ode, double a, int n_steps, Trajectory* traj) {
    // start from the center expansion u = a - c r^{p'} + O(r^{2p'}); the flux
    // field is not smooth at r = 0, so the IVP begins at a small r0 with the
    // second-order mass term included
    const double r0 = 1e-3;
    const double pp = ode.p / (ode.p - 1.0);
    const double srcA = (ode.q == 1.0) ? 1.0 : std::pow(a, ode.q - 1.0);
    const double c = (ode.p - 1.0) / ode.p * std::pow(srcA / ode.N, 1.0 / (ode.p - 1.0));
    double u = a - c * std::pow(r0, pp);
    double m = srcA * (std::pow(r0, static_cast<double>(ode.N)) / ode.N -
                       (ode.q - 1.0) * (c / a) * std::pow(r0, ode.N + pp) / (ode.N + pp));
    const double h = (1.0 - r0) / n_steps;
    if (traj) {
        traj->r.clear();
        traj->u.clear();
        traj->du.clear();
        traj->r.push_back(0.0);
        traj->u.push_back(a);
        traj->du.push_back(0.0);
    }
    double r = r0;
    for (int i = 0; i < n_steps; ++i) {
        const double k1u = ode.uprime(r, m), k1m = ode.mprime(r, u);
        const double k2u = ode.uprime(r + 0.5 * h, m + 0.5 * h * k1m);
        const double k2m = ode.mprime(r + 0.5 * h, u + 0.5 * h * k1u);
        const double k3u = ode.uprime(r + 0.5 * h, m + 0.5 * h * k2m);
        const double k3m = ode.mprime(r + 0.5 * h, u + 0.5 * h * k2u);
        const double k4u = ode.uprime(r + h, m + h * k3m);
        const double k4m = ode.mprime(r + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        m += h / 6.0 * (k1m + 2 * k2m + 2 * k3m + k4m);
        r = r0 + (i + 1) * h;
        if (traj) {
            traj->r.push_back(r);
            traj->u.push_back(u);
            traj->du.push_back(ode.uprime(r, m));
        }
    }
    return u;
}

} // namespace

void PQParams::validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("exponent p must satisfy 1 < p < inf");
    if (!(q >= 1.0) || !(q < p)) throw ParameterError("exponent q must satisfy 1 <= q < p");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
}

double Profile1D::value_at(double x) const { return hermite_eval(abscissae, values, slopes, x, false); }
double Profile1D::slope_at(double x) const { return hermite_eval(abscissae, values, slopes, x, true); }

double pi_pq(double p, double q) {
    if (!(q >= 1.0) || !(p > 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw ParameterError("pi_pq requires 1 <= q and 1 < p, both finite");
    const double pp = p / (p - 1.0);
    const double logB = std::lgamma(1.0 / q) + std::lgamma(1.0 / pp) - std::lgamma(1.0 / q + 1.0 / pp);
    return 2.0 / q * std::pow(1.0 + q / pp, 1.0 / q) * std::pow(1.0 + pp / q, -1.0 / p) *
           std::exp(logB);
}

double lambda_pq_interval(double p, double q, double half_length) {
    if (!(p > 1.0) || !(q >= 1.0) || !(q <= p))
        throw ParameterError("lambda_pq_interval requires 1 < p and 1 <= q <= p");
    if (!(half_length > 0.0)) throw ParameterError("half_length must be positive");
    const double unit = std::pow(2.0, (q - p) / q) * std::pow(pi_pq(p, q) / 2.0, p);
    // scaling of the Rayleigh quotient under x -> L x in dimension one
    return unit * std::pow(half_length, 1.0 - p - p / q);
}

double wI_center(double p, double q) {
    PQParams{p, q, 1.0}.validate();
    return std::pow((q * p - q + p) / p, 1.0 / q) * std::pow(2.0 / pi_pq(p, q), p / (p - q));
}

double wI_mass(double p, double q) {
    PQParams{p, q, 1.0}.validate();
    return std::pow(2.0 / pi_pq(p, q), p * q / (p - q));
}

double consistency_identity(double p, double q) {
    PQParams{p, q, 1.0}.validate();
    const double M = wI_center(p, q);
    const double k = std::pow(q * (p - 1.0) / p, 1.0 / p);
    return k * singular_power_integral(M, q, p, 0.0, M);
}

Profile1D wI_profile(double p, double q, int n_samples) {
    PQParams{p, q, 1.0}.validate();
    if (n_samples < 16) throw ParameterError("wI_profile requires n_samples >= 16");
    const double M = wI_center(p, q);
    const double k = std::pow(q * (p - 1.0) / p, 1.0 / p);
    const double kinv = std::pow(p / (q * (p - 1.0)), 1.0 / p);

    // Dense parametrization by value, clustered toward w = M where t(w) has a
    // vertical tangent: w_j = M (1 - (1-u)^bexp).
    const int m = kDenseSamples;
    const double bexp = p / (p - 1.0);  // roughly t-uniform near t = 0
    std::vector<double> tw(m + 1), ww(m + 1), sw(m + 1);
    ww[0] = 0.0;
    tw[0] = -1.0;
    for (int j = 1; j <= m; ++j) {
        const double u = static_cast<double>(j) / m;
        ww[j] = M * (1.0 - std::pow(1.0 - u, bexp));
        tw[j] = tw[j - 1] + k * singular_power_integral(M, q, p, ww[j - 1], ww[j]);
    }
    for (int j = 0; j <= m; ++j) {
        const double gap = std::max(std::pow(M, q) - std::pow(ww[j], q), 0.0);
        sw[j] = kinv * std::pow(gap, 1.0 / p);  // dw/dt from the first integral
    }
    // consistency: t(M) = 0 must be met by the quadrature
    if (std::abs(tw[m]) > 1e-8)
        throw NumericError("wI_profile consistency t(w_I(0)) = " + std::to_string(tw[m]) +
                           ", exceeds 1e-8");

    Profile1D prof;
    prof.kind = Profile1D::Kind::IntervalHalf;
    prof.abscissae.resize(n_samples);
    prof.values.resize(n_samples);
    prof.slopes.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = -1.0 + static_cast<double>(i) / (n_samples - 1);
        prof.abscissae[i] = t;
        if (i == 0) {
            prof.values[i] = 0.0;
        } else if (i == n_samples - 1) {
            prof.values[i] = M;
        } else {
            prof.values[i] = std::clamp(hermite_eval(tw, ww, sw, t, false), 0.0, M);
        }
        const double gap = std::max(std::pow(M, q) - std::pow(prof.values[i], q), 0.0);
        prof.slopes[i] = kinv * std::pow(gap, 1.0 / p);
    }
    return prof;
}

Profile1D wB1_profile(double p, double q, int N, int n_samples) {
    PQParams{p, q, 1.0}.validate();
    if (N < 1) throw ParameterError("wB1_profile requires integer N >= 1");
    if (n_samples < 16) throw ParameterError("wB1_profile requires n_samples >= 16");
    const RadialOde ode{p, q, N};

    // The ball value cannot exceed the interval value, which gives a
    // guaranteed shooting bracket; widen once on failure.
    const double A = wI_center(p, q);
    double lo = A / 10.0, hi = A * (1.0 + 1e-9);
    const int n_coarse = 4096, n_fine = 16384;
    auto end_value = [&](double a, int n) { return integrate_radial(ode, a, n, nullptr); };
    double flo = end_value(lo, n_coarse), fhi = end_value(hi, n_coarse);
    if (!(flo <= 0.0) || !(fhi >= 0.0)) {
        lo = A / 100.0;
        hi = A * 10.0;
        flo = end_value(lo, n_coarse);
        fhi = end_value(hi, n_coarse);
        if (!(flo <= 0.0) || !(fhi >= 0.0))
            throw NumericError("wB1_profile: shooting bracket failure for u(0)");
    }
    for (int it = 0; it < 90 && (hi - lo) > 1e-16 * A; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (end_value(mid, n_coarse) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double a = 0.5 * (lo + hi);
    // polish on the fine integrator with a secant step
    {
        double a1 = a * (1.0 + 1e-7), f0 = end_value(a, n_fine), f1 = end_value(a1, n_fine);
        for (int it = 0; it < 4 && std::abs(f1 - f0) > 0.0; ++it) {
            const double an = a1 - f1 * (a1 - a) / (f1 - f0);
            a = a1;
            f0 = f1;
            a1 = std::clamp(an, 0.0, 2.0 * A);
            f1 = end_value(a1, n_fine);
        }
        a = a1;
    }

    Trajectory traj;
    integrate_radial(ode, a, n_fine, &traj);

    Profile1D prof;
    prof.kind = Profile1D::Kind::Radial;
    prof.abscissae.resize(n_samples);
    prof.values.resize(n_samples);
    prof.slopes.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double r = static_cast<double>(i) / (n_samples - 1);
        prof.abscissae[i] = r;
        if (i == 0) {
            prof.values[i] = a;
            prof.slopes[i] = 0.0;
            continue;
        }
        double v = hermite_eval(traj.r, traj.u, traj.du, r, false);
        if (i == n_samples - 1) v = 0.0;
        prof.values[i] = std::max(v, 0.0);
        prof.slopes[i] = hermite_eval(traj.r, traj.u, traj.du, r, true);
    }
    return prof;
}

double wB1_q1_exact(double p, int N, double x_norm) {
    if (!(p > 1.0)) throw ParameterError("wB1_q1_exact requires p > 1");
    if (N < 1) throw ParameterError("wB1_q1_exact requires N >= 1");
    if (x_norm < 0.0 || x_norm > 1.0) throw ParameterError("wB1_q1_exact requires 0 <= |x| <= 1");
    return (p - 1.0) / p * std::pow(static_cast<double>(N), -1.0 / (p - 1.0)) *
           (1.0 - std::pow(x_norm, p / (p - 1.0)));
}

double localization_constant(int N, double p, double q) {
    PQParams{p, q, 1.0}.validate();
    if (N < 1) throw ParameterError("localization_constant requires N >= 1");
    if (N == 1) return 1.0;  // w_{B_1}(0) = w_I(0) and the integral is the consistency identity
    const double M = wI_center(p, q);
    const auto ball = wB1_profile(p, q, N, 65);
    const double upper = std::min(ball.values.front(), M);
    const double k = std::pow(q * (p - 1.0) / p, 1.0 / p);
    const double c = k * singular_power_integral(M, q, p, 0.0, upper);
    return std::clamp(c, 1e-300, 1.0);
}

double localization_constant_q1_closed(int N, double p) {
    if (!(p > 1.0)) throw ParameterError("localization constant requires p > 1");
    if (N < 1) throw ParameterError("localization constant requires N >= 1");
    return 1.0 - std::pow(1.0 - std::pow(static_cast<double>(N), -1.0 / (p - 1.0)),
                          (p - 1.0) / p);
}

void scale_solution_alpha(std::span<double> values, double p, double q, double alpha) {
    PQParams{p, q, alpha}.validate();
    const double factor = std::pow(alpha, 1.0 / (p - q));
    for (double& v : values) v *= factor;
}

} // namespace lek::onedim
