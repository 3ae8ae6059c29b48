#pragma once

#include <span>
#include <vector>

namespace lek::onedim {

/// Exponent pair for -Delta_p u = alpha |u|^{q-2} u with 1 <= q < p.
/// At q = 1 the right-hand side uses the convention u^{q-1} = 1 for
/// nonnegative u.
struct PQParams {
    double p = 2.0;
    double q = 1.0;
    double alpha = 1.0;

    void validate() const;
    double pprime() const { return p / (p - 1.0); }
};

/// Sampled monotone profile with exact nodal slopes; evaluation uses cubic
/// Hermite interpolation between samples.
struct Profile1D {
    enum class Kind { IntervalHalf, Radial };
    Kind kind = Kind::IntervalHalf;
    std::vector<double> abscissae;  // [-1,0] interval-half, [0,1] radial
    std::vector<double> values;
    std::vector<double> slopes;

    double value_at(double x) const;
    double slope_at(double x) const;
};

/// Sharp one-dimensional Sobolev-Poincare constant via the Euler Beta
/// function (evaluated through log-Gamma).
double pi_pq(double p, double q);

/// lambda_{p,q} of the interval (-L, L).
double lambda_pq_interval(double p, double q, double half_length);

/// Maximum of the interval profile, w_I(0).
double wI_center(double p, double q);

/// Half-mass of the interval profile, integral of w_I^q over (-1, 0).
double wI_mass(double p, double q);

/// Interval profile w_I sampled on [-1, 0] at n_samples uniform abscissae.
Profile1D wI_profile(double p, double q, int n_samples = 257);

/// Radial profile on the unit ball in dimension N, found by shooting on the
/// center value; monotone decreasing with u(1) = 0.
Profile1D wB1_profile(double p, double q, int N, int n_samples = 257);

/// Closed form of the ball profile for q = 1.
double wB1_q1_exact(double p, int N, double x_norm);

/// Localization constant C_{N,p,q} in (0, 1].
double localization_constant(int N, double p, double q);

/// Closed form of the localization constant for q = 1.
double localization_constant_q1_closed(int N, double p);

/// Rescales an alpha = 1 solution to the solution at the given alpha
/// (multiplies by alpha^{1/(p-q)}).
void scale_solution_alpha(std::span<double> values, double p, double q, double alpha);

/// Left-hand side of the profile consistency identity
/// (q(p-1)/p)^{1/p} * integral_0^{w_I(0)} (w_I(0)^q - tau^q)^{-1/p} dtau,
/// which equals 1 for every admissible (p, q).
double consistency_identity(double p, double q);

} // namespace lek::onedim
