#pragma once

// Order-zero Bessel functions, the outgoing Helmholtz fundamental solution in
// two and three dimensions, and the far-field normalisation constant C_d.

#include "nlscat/types.hpp"

namespace nlscat {

/// Wavenumber and spatial dimension of a scattering problem.
struct WaveContext {
    double k = 1.0;
    int d = 2;

    /// Throws ConstructionError unless k > 0 and d is 2 or 3.
    void validate() const;
    static WaveContext make(double k, int d);
};

namespace specfun {

/// Crossover between the power series and the Hankel asymptotic expansion.
inline constexpr double kSeriesCrossover = 17.0;

double bessel_j0(double x);
double bessel_y0(double x);

/// H0^(1)(x) = J0(x) + i Y0(x), x > 0.
cplx hankel0(double x);

/// Outgoing fundamental solution of -Delta - k^2. Throws SingularityError when x == y.
cplx fundamental_solution(const Point& x, const Point& y, const WaveContext& ctx);

/// Same kernel as a function of the distance r > 0.
cplx fundamental_solution_radial(double r, const WaveContext& ctx);

/// C_d = k^{(d-3)/2} e^{-i pi (d-3)/4} / (2^{(d+1)/2} pi^{(d-1)/2}).
cplx farfield_constant(const WaveContext& ctx);

/// Integral of the fundamental solution over a ball of radius rho centred at
/// the singularity. Used for the self-cell term of the volume potential.
cplx ball_self_integral(double rho, const WaveContext& ctx);

namespace testing {
/// Fault-injection hook for the check suite: scales the 2/pi normalisation of
/// Y0 by (1 + relative). Zero restores normal behaviour.
void set_y0_normalisation_perturbation(double relative);
double y0_normalisation_perturbation();
}  // namespace testing

}  // namespace specfun
}  // namespace nlscat
