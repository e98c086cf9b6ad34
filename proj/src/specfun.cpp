#include "nlscat/specfun.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "nlscat/errors.hpp"

namespace nlscat {

void WaveContext::validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw ConstructionError("wave context: k must be positive and finite, got " + std::to_string(k));
    }
    if (d != 2 && d != 3) {
        throw ConstructionError("wave context: dimension must be 2 or 3, got " + std::to_string(d));
    }
}

WaveContext WaveContext::make(double k, int d) {
    WaveContext ctx{k, d};
    ctx.validate();
    return ctx;
}

namespace specfun {
namespace {

std::atomic<double> g_y0_perturbation{0.0};

using ld = long double;

constexpr ld kPiL = 3.141592653589793238462643383279502884L;
constexpr ld kEulerL = 0.577215664901532860606512090082402431L;


struct J0Y0 {
    ld j0;
    ld y0;
};

// Ascending series, summed in extended precision to absorb the cancellation
// between terms that peak near m ~ x/2.
J0Y0 series_j0y0(ld x, bool want_y0) {
    const ld t = x * x / 4.0L;
    ld term = 1.0L;  // (-t)^m / (m!)^2
    ld j0 = 1.0L;
    ld s = 0.0L;  // sum_{m>=1} (-1)^{m+1} H_m t^m / (m!)^2
    ld harmonic = 0.0L;
    const ld eps = std::numeric_limits<ld>::epsilon();
    for (int m = 1; m < 200; ++m) {
        term *= -t / (static_cast<ld>(m) * static_cast<ld>(m));
        harmonic += 1.0L / static_cast<ld>(m);
        j0 += term;
        s -= harmonic * term;
        if (static_cast<ld>(m) > t && std::fabs(term) * (1.0L + harmonic) < eps * 1e-3L) {
            break;
        }
    }
    ld y0 = 0.0L;
    if (want_y0) {
        y0 = (2.0L / kPiL) * ((std::log(x / 2.0L) + kEulerL) * j0 + s);
    }
    return {j0, y0};
}

// Hankel asymptotic expansion, truncated at the smallest term.
J0Y0 asymptotic_j0y0(ld x) {
    ld p = 1.0L;
    ld q = 0.0L;
    ld b = 1.0L;
    ld prev = std::numeric_limits<ld>::max();
    const ld eps = std::numeric_limits<ld>::epsilon();
    ld xpow = 1.0L;
    for (int k = 1; k < 80; ++k) {
        b *= static_cast<ld>((2 * k - 1) * (2 * k - 1)) / (8.0L * static_cast<ld>(k));
        xpow *= x;
        const ld term = b / xpow;
        if (term > prev) {
            break;
        }
        prev = term;
        if (k % 2 == 0) {
            p += ((k / 2) % 2 == 0) ? term : -term;
        } else {
            q += (((k - 1) / 2) % 2 == 0) ? -term : term;
        }
        if (term < eps * 1e-2L) {
            break;
        }
    }
    const ld chi = x - kPiL / 4.0L;
    const ld c = std::cos(chi);
    const ld s = std::sin(chi);
    const ld amp = std::sqrt(2.0L / (kPiL * x));
    return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

J0Y0 eval(double x, bool want_y0) {
    const ld xl = static_cast<ld>(x);
    J0Y0 r = x <= kSeriesCrossover ? series_j0y0(xl, want_y0) : asymptotic_j0y0(xl);
    r.y0 *= 1.0L + static_cast<ld>(g_y0_perturbation.load(std::memory_order_relaxed));
    return r;
}

}  // namespace

double bessel_j0(double x) {
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("bessel_j0: argument must be finite and non-negative");
    }
    if (x == 0.0) {
        return 1.0;
    }
    return static_cast<double>(eval(x, false).j0);
}

double bessel_y0(double x) {
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw DomainError("bessel_y0: argument must be finite and positive");
    }
    return static_cast<double>(eval(x, true).y0);
}

cplx hankel0(double x) {
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw DomainError("hankel0: argument must be finite and positive");
    }
    const J0Y0 r = eval(x, true);
    return {static_cast<double>(r.j0), static_cast<double>(r.y0)};
}

cplx fundamental_solution_radial(double r, const WaveContext& ctx) {
    if (!(r > 0.0)) {
        throw SingularityError("fundamental solution evaluated at coincident points");
    }
    if (ctx.d == 2) {
        return cplx(0.0, 0.25) * hankel0(ctx.k * r);
    }
    const double kr = ctx.k * r;
    return cplx(std::cos(kr), std::sin(kr)) / (4.0 * kPi * r);
}

cplx fundamental_solution(const Point& x, const Point& y, const WaveContext& ctx) {
    return fundamental_solution_radial(distance(x, y), ctx);
}

cplx farfield_constant(const WaveContext& ctx) {
    ctx.validate();
    const double d = static_cast<double>(ctx.d);
    const double mag = std::pow(ctx.k, (d - 3.0) / 2.0) /
                       (std::pow(2.0, (d + 1.0) / 2.0) * std::pow(kPi, (d - 1.0) / 2.0));
    const double phase = -kPi * (d - 3.0) / 4.0;
    return std::polar(mag, phase);
}

cplx ball_self_integral(double rho, const WaveContext& ctx) {
    if (!(rho > 0.0)) {
        throw DomainError("ball_self_integral: radius must be positive");
    }
    const ld k = static_cast<ld>(ctx.k);
    const ld r = static_cast<ld>(rho);
    if (ctx.d == 3) {
        // int_0^rho e^{ikr} r dr
        const ld kr = k * r;
        if (kr < 1.0L) {
            std::complex<ld> sum = 0.0L;
            std::complex<ld> ikr_pow = 1.0L;  // (ik rho)^n / n!
            for (int n = 0; n < 60; ++n) {
                if (n > 0) {
                    ikr_pow *= std::complex<ld>(0.0L, kr) / static_cast<ld>(n);
                }
                sum += ikr_pow / static_cast<ld>(n + 2);
                if (std::abs(ikr_pow) < 1e-22L) {
                    break;
                }
            }
            const std::complex<ld> val = sum * r * r;
            return {static_cast<double>(val.real()), static_cast<double>(val.imag())};
        }
        const std::complex<ld> e(std::cos(kr), std::sin(kr));
        const std::complex<ld> val = (e * std::complex<ld>(1.0L, -kr) - 1.0L) / (k * k);
        return {static_cast<double>(val.real()), static_cast<double>(val.imag())};
    }

    // d = 2: term-by-term integration of the ascending series of H0^(1).
    const ld s = k * r / 2.0L;
    const ld t = s * s;
    const ld log_s = std::log(s) + kEulerL;
    ld jpart = 0.0L;
    ld ypart = 0.0L;
    ld coeff = 1.0L;  // (-1)^m / (m!)^2 * t^m
    ld harmonic = 0.0L;
    for (int m = 0; m < 200; ++m) {
        if (m > 0) {
            coeff *= -t / (static_cast<ld>(m) * static_cast<ld>(m));
            harmonic += 1.0L / static_cast<ld>(m);
        }
        const ld inv = 1.0L / static_cast<ld>(2 * m + 2);
        const ld base = coeff * inv;
        jpart += base;
        ypart += base * (log_s - inv) - harmonic * base;
        if (static_cast<ld>(m) > t && std::fabs(base) * (1.0L + std::fabs(log_s) + harmonic) < 1e-24L) {
            break;
        }
    }
    ypart *= 2.0L / kPiL;
    const ld scale = 2.0L * kPiL * r * r;
    // (i/4) * scale * (jpart + i ypart)
    const ld re = -0.25L * scale * ypart;
    const ld im = 0.25L * scale * jpart;
    return {static_cast<double>(re), static_cast<double>(im)};
}

namespace testing {
void set_y0_normalisation_perturbation(double relative) {
    g_y0_perturbation.store(relative, std::memory_order_relaxed);
}
double y0_normalisation_perturbation() { return g_y0_perturbation.load(std::memory_order_relaxed); }
}  // namespace testing

}  // namespace specfun
}  // namespace nlscat
