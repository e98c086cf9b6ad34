#include "nlscat/near_field.hpp"

#include <cmath>
#include <vector>

#include "nlscat/errors.hpp"

namespace nlscat {

namespace detail {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) {
                break;
            }
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
}

double sphere_monomial_integral(const std::array<int, 3>& a, int d) {
    double num = 2.0;
    int total = 0;
    for (int i = 0; i < d; ++i) {
        if (a[i] % 2 != 0) {
            return 0.0;
        }
        num *= std::tgamma(0.5 * (a[i] + 1));
        total += a[i];
    }
    return num / std::tgamma(0.5 * (total + d));
}

}  // namespace detail

namespace {

// Smooth step: 0 at t <= 0, 1 at t >= 1, all derivatives vanish at both ends.
double smooth_step(double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= 1.0) {
        return 1.0;
    }
    const double e0 = std::exp(-1.0 / t);
    const double e1 = std::exp(-1.0 / (1.0 - t));
    return e0 / (e0 + e1);
}

struct Cutoff {
    double a;
    double b;
    double chi(double r) const { return 1.0 - smooth_step((r - a) / (b - a)); }
};

std::vector<std::array<int, 3>> monomials(int degree, int d) {
    std::vector<std::array<int, 3>> out;
    for (int total = 0; total <= degree; ++total) {
        for (int i = total; i >= 0; --i) {
            if (d == 2) {
                out.push_back({i, total - i, 0});
                continue;
            }
            for (int j = total - i; j >= 0; --j) {
                out.push_back({i, j, total - i - j});
            }
        }
    }
    return out;
}

// M_m = int_0^b Phi(r) chi(r) (r/b)^m r^{d-1} dr for m = 0..degree.
std::vector<cplx> radial_moments(const Cutoff& cut, const WaveContext& ctx, int degree) {
    std::vector<double> gx;
    std::vector<double> gw;
    detail::gauss_legendre(64, gx, gw);
    std::vector<cplx> M(static_cast<std::size_t>(degree + 1), cplx{});
    auto add = [&](double r, double dr) {
        const cplx phi = specfun::fundamental_solution_radial(r, ctx) * cut.chi(r) * std::pow(r, ctx.d - 1) * dr;
        double s = 1.0;
        for (int m = 0; m <= degree; ++m) {
            M[static_cast<std::size_t>(m)] += phi * s;
            s *= r / cut.b;
        }
    };
    // [0, a] with r = a s^2 to tame the kernel singularity.
    for (std::size_t q = 0; q < gx.size(); ++q) {
        const double s = 0.5 * (gx[q] + 1.0);
        add(cut.a * s * s, cut.a * 2.0 * s * 0.5 * gw[q]);
    }
    constexpr int kPanels = 4;
    const double width = (cut.b - cut.a) / kPanels;
    for (int p = 0; p < kPanels; ++p) {
        const double lo = cut.a + p * width;
        for (std::size_t q = 0; q < gx.size(); ++q) {
            add(lo + 0.5 * width * (gx[q] + 1.0), 0.5 * width * gw[q]);
        }
    }
    return M;
}

}  // namespace

CVector corrected_potential(const ComplexField& f, const WaveContext& ctx, std::span<const Point> targets,
                            const NearFieldOptions& opts) {
    ctx.validate();
    const DiskGrid& grid = *f.grid();
    const int d = grid.dimension();
    const double h = grid.spacing();
    const double R = grid.radius();
    Cutoff cut{};
    cut.a = opts.inner > 0.0 ? opts.inner : std::max(0.04 * R, h);
    cut.b = opts.outer > 0.0 ? opts.outer : std::max(0.25 * R, cut.a + 6.0 * h);
    if (!(cut.b > cut.a) || opts.degree < 0) {
        throw ConstructionError("corrected potential: need 0 < inner < outer and degree >= 0");
    }

    const auto alphas = monomials(opts.degree, d);
    const auto moments = radial_moments(cut, ctx, opts.degree);
    std::vector<cplx> weights(alphas.size());
    for (std::size_t m = 0; m < alphas.size(); ++m) {
        const int total = alphas[m][0] + alphas[m][1] + alphas[m][2];
        weights[m] = detail::sphere_monomial_integral(alphas[m], d) * moments[static_cast<std::size_t>(total)];
    }

    const auto nt = static_cast<std::int64_t>(targets.size());
    CVector out(nt);
    const double reach = cut.b + 1.5 * h;
    const CVector& fv = f.values();

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < nt; ++t) {
        const Point& x = targets[static_cast<std::size_t>(t)];

        cplx far = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double r = distance(x, grid.node(j));
            if (r <= cut.a || fv[static_cast<Eigen::Index>(j)] == cplx{}) {
                continue;
            }
            far += specfun::fundamental_solution_radial(r, ctx) * (1.0 - cut.chi(r)) *
                   (grid.weight(j) * fv[static_cast<Eigen::Index>(j)]);
        }

        // Lattice points within reach; cells outside the ball contribute zeros.
        std::array<int, 3> lo{0, 0, 0};
        std::array<int, 3> hi{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            lo[a] = static_cast<int>(std::ceil((x[a] - reach + R) / h - 0.5));
            hi[a] = static_cast<int>(std::floor((x[a] + reach + R) / h - 0.5));
        }
        std::vector<Point> pts;
        std::vector<cplx> vals;
        bool nonzero = false;
        std::array<int, 3> idx{0, 0, 0};
        for (idx[0] = lo[0]; idx[0] <= hi[0]; ++idx[0]) {
            for (idx[1] = lo[1]; idx[1] <= hi[1]; ++idx[1]) {
                for (idx[2] = d == 3 ? lo[2] : 0; idx[2] <= (d == 3 ? hi[2] : 0); ++idx[2]) {
                    const Point p = grid.lattice_point(idx);
                    if (distance(p, x) > reach) {
                        continue;
                    }
                    const auto id = grid.node_at(idx);
                    const cplx v = id ? fv[static_cast<Eigen::Index>(*id)] : cplx{};
                    nonzero = nonzero || v != cplx{};
                    pts.push_back(p);
                    vals.push_back(v);
                }
            }
        }

        cplx near = 0.0;
        if (nonzero) {
            Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(alphas.size()));
            Eigen::MatrixXd F(static_cast<Eigen::Index>(pts.size()), 2);
            for (std::size_t p = 0; p < pts.size(); ++p) {
                const auto row = static_cast<Eigen::Index>(p);
                std::array<double, 3> u{0.0, 0.0, 0.0};
                for (int a = 0; a < d; ++a) {
                    u[a] = (pts[p][a] - x[a]) / cut.b;
                }
                for (std::size_t m = 0; m < alphas.size(); ++m) {
                    double v = 1.0;
                    for (int a = 0; a < d; ++a) {
                        for (int e = 0; e < alphas[m][a]; ++e) {
                            v *= u[a];
                        }
                    }
                    A(row, static_cast<Eigen::Index>(m)) = v;
                }
                F(row, 0) = vals[p].real();
                F(row, 1) = vals[p].imag();
            }
            const Eigen::MatrixXd C = A.colPivHouseholderQr().solve(F);
            for (std::size_t m = 0; m < alphas.size(); ++m) {
                const auto mi = static_cast<Eigen::Index>(m);
                near += cplx(C(mi, 0), C(mi, 1)) * weights[m];
            }
        }
        out[t] = far + near;
    }
    return out;
}

}  // namespace nlscat
