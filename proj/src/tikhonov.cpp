#include "nlscat/tikhonov.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "nlscat/errors.hpp"

namespace nlscat {

double spectral_norm(const CMatrix& A, int max_iter, double tol) {
    if (A.size() == 0) {
        return 0.0;
    }
    CVector v = CVector::Ones(A.cols());
    // Deterministic, non-symmetric start so no singular vector is missed by symmetry.
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i)), 0.21 * std::cos(0.7 * static_cast<double>(i)));
    }
    v.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        CVector w = A.adjoint() * (A * v);
        const double next = w.norm();
        if (next == 0.0) {
            return 0.0;
        }
        v = w / next;
        if (std::fabs(next - sigma2) <= tol * next) {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    return std::sqrt(sigma2);
}

namespace {

struct GramSolver {
    bool wide;  // rows <= cols: work with A A^H
    CMatrix G;
    CVector b;  // d (wide) or A^H d (tall)
};

CVector solve_fixed(const CMatrix& A, const GramSolver& gs, double lambda) {
    CMatrix M = gs.G;
    M.diagonal().array() += lambda;
    Eigen::LLT<CMatrix> llt(M);
    if (llt.info() != Eigen::Success) {
        throw IllPosedError("tikhonov: regularised Gram matrix is not positive definite; increase lambda");
    }
    const CVector y = llt.solve(gs.b);
    return gs.wide ? CVector(A.adjoint() * y) : y;
}

}  // namespace

TikhonovResult tikhonov_solve(const CMatrix& A, const CVector& d, const TikhonovOptions& opts) {
    if (A.rows() != d.size()) {
        throw Error("tikhonov: data length does not match the operator");
    }
    if (!(opts.lambda_rel > 0.0)) {
        throw Error("tikhonov: lambda must be positive");
    }
    TikhonovResult res;
    res.norm_A = spectral_norm(A);
    if (res.norm_A == 0.0 || d.norm() == 0.0) {
        if (d.norm() > 0.0) {
            throw IllPosedError("tikhonov: the forward map vanishes but the data do not; add densities or directions");
        }
        res.x = CVector::Zero(A.cols());
        res.lambda_rel = opts.lambda_rel;
        res.noise_floor = 0.0;
        return res;
    }

    GramSolver gs;
    gs.wide = A.rows() <= A.cols();
    if (gs.wide) {
        gs.G = A * A.adjoint();
        gs.b = d;
    } else {
        gs.G = A.adjoint() * A;
        gs.b = A.adjoint() * d;
    }
    const double scale = res.norm_A * res.norm_A;

    double lam_rel = opts.lambda_rel;
    if (opts.discrepancy && opts.noise > 0.0) {
        // Misfit grows monotonically with lambda; bisect in log(lambda) for misfit = tau * noise.
        const double target = opts.tau * opts.noise;
        auto misfit = [&](double lr) { return (A * solve_fixed(A, gs, lr * scale) - d).norm(); };
        double lo = std::log(opts.lambda_rel);
        double hi = std::log(1.0);
        if (misfit(std::exp(lo)) < target) {
            if (misfit(std::exp(hi)) <= target) {
                lo = hi;
            } else {
                for (int it = 0; it < 40; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (misfit(std::exp(mid)) <= target ? lo : hi) = mid;
                }
            }
        }
        lam_rel = std::exp(lo);
    }
    res.lambda_rel = lam_rel;
    res.lambda_abs = lam_rel * scale;
    res.x = solve_fixed(A, gs, res.lambda_abs);
    for (Eigen::Index i = 0; i < res.x.size(); ++i) {
        if (!std::isfinite(res.x[i].real()) || !std::isfinite(res.x[i].imag())) {
            throw IllPosedError("tikhonov: non-finite solution; the system is too ill-conditioned for this lambda");
        }
    }
    res.misfit = (A * res.x - d).norm();
    res.noise_floor = opts.noise / (2.0 * std::sqrt(res.lambda_abs));
    return res;
}

}  // namespace nlscat
