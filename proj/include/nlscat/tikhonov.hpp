#pragma once

// Tikhonov-regularised least squares: minimise |A x - d|^2 + lambda |x|^2.

#include "nlscat/types.hpp"

namespace nlscat {

struct TikhonovOptions {
    double lambda_rel = 1e-8;   ///< lambda = lambda_rel * |A|_2^2
    bool discrepancy = false;   ///< pick the largest lambda with misfit <= tau * noise
    double noise = 0.0;         ///< estimated data noise |e| for the discrepancy principle
    double tau = 1.5;
};

struct TikhonovResult {
    CVector x;
    double lambda_rel = 0.0;
    double lambda_abs = 0.0;
    double norm_A = 0.0;
    double misfit = 0.0;       ///< |A x - d|
    double noise_floor = 0.0;  ///< |noise| / (2 sqrt(lambda)): bound on |x| driven by data noise
};

/// Largest singular value by power iteration on A^H A from a fixed start vector.
double spectral_norm(const CMatrix& A, int max_iter = 200, double tol = 1e-10);

/// Solves through the smaller Gram matrix. Throws IllPosedError when A
/// vanishes while d does not, or when the regularised system cannot be factored.
TikhonovResult tikhonov_solve(const CMatrix& A, const CVector& d, const TikhonovOptions& opts = {});

}  // namespace nlscat
