#pragma once

// Reconstruction of the derivatives d^l a / dz^l (x, 0) from far-field data:
// an outer fixed point for the linear coefficient, then order-by-order
// peeling where the contribution of the known lower coefficients is
// predicted by a surrogate model and subtracted from the data.

#include <optional>
#include <vector>

#include "nlscat/linearize.hpp"
#include "nlscat/tikhonov.hpp"

namespace nlscat {

struct OrderDiagnostics {
    int order = 1;
    int iterations = 0;
    bool converged = true;
    std::size_t rows = 0;
    std::size_t unknowns = 0;
    double misfit = 0.0;           ///< |A x - d|
    double relative_misfit = 0.0;  ///< |A x - d| / |d|
    double lambda_rel = 0.0;
    double lambda_abs = 0.0;
    double noise = 0.0;            ///< Richardson estimate of the data noise
    double noise_floor = 0.0;
    std::vector<double> misfit_history;
    std::vector<double> change_history;
};

struct InverseOptions {
    std::vector<double> lambda_schedule{1e-8};  ///< relative lambda per order; the last entry is reused
    int max_outer = 20;
    double outer_tol = 1e-4;
    bool discrepancy = false;
    double tau = 1.5;
    /// Nodes with |x| >= support_radius are fixed to zero; empty uses the grid radius.
    std::optional<double> support_radius;
    SynthesisOptions surrogate = default_synthesis_options();

    double lambda_for(int order) const;
};

struct OrderResult {
    ComplexField field;
    OrderDiagnostics diagnostics;
};

struct ReconstructionResult {
    std::vector<ComplexField> coefficients;  ///< recovered d_l, l = 1..L
    std::vector<double> residuals;           ///< per-order relative data misfit
    std::vector<double> lambdas;             ///< per-order relative lambda used
    std::vector<int> iterations;
    std::vector<OrderDiagnostics> diagnostics;
};

/// The solver defines the reconstruction grid and wave context.
OrderResult recover_first_order(const ScatteringDataset& data, const ForwardSolver& solver,
                                const InverseOptions& opts);

/// known holds d_1 .. d_{l-1} on the solver grid.
OrderResult recover_higher_order(int l, const std::vector<ComplexField>& known, const ScatteringDataset& data,
                                 const ForwardSolver& solver, const InverseOptions& opts);

/// Orders 1..L in sequence. Errors carry the order that failed in their message.
ReconstructionResult recover_all(const ScatteringDataset& data, const ForwardSolver& solver, int L,
                                 const InverseOptions& opts);

/// Far-field data isolated for order l and subset S: mixed derivative of the
/// data minus the surrogate's prediction. Exposed for tests and diagnostics.
std::vector<CVector> isolated_residuals(int l, const std::vector<ComplexField>& known, const ScatteringDataset& data,
                                        const ForwardSolver& solver, const InverseOptions& opts,
                                        std::vector<std::vector<int>>* subsets = nullptr);

struct ProbePoint {
    int m = 0;
    double residual = 0.0;
};

/// Relative residual of the best (lambda = 1e-12 |A|^2) fit of target by
/// T_q H over m equispaced directions, for each m in the schedule.
std::vector<ProbePoint> dense_range_probe(const ForwardSolver& solver, const ComplexField& q,
                                          const ComplexField& target, const std::vector<int>& m_schedule);

}  // namespace nlscat
