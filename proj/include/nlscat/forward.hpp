#pragma once

// Direct problem: Picard iteration for the nonlinear Lippmann-Schwinger
// equation u_sc = V[a(., u_sc + u_in)] and dense solves of its linear
// specialisation a = q z.

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/LU>

#include "nlscat/fields.hpp"
#include "nlscat/nonlinearity.hpp"

namespace nlscat {

struct ForwardOptions {
    double delta = 0.05;   ///< gate: requires sup|g| < delta^2
    double delta0 = 0.1;   ///< delta must stay below this
    double tol = 1e-10;    ///< absolute sup-norm update tolerance
    double rel_tol = 0.0;  ///< additional tolerance relative to sup|w|
    int max_iter = 200;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    std::optional<double> contraction_estimate;  ///< median successive ratio, needs >= 3 iterations
    double delta_used = 0.0;
    double gate_margin = 0.0;  ///< sup|g| / delta^2
    double solution_sup = 0.0;
};

struct ForwardResult {
    ComplexField u_sc;
    SolveReport report;
};

/// Median of successive residual ratios r_{i+1}/r_i over positive entries.
std::optional<double> contraction_estimate(const std::vector<double>& history);

/// Dense LU of I - V M_q, reused across right-hand sides.
class LinearScatterer {
public:
    LinearScatterer(std::shared_ptr<const PotentialOperator> V, const ComplexField& q);

    const ComplexField& potential() const noexcept { return q_; }
    /// Solves (I - V M_q) x = rhs.
    CVector solve(const CVector& rhs) const;
    /// Solves (I - M_q V) x = rhs. Relies on V being symmetric (uniform cell weights).
    CVector solve_adjoint_side(const CVector& rhs) const;
    CMatrix solve_adjoint_side(const CMatrix& rhs) const;
    CMatrix solve(const CMatrix& rhs) const;
    const PotentialOperator& V() const noexcept { return *V_; }

private:
    std::shared_ptr<const PotentialOperator> V_;
    ComplexField q_;
    Eigen::PartialPivLU<CMatrix> lu_;
};

/// Bundles the discrete operators of one (grid, k, d) so solves can share them.
class ForwardSolver {
public:
    ForwardSolver(GridPtr grid, WaveContext ctx, std::size_t dense_limit = PotentialOperator::kDefaultDenseLimit);

    const GridPtr& grid() const noexcept { return grid_; }
    const WaveContext& context() const noexcept { return ctx_; }
    const PotentialOperator& potential() const noexcept { return *V_; }
    std::shared_ptr<const PotentialOperator> potential_ptr() const noexcept { return V_; }

    /// Fixed point of w -> V[a(w + u_in)] with u_in the Herglotz wave of g.
    ForwardResult solve_nonlinear(const NonlinearityModel& model, const HerglotzDensity& g,
                                  const ForwardOptions& opts, const CVector* w0 = nullptr) const;
    /// Same iteration for an arbitrary incident field; no gate is applied.
    ForwardResult iterate(const NonlinearityModel& model, const ComplexField& u_in, const ForwardOptions& opts,
                          const CVector* w0 = nullptr) const;

    /// u_sc solving (I - V M_q) u_sc = V[q u_in].
    ComplexField solve_linear_total(const ComplexField& q, const ComplexField& u_in) const;
    /// T_q f = f + w with (I - V M_q) w = V[q f].
    ComplexField apply_Tq(const ComplexField& q, const ComplexField& f) const;
    ComplexField apply_TqH(const ComplexField& q, const HerglotzDensity& g) const;

    std::pair<FarField, SolveReport> scattered_far_field(const NonlinearityModel& model, const HerglotzDensity& g,
                                                         const DirectionsPtr& obs, const ForwardOptions& opts) const;

    /// Factorisation for q; the most recent one is cached (guarded, so concurrent solves are safe).
    std::shared_ptr<const LinearScatterer> scatterer(const ComplexField& q) const;

private:
    GridPtr grid_;
    WaveContext ctx_;
    std::shared_ptr<const PotentialOperator> V_;
    mutable std::mutex cache_mutex_;
    mutable std::shared_ptr<const LinearScatterer> cached_;
};

/// Throws GateViolation unless delta < delta0 and sup|g| < delta^2.
void check_gate(const HerglotzDensity& g, const ForwardOptions& opts);

// Convenience wrappers that build the operators on the fly.
ForwardResult solve_nonlinear(const NonlinearityModel& model, const HerglotzDensity& g, const WaveContext& ctx,
                              const ForwardOptions& opts);
ComplexField solve_linear_total(const ComplexField& q, const ComplexField& u_in, const WaveContext& ctx);
ComplexField apply_Tq(const ComplexField& q, const ComplexField& f, const WaveContext& ctx);
ComplexField apply_TqH(const ComplexField& q, const HerglotzDensity& g, const WaveContext& ctx);
std::pair<FarField, SolveReport> scattered_far_field(const NonlinearityModel& model, const HerglotzDensity& g,
                                                     const WaveContext& ctx, const DirectionsPtr& obs,
                                                     const ForwardOptions& opts);

}  // namespace nlscat
