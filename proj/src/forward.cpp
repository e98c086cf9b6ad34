#include "nlscat/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlscat/errors.hpp"

namespace nlscat {

std::optional<double> contraction_estimate(const std::vector<double>& history) {
    if (history.size() < 3) {
        return std::nullopt;
    }
    std::vector<double> ratios;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i - 1] > 0.0 && history[i] > 0.0) {
            ratios.push_back(history[i] / history[i - 1]);
        }
    }
    if (ratios.empty()) {
        return std::nullopt;
    }
    std::sort(ratios.begin(), ratios.end());
    const std::size_t n = ratios.size();
    return n % 2 == 1 ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
}

LinearScatterer::LinearScatterer(std::shared_ptr<const PotentialOperator> V, const ComplexField& q)
    : V_(std::move(V)), q_(q) {
    if (!q_.grid()->same_layout(*V_->grid())) {
        throw Error("linear solve: q lives on a different grid");
    }
    const CMatrix& Vm = V_->matrix();
    const auto n = Vm.rows();
    CMatrix A = -(Vm * q_.values().asDiagonal());
    A.diagonal().array() += 1.0;
    lu_.compute(A);
    const double rc = lu_.rcond();
    if (!(rc > 1e-13) || !std::isfinite(rc)) {
        std::ostringstream msg;
        msg << "linear solve: I - V M_q is numerically singular (rcond " << rc << ", n = " << n
            << "); k^2 is near a resonance of the discrete system, perturb k slightly";
        throw SingularSystemError(msg.str());
    }
}

CVector LinearScatterer::solve(const CVector& rhs) const { return lu_.solve(rhs); }

CMatrix LinearScatterer::solve(const CMatrix& rhs) const { return lu_.solve(rhs); }

// (I - M_q V)^{-1} = ((I - V M_q)^{-1})^T when V is symmetric.
CVector LinearScatterer::solve_adjoint_side(const CVector& rhs) const { return lu_.transpose().solve(rhs); }

CMatrix LinearScatterer::solve_adjoint_side(const CMatrix& rhs) const { return lu_.transpose().solve(rhs); }

ForwardSolver::ForwardSolver(GridPtr grid, WaveContext ctx, std::size_t dense_limit)
    : grid_(std::move(grid)), ctx_(ctx), V_(std::make_shared<PotentialOperator>(grid_, ctx, dense_limit)) {}

void check_gate(const HerglotzDensity& g, const ForwardOptions& opts) {
    if (!(opts.delta > 0.0) || !(opts.delta < opts.delta0)) {
        std::ostringstream msg;
        msg << "gate: delta = " << opts.delta << " must lie in (0, delta0 = " << opts.delta0 << ")";
        throw GateViolation(msg.str());
    }
    const double bound = opts.delta * opts.delta;
    if (!(g.norm_sup() < bound)) {
        std::ostringstream msg;
        msg << "gate: sup|g| = " << g.norm_sup() << " is not below delta^2 = " << bound;
        throw GateViolation(msg.str());
    }
}

ForwardResult ForwardSolver::solve_nonlinear(const NonlinearityModel& model, const HerglotzDensity& g,
                                             const ForwardOptions& opts, const CVector* w0) const {
    check_gate(g, opts);
    const ComplexField u_in = herglotz_on_grid(g, ctx_, grid_);
    ForwardResult res = iterate(model, u_in, opts, w0);
    res.report.delta_used = opts.delta;
    res.report.gate_margin = g.norm_sup() / (opts.delta * opts.delta);
    return res;
}

ForwardResult ForwardSolver::iterate(const NonlinearityModel& model, const ComplexField& u_in,
                                     const ForwardOptions& opts, const CVector* w0) const {
    if (!model.grid()->same_layout(*grid_) || !u_in.grid()->same_layout(*grid_)) {
        throw Error("forward solve: model, incident field and solver grids differ");
    }
    if (opts.max_iter < 1) {
        throw Error("forward solve: max_iter must be at least 1");
    }
    const auto n = static_cast<Eigen::Index>(grid_->size());
    CVector w = w0 ? *w0 : CVector::Zero(n);
    if (w.size() != n) {
        throw Error("forward solve: starting iterate has the wrong length");
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();

    SolveReport rep;
    rep.delta_used = opts.delta;
    bool converged = false;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const CVector source = model.evaluate(CVector(w + u_in.values()));
        CVector next = V_->apply(source);
        const double update = sup_norm(next - w);
        const double wsup = sup_norm(next);
        w = std::move(next);
        rep.iterations = it;
        rep.residual_history.push_back(update);
        if (!std::isfinite(update)) {
            throw DivergenceError("forward solve: iterate became non-finite at iteration " + std::to_string(it));
        }
        const double stop = std::max({opts.tol, opts.rel_tol * wsup, 4.0 * eps * wsup});
        const std::size_t h = rep.residual_history.size();
        const bool stagnated = h >= 2 && update >= rep.residual_history[h - 2] && update <= 1e-12 * wsup;
        if (update <= stop || stagnated) {
            converged = true;
            break;
        }
        if (auto gamma = contraction_estimate(rep.residual_history); gamma && *gamma >= 1.0) {
            std::ostringstream msg;
            msg << "forward solve: contraction estimate " << *gamma << " >= 1 after " << it
                << " iterations; delta is too large for this model";
            throw DivergenceError(msg.str());
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "forward solve: no convergence in " << opts.max_iter << " iterations (last update "
            << rep.residual_history.back() << ")";
        throw DivergenceError(msg.str());
    }
    rep.contraction_estimate = contraction_estimate(rep.residual_history);
    rep.solution_sup = sup_norm(w);
    return {ComplexField(grid_, std::move(w)), rep};
}

std::shared_ptr<const LinearScatterer> ForwardSolver::scatterer(const ComplexField& q) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cached_ && cached_->potential().values() == q.values()) {
        return cached_;
    }
    cached_ = std::make_shared<LinearScatterer>(V_, q);
    return cached_;
}

ComplexField ForwardSolver::solve_linear_total(const ComplexField& q, const ComplexField& u_in) const {
    if (q.sup_norm() == 0.0) {
        return ComplexField::zeros(grid_);
    }
    const auto S = scatterer(q);
    const CVector rhs = V_->apply(CVector(q.values().cwiseProduct(u_in.values())));
    return ComplexField(grid_, S->solve(rhs));
}

ComplexField ForwardSolver::apply_Tq(const ComplexField& q, const ComplexField& f) const {
    if (!f.grid()->same_layout(*grid_)) {
        throw Error("apply_Tq: f lives on a different grid");
    }
    if (q.sup_norm() == 0.0) {
        return f;
    }
    const ComplexField w = solve_linear_total(q, f);
    return ComplexField(grid_, f.values() + w.values());
}

ComplexField ForwardSolver::apply_TqH(const ComplexField& q, const HerglotzDensity& g) const {
    return apply_Tq(q, herglotz_on_grid(g, ctx_, grid_));
}

std::pair<FarField, SolveReport> ForwardSolver::scattered_far_field(const NonlinearityModel& model,
                                                                    const HerglotzDensity& g,
                                                                    const DirectionsPtr& obs,
                                                                    const ForwardOptions& opts) const {
    check_gate(g, opts);
    const ComplexField u_in = herglotz_on_grid(g, ctx_, grid_);
    ForwardResult r = iterate(model, u_in, opts);
    r.report.gate_margin = g.norm_sup() / (opts.delta * opts.delta);
    const ComplexField source(grid_, model.evaluate(CVector(r.u_sc.values() + u_in.values())));
    return {far_field_of_source(source, ctx_, obs), r.report};
}

ForwardResult solve_nonlinear(const NonlinearityModel& model, const HerglotzDensity& g, const WaveContext& ctx,
                              const ForwardOptions& opts) {
    check_gate(g, opts);
    return ForwardSolver(model.grid(), ctx).solve_nonlinear(model, g, opts);
}

ComplexField solve_linear_total(const ComplexField& q, const ComplexField& u_in, const WaveContext& ctx) {
    return ForwardSolver(q.grid(), ctx).solve_linear_total(q, u_in);
}

ComplexField apply_Tq(const ComplexField& q, const ComplexField& f, const WaveContext& ctx) {
    return ForwardSolver(q.grid(), ctx).apply_Tq(q, f);
}

ComplexField apply_TqH(const ComplexField& q, const HerglotzDensity& g, const WaveContext& ctx) {
    return ForwardSolver(q.grid(), ctx).apply_TqH(q, g);
}

std::pair<FarField, SolveReport> scattered_far_field(const NonlinearityModel& model, const HerglotzDensity& g,
                                                     const WaveContext& ctx, const DirectionsPtr& obs,
                                                     const ForwardOptions& opts) {
    check_gate(g, opts);
    return ForwardSolver(model.grid(), ctx).scattered_far_field(model, g, obs, opts);
}

}  // namespace nlscat
