#include "nlscat/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nlscat/errors.hpp"

namespace nlscat {
namespace {

std::vector<std::size_t> support_columns(const DiskGrid& grid, const InverseOptions& opts) {
    const double Rs = opts.support_radius ? *opts.support_radius : grid.radius();
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (norm(grid.node(i)) < Rs) {
            cols.push_back(i);
        }
    }
    return cols;
}

ComplexField scatter_to_grid(const GridPtr& grid, const std::vector<std::size_t>& cols, const CVector& x) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(grid->size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        v[static_cast<Eigen::Index>(cols[c])] = x[static_cast<Eigen::Index>(c)];
    }
    return ComplexField(grid, std::move(v));
}

// Rows M * diag(u) restricted to the support columns, written into A at row offset.
void put_block(CMatrix& A, Eigen::Index row, const CMatrix& M, const CVector& u, const std::vector<std::size_t>& cols) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto j = static_cast<Eigen::Index>(cols[c]);
        A.block(row, static_cast<Eigen::Index>(c), M.rows(), 1) = M.col(j) * u[j];
    }
}

std::vector<int> unit_alpha(std::size_t P, std::size_t l) {
    std::vector<int> a(P, 0);
    a[l] = 1;
    return a;
}

std::vector<std::vector<int>> subsets_of_size(std::size_t P, int l) {
    std::vector<std::vector<int>> out;
    std::vector<int> choose(P, 0);
    std::fill(choose.begin(), choose.begin() + l, 1);
    // prev_permutation from 1..10..0 enumerates subsets in lexicographic order of their members.
    do {
        out.push_back(choose);
    } while (std::prev_permutation(choose.begin(), choose.end()));
    return out;
}

void check_solver(const ScatteringDataset& data, const ForwardSolver& solver) {
    if (!data.plan) {
        throw Error("inverse: dataset has no plan");
    }
    if (data.plan->obs->dimension() != solver.context().d) {
        throw Error("inverse: dataset dimension differs from the reconstruction grid");
    }
}

CVector total_first_order(const ForwardSolver& solver, const ComplexField& q, const HerglotzDensity& g, double delta) {
    return (delta * delta) * solver.apply_TqH(q, g).values();
}

}  // namespace

double InverseOptions::lambda_for(int order) const {
    if (lambda_schedule.empty()) {
        throw ConfigError("inverse.lambda_schedule: must not be empty");
    }
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(order - 1), lambda_schedule.size() - 1);
    return lambda_schedule[i];
}

OrderResult recover_first_order(const ScatteringDataset& data, const ForwardSolver& solver,
                                const InverseOptions& opts) {
    check_solver(data, solver);
    const ExperimentPlan& plan = *data.plan;
    const std::size_t P = plan.parameter_count();
    const GridPtr& grid = solver.grid();
    const auto cols = support_columns(*grid, opts);
    const CMatrix E = FarFieldOperator(grid, plan.obs, solver.context()).matrix();
    const auto nobs = static_cast<Eigen::Index>(plan.obs->size());

    CVector d(static_cast<Eigen::Index>(P) * nobs);
    double noise2 = 0.0;
    for (std::size_t l = 0; l < P; ++l) {
        const MixedDerivative md = mixed_derivative(data, unit_alpha(P, l));
        d.segment(static_cast<Eigen::Index>(l) * nobs, nobs) = md.value.values();
        noise2 += md.noise * md.noise;
    }

    OrderDiagnostics diag;
    diag.order = 1;
    diag.noise = std::sqrt(noise2);
    diag.rows = static_cast<std::size_t>(d.size());
    diag.unknowns = cols.size();
    diag.converged = false;

    ComplexField q = ComplexField::zeros(grid);
    TikhonovOptions to;
    to.lambda_rel = opts.lambda_for(1);
    to.discrepancy = opts.discrepancy;
    to.noise = diag.noise;
    to.tau = opts.tau;

    const int max_outer = std::max(1, opts.max_outer);
    for (int it = 1; it <= max_outer; ++it) {
        CMatrix A(d.size(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t l = 0; l < P; ++l) {
            const CVector u = total_first_order(solver, q, plan.densities[l], plan.delta);
            put_block(A, static_cast<Eigen::Index>(l) * nobs, E, u, cols);
        }
        const TikhonovResult tr = tikhonov_solve(A, d, to);
        ComplexField next = scatter_to_grid(grid, cols, tr.x);
        const double nn = next.l2_norm();
        const double change = nn > 0.0 ? ComplexField(grid, next.values() - q.values()).l2_norm() / nn : 0.0;
        q = std::move(next);

        diag.iterations = it;
        diag.change_history.push_back(change);
        diag.misfit = tr.misfit;
        diag.relative_misfit = d.norm() > 0.0 ? tr.misfit / d.norm() : 0.0;
        diag.misfit_history.push_back(diag.relative_misfit);
        diag.lambda_rel = tr.lambda_rel;
        diag.lambda_abs = tr.lambda_abs;
        diag.noise_floor = tr.noise_floor;

        if (!std::isfinite(change)) {
            throw DivergenceError("first-order recovery: outer iterate became non-finite");
        }
        if (change < opts.outer_tol) {
            diag.converged = true;
            break;
        }
        const auto& ch = diag.change_history;
        if (ch.size() >= 4 && ch.back() > 1.0 && ch.back() > ch[ch.size() - 2] && ch[ch.size() - 2] > ch[ch.size() - 3]) {
            std::ostringstream msg;
            msg << "first-order recovery: outer iteration diverges (relative change " << ch.back()
                << "); the scattering potential is too strong for this fixed point";
            throw DivergenceError(msg.str());
        }
    }
    if (max_outer == 1) {
        diag.converged = true;
    }
    return {std::move(q), diag};
}

std::vector<CVector> isolated_residuals(int l, const std::vector<ComplexField>& known, const ScatteringDataset& data,
                                        const ForwardSolver& solver, const InverseOptions& opts,
                                        std::vector<std::vector<int>>* subsets_out) {
    check_solver(data, solver);
    const ExperimentPlan& plan = *data.plan;
    const std::size_t P = plan.parameter_count();
    if (l < 2 || l > static_cast<int>(P)) {
        throw Error("higher-order recovery: order " + std::to_string(l) + " outside 2..N+1");
    }
    if (static_cast<int>(known.size()) < l - 1) {
        throw Error("higher-order recovery: coefficients of orders 1.." + std::to_string(l - 1) +
                    " must be known before order " + std::to_string(l));
    }
    for (const auto& k : known) {
        if (!k.grid()->same_layout(*solver.grid())) {
            throw Error("higher-order recovery: known coefficients must live on the reconstruction grid");
        }
    }

    // Surrogate: known lower orders, order l and above set to zero.
    std::vector<ComplexField> derivs(known.begin(), known.begin() + (l - 1));
    derivs.push_back(ComplexField::zeros(solver.grid()));
    double c0 = 1.0;
    for (std::size_t i = 0; i < derivs.size(); ++i) {
        c0 = std::max(c0, std::pow(derivs[i].sup_norm(), 1.0 / static_cast<double>(i + 1)));
    }
    const NonlinearityModel surrogate = NonlinearityModel::from_derivatives(derivs, c0, 1e300);

    const auto subsets = subsets_of_size(P, l);
    std::set<EpsIndex> need;
    for (const auto& S : subsets) {
        for (const auto& idx : plan.records_for(S)) {
            need.insert(idx);
        }
    }
    const std::vector<EpsIndex> needed(need.begin(), need.end());
    const ScatteringDataset predicted = synthesize_dataset(solver, surrogate, data.plan, opts.surrogate, &needed);
    if (!predicted.complete) {
        throw IllPosedError("higher-order recovery: surrogate synthesis failed: " + predicted.failed.front().key + ": " +
                            predicted.failed.front().message);
    }

    std::vector<CVector> out;
    for (const auto& S : subsets) {
        const MixedDerivative md = mixed_derivative(data, S);
        const MixedDerivative ms = mixed_derivative(predicted, S);
        out.push_back(md.value.values() - ms.value.values());
    }
    if (subsets_out) {
        *subsets_out = subsets;
    }
    return out;
}

OrderResult recover_higher_order(int l, const std::vector<ComplexField>& known, const ScatteringDataset& data,
                                 const ForwardSolver& solver, const InverseOptions& opts) {
    std::vector<std::vector<int>> subsets;
    const std::vector<CVector> resid = isolated_residuals(l, known, data, solver, opts, &subsets);
    const ExperimentPlan& plan = *data.plan;
    const GridPtr& grid = solver.grid();
    const auto cols = support_columns(*grid, opts);
    const auto nobs = static_cast<Eigen::Index>(plan.obs->size());
    const ComplexField& q = known.front();

    // G = E (I - M_q V)^{-1}: far field of the radiating solution driven by a unit source.
    const CMatrix E = FarFieldOperator(grid, plan.obs, solver.context()).matrix();
    CMatrix G;
    if (q.sup_norm() == 0.0) {
        G = E;
    } else {
        G = solver.scatterer(q)->solve(CMatrix(E.transpose())).transpose();
    }
    std::vector<CVector> u;
    for (const auto& g : plan.densities) {
        u.push_back(total_first_order(solver, q, g, plan.delta));
    }

    double noise2 = 0.0;
    CMatrix A(static_cast<Eigen::Index>(subsets.size()) * nobs, static_cast<Eigen::Index>(cols.size()));
    CVector d(A.rows());
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        CVector prod = CVector::Ones(static_cast<Eigen::Index>(grid->size()));
        for (std::size_t h = 0; h < subsets[s].size(); ++h) {
            if (subsets[s][h]) {
                prod = prod.cwiseProduct(u[h]);
            }
        }
        const auto row = static_cast<Eigen::Index>(s) * nobs;
        put_block(A, row, G, prod, cols);
        d.segment(row, nobs) = resid[s];
        const double n = mixed_derivative(data, subsets[s]).noise;
        noise2 += n * n;
    }

    OrderDiagnostics diag;
    diag.order = l;
    diag.iterations = 1;
    diag.rows = static_cast<std::size_t>(A.rows());
    diag.unknowns = cols.size();
    diag.noise = std::sqrt(noise2);

    TikhonovOptions to;
    to.lambda_rel = opts.lambda_for(l);
    to.discrepancy = opts.discrepancy;
    to.noise = diag.noise;
    to.tau = opts.tau;
    const TikhonovResult tr = tikhonov_solve(A, d, to);
    diag.misfit = tr.misfit;
    diag.relative_misfit = d.norm() > 0.0 ? tr.misfit / d.norm() : 0.0;
    diag.misfit_history.push_back(diag.relative_misfit);
    diag.lambda_rel = tr.lambda_rel;
    diag.lambda_abs = tr.lambda_abs;
    diag.noise_floor = tr.noise_floor;
    return {scatter_to_grid(grid, cols, tr.x), diag};
}

ReconstructionResult recover_all(const ScatteringDataset& data, const ForwardSolver& solver, int L,
                                 const InverseOptions& opts) {
    check_solver(data, solver);
    if (L < 1 || L > static_cast<int>(data.plan->parameter_count())) {
        throw Error("recover_all: L must lie in 1..N+1");
    }
    if (L > data.plan->max_order) {
        throw IllPosedError("recover_all: dataset supports derivatives up to order " +
                            std::to_string(data.plan->max_order) + ", requested " + std::to_string(L));
    }
    ReconstructionResult res;
    auto record = [&](OrderResult&& r) {
        res.residuals.push_back(r.diagnostics.relative_misfit);
        res.lambdas.push_back(r.diagnostics.lambda_rel);
        res.iterations.push_back(r.diagnostics.iterations);
        res.diagnostics.push_back(r.diagnostics);
        res.coefficients.push_back(std::move(r.field));
    };
    for (int l = 1; l <= L; ++l) {
        const std::string where = "order " + std::to_string(l) + " (orders 1.." + std::to_string(l - 1) +
                                  " recovered): ";
        try {
            record(l == 1 ? recover_first_order(data, solver, opts)
                          : recover_higher_order(l, res.coefficients, data, solver, opts));
        } catch (const MissingRecordsError& e) {
            throw MissingRecordsError(where + e.what(), e.missing());
        } catch (const IllPosedError& e) {
            throw IllPosedError(where + e.what());
        } catch (const DivergenceError& e) {
            throw DivergenceError(where + e.what());
        }
    }
    return res;
}

std::vector<ProbePoint> dense_range_probe(const ForwardSolver& solver, const ComplexField& q,
                                          const ComplexField& target, const std::vector<int>& m_schedule) {
    if (!target.grid()->same_layout(*solver.grid())) {
        throw Error("dense range probe: target lives on a different grid");
    }
    const double tn = target.values().norm();
    std::vector<ProbePoint> out;
    for (int m : m_schedule) {
        const auto dirs = DirectionSet::build(m, solver.context().d);
        const CMatrix H = HerglotzOperator(solver.grid(), dirs, solver.context()).matrix();
        // T_q = (I - V M_q)^{-1}, since (I - V M_q)(f + w) = f.
        const CMatrix A = q.sup_norm() == 0.0 ? H : solver.scatterer(q)->solve(H);
        TikhonovOptions to;
        to.lambda_rel = 1e-12;
        const TikhonovResult tr = tikhonov_solve(A, target.values(), to);
        out.push_back({m, tn > 0.0 ? tr.misfit / tn : 0.0});
    }
    return out;
}

}  // namespace nlscat
