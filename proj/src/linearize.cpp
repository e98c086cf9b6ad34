#include "nlscat/linearize.hpp"

#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "nlscat/errors.hpp"

namespace nlscat {
namespace {

// Calls fn for every tuple in values^m.
template <typename Fn>
void for_each_tuple(int m, const std::vector<int>& values, Fn&& fn) {
    std::vector<std::size_t> pos(static_cast<std::size_t>(m), 0);
    std::vector<int> tuple(static_cast<std::size_t>(m));
    while (true) {
        for (int i = 0; i < m; ++i) {
            tuple[static_cast<std::size_t>(i)] = values[pos[static_cast<std::size_t>(i)]];
        }
        fn(tuple, pos);
        int i = m - 1;
        while (i >= 0 && ++pos[static_cast<std::size_t>(i)] == values.size()) {
            pos[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) {
            return;
        }
    }
}

std::vector<std::size_t> support(const std::vector<int>& alpha) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (alpha[j] != 0) {
            s.push_back(j);
        }
    }
    return s;
}

void check_alpha(const ExperimentPlan& plan, const std::vector<int>& alpha) {
    if (alpha.size() != plan.parameter_count()) {
        throw Error("mixed derivative: multi-index has " + std::to_string(alpha.size()) + " entries, plan has " +
                    std::to_string(plan.parameter_count()) + " densities");
    }
    int total = 0;
    for (int a : alpha) {
        if (a != 0 && a != 1) {
            throw Error("mixed derivative: each multi-index component must be 0 or 1");
        }
        total += a;
    }
    if (total < 1) {
        throw Error("mixed derivative: multi-index must be non-zero");
    }
}

}  // namespace

std::string format_eps_key(const EpsIndex& idx) {
    std::ostringstream s;
    s << "eps:(";
    for (std::size_t i = 0; i < idx.size(); ++i) {
        s << (i ? "," : "") << idx[i];
    }
    s << ")";
    return s.str();
}

EpsIndex parse_eps_key(const std::string& key) {
    static const std::regex re(R"(^eps:\((\d+(?:,\d+)*)\)$)");
    std::smatch m;
    if (!std::regex_match(key, m, re)) {
        throw Error("malformed record key '" + key + "'");
    }
    EpsIndex idx;
    std::stringstream ss(m[1].str());
    std::string part;
    while (std::getline(ss, part, ',')) {
        idx.push_back(std::stoi(part));
    }
    return idx;
}

std::vector<double> ExperimentPlan::default_ladder(double delta) { return {delta / 4.0, delta / 8.0, delta / 16.0}; }

void ExperimentPlan::validate() const {
    if (densities.empty()) {
        throw ConstructionError("plan: at least one density is required");
    }
    if (!obs) {
        throw ConstructionError("plan: observation directions are missing");
    }
    for (const auto& g : densities) {
        if (!g.directions()->same_layout(*densities.front().directions())) {
            throw ConstructionError("plan: all densities must share one direction set");
        }
        if (g.directions()->dimension() != obs->dimension()) {
            throw ConstructionError("plan: densities and observation directions differ in dimension");
        }
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ConstructionError("plan: delta must be positive");
    }
    if (eps_ladder.empty()) {
        throw ConstructionError("plan: eps ladder is empty");
    }
    for (std::size_t s = 0; s < eps_ladder.size(); ++s) {
        if (!(eps_ladder[s] > 0.0) || !(eps_ladder[s] < delta)) {
            throw ConstructionError("plan: eps ladder entries must lie in (0, delta)");
        }
        if (s > 0 && !(eps_ladder[s] < eps_ladder[s - 1])) {
            throw ConstructionError("plan: eps ladder must be strictly decreasing");
        }
    }
    if (fd_scheme != 1 && fd_scheme != 2) {
        throw ConstructionError("plan: fd_scheme must be 1 or 2");
    }
    if (fd_scheme == 2) {
        if (eps_ladder.size() < 2) {
            throw ConstructionError("plan: fd_scheme 2 needs at least two ladder steps");
        }
        for (std::size_t s = 1; s < eps_ladder.size(); ++s) {
            if (std::fabs(2.0 * eps_ladder[s] - eps_ladder[s - 1]) > 1e-12 * eps_ladder[s - 1]) {
                throw ConstructionError("plan: fd_scheme 2 needs a ladder that halves at every step");
            }
        }
    }
    if (max_order < 1 || max_order > static_cast<int>(densities.size())) {
        throw ConstructionError("plan: max_order must lie in 1..N+1");
    }
    for (std::size_t j = 0; j < densities.size(); ++j) {
        if (!(eps_ladder.front() * densities[j].norm_sup() < 1.0)) {
            throw ConstructionError("plan: density " + std::to_string(j + 1) +
                                    " violates the gate at the largest ladder step");
        }
    }
}

std::vector<int> ExperimentPlan::stencil_levels() const {
    std::vector<int> levels;
    for (int s = fd_scheme == 2 ? 2 : 1; s <= static_cast<int>(eps_ladder.size()); ++s) {
        levels.push_back(s);
    }
    return levels;
}

std::vector<EpsIndex> ExperimentPlan::required_records() const {
    const int P = static_cast<int>(densities.size());
    std::vector<int> ordinals;
    for (int s = 0; s <= static_cast<int>(eps_ladder.size()); ++s) {
        ordinals.push_back(s);
    }
    std::set<EpsIndex> out;
    // Full tensor family over every support of size <= max_order.
    for (int m = 1; m <= max_order; ++m) {
        std::vector<int> choose(static_cast<std::size_t>(P), 0);
        std::fill(choose.end() - m, choose.end(), 1);
        do {
            std::vector<std::size_t> supp;
            for (int j = 0; j < P; ++j) {
                if (choose[static_cast<std::size_t>(j)]) {
                    supp.push_back(static_cast<std::size_t>(j));
                }
            }
            for_each_tuple(m, ordinals, [&](const std::vector<int>& t, const std::vector<std::size_t>&) {
                EpsIndex idx(static_cast<std::size_t>(P), 0);
                for (std::size_t i = 0; i < supp.size(); ++i) {
                    idx[supp[i]] = t[i];
                }
                out.insert(idx);
            });
        } while (std::next_permutation(choose.begin(), choose.end()));
    }
    return {out.begin(), out.end()};
}

std::vector<EpsIndex> ExperimentPlan::records_for(const std::vector<int>& alpha) const {
    check_alpha(*this, alpha);
    const auto supp = support(alpha);
    const int m = static_cast<int>(supp.size());
    std::set<EpsIndex> out;
    for (int s : stencil_levels()) {
        std::vector<int> ords = fd_scheme == 1 ? std::vector<int>{0, s} : std::vector<int>{0, s, s - 1};
        for_each_tuple(m, ords, [&](const std::vector<int>& t, const std::vector<std::size_t>&) {
            EpsIndex idx(parameter_count(), 0);
            for (std::size_t i = 0; i < supp.size(); ++i) {
                idx[supp[i]] = t[i];
            }
            out.insert(idx);
        });
    }
    return {out.begin(), out.end()};
}

HerglotzDensity ExperimentPlan::incident_density(const EpsIndex& idx) const {
    if (idx.size() != densities.size()) {
        throw Error("plan: record index length differs from the density count");
    }
    CVector v = CVector::Zero(static_cast<Eigen::Index>(densities.front().size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] < 0 || idx[j] > static_cast<int>(eps_ladder.size())) {
            throw Error("plan: record index " + format_eps_key(idx) + " outside the ladder");
        }
        if (idx[j] == 0) {
            continue;
        }
        const double eps = eps_ladder[static_cast<std::size_t>(idx[j] - 1)];
        v += (eps * delta * delta) * densities[j].values();
    }
    return HerglotzDensity(densities.front().directions(), std::move(v));
}

SynthesisOptions default_synthesis_options() {
    SynthesisOptions o;
    o.forward.tol = 0.0;
    o.forward.rel_tol = 1e-14;
    o.forward.max_iter = 500;
    return o;
}

ScatteringDataset synthesize_dataset(const NonlinearityModel& model, std::shared_ptr<const ExperimentPlan> plan,
                                     const WaveContext& ctx, const SynthesisOptions& opts) {
    const ForwardSolver solver(model.grid(), ctx);
    return synthesize_dataset(solver, model, std::move(plan), opts);
}

ScatteringDataset synthesize_dataset(const ForwardSolver& solver, const NonlinearityModel& model,
                                     std::shared_ptr<const ExperimentPlan> plan, const SynthesisOptions& opts,
                                     const std::vector<EpsIndex>* only) {
    plan->validate();
    ScatteringDataset data;
    data.plan = plan;
    std::ostringstream prov;
    prov << "model: L=" << model.order() << ", c0=" << model.c0() << ", eta=" << model.eta()
         << ", nodes=" << model.grid()->size();
    data.provenance = prov.str();

    ForwardOptions fo = opts.forward;
    fo.delta = plan->delta;
    const FarFieldOperator E(solver.grid(), plan->obs, solver.context());
    const std::vector<EpsIndex> all = only ? *only : plan->required_records();
    for (const auto& idx : all) {
        try {
            const HerglotzDensity g = plan->incident_density(idx);
            check_gate(g, fo);
            const ComplexField u_in = herglotz_on_grid(g, solver.context(), solver.grid());
            const ForwardResult r = solver.iterate(model, u_in, fo);
            const ComplexField src(solver.grid(), model.evaluate(CVector(r.u_sc.values() + u_in.values())));
            data.records.emplace(idx, E.apply(src));
        } catch (const GateViolation& e) {
            data.complete = false;
            data.failed.push_back({format_eps_key(idx), "gate", e.what()});
        } catch (const AnalyticityError& e) {
            data.complete = false;
            data.failed.push_back({format_eps_key(idx), "analyticity", e.what()});
        } catch (const DivergenceError& e) {
            data.complete = false;
            data.failed.push_back({format_eps_key(idx), "divergence", e.what()});
        } catch (const Error& e) {
            data.complete = false;
            data.failed.push_back({format_eps_key(idx), "solver", e.what()});
        }
    }
    return data;
}

CVector richardson(const std::vector<double>& steps, const std::vector<CVector>& values, int p) {
    const auto L = static_cast<Eigen::Index>(steps.size());
    if (L == 0 || values.size() != steps.size()) {
        throw Error("richardson: need one value per step");
    }
    if (L == 1) {
        return values.front();
    }
    // Weights w with sum w = 1 and sum w h^e = 0 for e = p .. p+L-2.
    const double scale = steps.front();
    Eigen::MatrixXd M(L, L);
    for (Eigen::Index i = 0; i < L; ++i) {
        M(0, i) = 1.0;
        for (Eigen::Index e = 1; e < L; ++e) {
            M(e, i) = std::pow(steps[static_cast<std::size_t>(i)] / scale, p + e - 1);
        }
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L);
    rhs[0] = 1.0;
    const Eigen::VectorXd w = M.fullPivLu().solve(rhs);
    CVector out = CVector::Zero(values.front().size());
    for (Eigen::Index i = 0; i < L; ++i) {
        out += w[i] * values[static_cast<std::size_t>(i)];
    }
    return out;
}

MixedDerivative mixed_derivative(const ScatteringDataset& data, const std::vector<int>& alpha) {
    const ExperimentPlan& plan = *data.plan;
    const auto needed = plan.records_for(alpha);
    std::vector<std::string> missing;
    for (const auto& idx : needed) {
        if (!data.records.count(idx)) {
            missing.push_back(format_eps_key(idx));
        }
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "mixed derivative: " << missing.size() << " record(s) missing:";
        for (const auto& k : missing) {
            msg << ' ' << k;
        }
        throw MissingRecordsError(msg.str(), missing);
    }

    const auto supp = support(alpha);
    const int m = static_cast<int>(supp.size());
    MixedDerivative out{FarField::zeros(plan.obs), {}, {}, 0.0};
    std::vector<CVector> raw;
    for (int s : plan.stencil_levels()) {
        const double h = plan.eps_ladder[static_cast<std::size_t>(s - 1)];
        std::vector<int> ords;
        std::vector<double> coef;
        if (plan.fd_scheme == 1) {
            ords = {0, s};
            coef = {-1.0, 1.0};
        } else {
            ords = {0, s, s - 1};
            coef = {-1.5, 2.0, -0.5};
        }
        std::vector<int> positions(ords.size());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            positions[i] = static_cast<int>(i);
        }
        CVector acc = CVector::Zero(static_cast<Eigen::Index>(plan.obs->size()));
        for_each_tuple(m, positions, [&](const std::vector<int>& t, const std::vector<std::size_t>&) {
            EpsIndex idx(plan.parameter_count(), 0);
            double c = 1.0;
            for (std::size_t i = 0; i < supp.size(); ++i) {
                idx[supp[i]] = ords[static_cast<std::size_t>(t[i])];
                c *= coef[static_cast<std::size_t>(t[i])];
            }
            acc += c * data.records.at(idx).values();
        });
        acc /= std::pow(h, m);
        out.steps.push_back(h);
        out.levels.emplace_back(plan.obs, acc);
        raw.push_back(std::move(acc));
    }
    CVector best = richardson(out.steps, raw, plan.fd_scheme);
    if (raw.size() >= 2) {
        const std::vector<double> s2(out.steps.begin(), out.steps.end() - 1);
        const std::vector<CVector> r2(raw.begin(), raw.end() - 1);
        out.noise = (best - richardson(s2, r2, plan.fd_scheme)).norm();
    }
    out.value = FarField(plan.obs, std::move(best));
    return out;
}

ComplexField first_order_field(const ForwardSolver& solver, const ComplexField& q, const HerglotzDensity& g,
                               double delta) {
    if (q.sup_norm() == 0.0) {
        return ComplexField::zeros(solver.grid());
    }
    const ComplexField v = herglotz_on_grid(g, solver.context(), solver.grid());
    const CVector rhs = solver.potential().apply(CVector((delta * delta) * q.values().cwiseProduct(v.values())));
    return ComplexField(solver.grid(), solver.scatterer(q)->solve(rhs));
}

ComplexField first_order_field(const ComplexField& q, const HerglotzDensity& g, double delta,
                               const WaveContext& ctx) {
    return first_order_field(ForwardSolver(q.grid(), ctx), q, g, delta);
}

FarField first_order_farfield(const ForwardSolver& solver, const ComplexField& q, const HerglotzDensity& g,
                              double delta, const DirectionsPtr& obs) {
    const ComplexField w = first_order_field(solver, q, g, delta);
    const ComplexField v = herglotz_on_grid(g, solver.context(), solver.grid());
    const CVector u = w.values() + (delta * delta) * v.values();
    return far_field_of_source(ComplexField(solver.grid(), q.values().cwiseProduct(u)), solver.context(), obs);
}

FarField first_order_farfield(const ComplexField& q, const HerglotzDensity& g, double delta, const WaveContext& ctx,
                              const DirectionsPtr& obs) {
    return first_order_farfield(ForwardSolver(q.grid(), ctx), q, g, delta, obs);
}

}  // namespace nlscat
