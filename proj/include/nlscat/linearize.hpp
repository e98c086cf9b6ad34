#pragma once

// Multi-parameter incident fields v_eps = sum_j eps_j delta^2 v_{g_j}, the
// forward solves over an eps lattice, and mixed eps-derivatives of the far
// field at eps = 0 by tensor forward differences with Richardson
// extrapolation across the step ladder.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nlscat/forward.hpp"

namespace nlscat {

/// Lattice coordinate per density: 0 means eps_j = 0, s >= 1 means eps_j = ladder[s - 1].
using EpsIndex = std::vector<int>;

std::string format_eps_key(const EpsIndex& idx);
/// Parses "eps:(i1,...,iM)"; throws Error on malformed keys.
EpsIndex parse_eps_key(const std::string& key);

struct ExperimentPlan {
    std::vector<HerglotzDensity> densities;  ///< g_1 .. g_{N+1}
    double delta = 0.05;
    std::vector<double> eps_ladder;  ///< strictly decreasing, in (0, delta)
    DirectionsPtr obs;
    int fd_scheme = 1;  ///< 1: two-point forward difference, 2: three-point second order
    int max_order = 1;  ///< highest total derivative order the dataset must support

    int N() const { return static_cast<int>(densities.size()) - 1; }
    std::size_t parameter_count() const { return densities.size(); }

    /// Throws ConstructionError when an invariant fails.
    void validate() const;
    /// Default ladder {delta/4, delta/8, delta/16}.
    static std::vector<double> default_ladder(double delta);

    /// Ladder ordinals usable as the step of a difference stencil.
    std::vector<int> stencil_levels() const;
    /// Every record needed for all mixed derivatives up to max_order, in lexicographic order.
    std::vector<EpsIndex> required_records() const;
    /// Records needed for the single multi-index alpha (components 0 or 1).
    std::vector<EpsIndex> records_for(const std::vector<int>& alpha) const;
    /// Incident density sum_j eps_j delta^2 g_j for a lattice point.
    HerglotzDensity incident_density(const EpsIndex& idx) const;
};

struct RecordFailure {
    std::string key;       ///< "eps:(...)"
    std::string category;  ///< "gate", "analyticity", "divergence" or "solver"
    std::string message;
};

struct ScatteringDataset {
    std::shared_ptr<const ExperimentPlan> plan;
    std::map<EpsIndex, FarField> records;
    std::string provenance = "measured";
    bool complete = true;
    std::vector<RecordFailure> failed;

    std::size_t required_count() const { return plan->required_records().size(); }
};

struct SynthesisOptions {
    ForwardOptions forward;  ///< delta is taken from the plan
};

/// Default options for dataset synthesis: the update tolerance is relative so
/// that tiny records are still resolved to near machine precision.
SynthesisOptions default_synthesis_options();

ScatteringDataset synthesize_dataset(const NonlinearityModel& model, std::shared_ptr<const ExperimentPlan> plan,
                                     const WaveContext& ctx, const SynthesisOptions& opts = default_synthesis_options());
/// Same, reusing prebuilt operators (the solver grid must match the model grid).
ScatteringDataset synthesize_dataset(const ForwardSolver& solver, const NonlinearityModel& model,
                                     std::shared_ptr<const ExperimentPlan> plan, const SynthesisOptions& opts,
                                     const std::vector<EpsIndex>* only = nullptr);

struct MixedDerivative {
    FarField value;                 ///< Richardson-extrapolated estimate
    std::vector<double> steps;      ///< step per level, coarse to fine
    std::vector<FarField> levels;   ///< raw difference quotients per level
    double noise = 0.0;             ///< |last extrapolant - previous one| in the Euclidean norm
};

/// Estimates d^alpha u_inf / d eps^alpha at eps = 0. alpha has one entry per
/// density, each 0 or 1, with 1 <= |alpha| <= max_order.
MixedDerivative mixed_derivative(const ScatteringDataset& data, const std::vector<int>& alpha);

/// Polynomial extrapolation to h = 0 assuming error terms h^p, h^{p+1}, ...
CVector richardson(const std::vector<double>& steps, const std::vector<CVector>& values, int p);

/// w solving w = V[q (w + delta^2 v_g)].
ComplexField first_order_field(const ForwardSolver& solver, const ComplexField& q, const HerglotzDensity& g,
                               double delta);
ComplexField first_order_field(const ComplexField& q, const HerglotzDensity& g, double delta,
                               const WaveContext& ctx);
/// Far field of q (w + delta^2 v_g).
FarField first_order_farfield(const ForwardSolver& solver, const ComplexField& q, const HerglotzDensity& g,
                              double delta, const DirectionsPtr& obs);
FarField first_order_farfield(const ComplexField& q, const HerglotzDensity& g, double delta, const WaveContext& ctx,
                              const DirectionsPtr& obs);

}  // namespace nlscat
