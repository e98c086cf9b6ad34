#pragma once

// Run configuration: parsing with field-path errors, defaults, and the
// effective (defaults-applied) echo.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlscat/inverse.hpp"

namespace nlscat {

struct DensitySpec {
    std::string kind = "random";  ///< random | constant | values
    int directions = 64;
    cplx value{1.0, 0.0};          ///< for kind = constant
    std::vector<CVector> values;   ///< for kind = values, one entry per density
};

struct DerivativeSpec {
    int order = 1;
    std::vector<Profile> profiles;
    std::optional<CVector> values;  ///< raw node array instead of profiles
};

struct RunConfig {
    struct Wave {
        double k = 1.0;
        int d = 2;
    } wave;
    struct Grid {
        double R = 1.0;
        int n = 48;
    } grid;
    struct Model {
        double c0 = 1.0;
        std::optional<double> eta;             ///< empty: 1 / (2 c0)
        std::optional<double> support_radius;  ///< empty: grid.R
        int L = 1;
        std::vector<DerivativeSpec> derivatives;
    } model;
    struct Plan {
        int N = 0;
        double delta = 0.05;
        DensitySpec densities;
        std::vector<double> eps_ladder;  ///< empty: {delta/4, delta/8, delta/16}
        int obs = 64;
        int fd_scheme = 1;
        int max_order = 1;
    } plan;
    struct Forward {
        DensitySpec density;
        std::optional<double> sup;  ///< sup-norm the density is scaled to; empty: 0.9 delta^2
        double delta0 = 0.1;
        double tol = 1e-10;
        int max_iter = 200;
        std::size_t dense_limit = PotentialOperator::kDefaultDenseLimit;
    } forward;
    struct Synth {
        double rel_tol = 1e-14;
        int max_iter = 500;
    } synth;
    struct Inverse {
        int L = 1;
        std::vector<double> lambda_schedule{1e-8};
        int max_outer = 20;
        double outer_tol = 1e-4;
        bool discrepancy = false;
        double tau = 1.5;
        std::string grid_mode = "same";  ///< same | coarse
        int n = 0;                       ///< reconstruction grid n for coarse mode
        std::vector<int> probe_schedule{8, 16, 32, 64};
    } inverse;
    struct IO {
        std::string output = "out";
        std::uint64_t seed = 1234;
    } io;
};

/// Parses and validates; throws ConfigError naming the offending field path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Every field with defaults applied.
nlohmann::json effective_config(const RunConfig& cfg);

GridPtr make_grid(const RunConfig& cfg);
GridPtr make_inverse_grid(const RunConfig& cfg);
NonlinearityModel make_model(const RunConfig& cfg, const GridPtr& grid);
std::shared_ptr<ExperimentPlan> make_plan(const RunConfig& cfg);
HerglotzDensity make_forward_density(const RunConfig& cfg);
ForwardOptions forward_options(const RunConfig& cfg);
SynthesisOptions synthesis_options(const RunConfig& cfg);
InverseOptions inverse_options(const RunConfig& cfg);

/// Deterministic uniform samples in [-1, 1) from a 64-bit seed.
class SeededUniform {
public:
    explicit SeededUniform(std::uint64_t seed);
    double next();

private:
    std::mt19937_64 engine_;
};

}  // namespace nlscat
