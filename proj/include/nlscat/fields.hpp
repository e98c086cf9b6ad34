#pragma once

// Fields on the grid, Herglotz densities and far fields, plus the three
// quadrature operators that connect them: Herglotz synthesis, the volume
// potential V and far-field extraction.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nlscat/geometry.hpp"
#include "nlscat/specfun.hpp"

namespace nlscat {

/// Complex samples of a field, one per grid node. Values are immutable and finite.
class ComplexField {
public:
    ComplexField(GridPtr grid, CVector values);
    static ComplexField zeros(GridPtr grid);
    static ComplexField from_function(GridPtr grid, const std::function<cplx(const Point&)>& fn);

    const GridPtr& grid() const noexcept { return grid_; }
    const CVector& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    cplx operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    double sup_norm() const { return nlscat::sup_norm(values_); }
    /// Quadrature L2(B_R) norm.
    double l2_norm() const;

private:
    GridPtr grid_;
    CVector values_;
};

/// Density g on a direction set with cached sup and weighted L2 norms.
class HerglotzDensity {
public:
    HerglotzDensity(DirectionsPtr dirs, CVector values);
    static HerglotzDensity constant(DirectionsPtr dirs, cplx c);

    const DirectionsPtr& directions() const noexcept { return dirs_; }
    const CVector& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double norm_sup() const noexcept { return norm_sup_; }
    double norm_l2() const noexcept { return norm_l2_; }

    HerglotzDensity scaled(cplx s) const;

private:
    DirectionsPtr dirs_;
    CVector values_;
    double norm_sup_ = 0.0;
    double norm_l2_ = 0.0;
};

/// Samples of u^inf on observation directions.
class FarField {
public:
    FarField(DirectionsPtr obs, CVector values);
    static FarField zeros(DirectionsPtr obs);

    const DirectionsPtr& directions() const noexcept { return obs_; }
    const CVector& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

private:
    DirectionsPtr obs_;
    CVector values_;
};

struct NearFieldOptions {
    double inner = 0.0;  ///< cutoff radius where the smooth partition starts; 0 picks max(0.04 R, h)
    double outer = 0.0;  ///< cutoff radius where the near part ends; 0 picks max(0.25 R, inner + 6 h)
    int degree = 8;      ///< total degree of the local polynomial fit
};

struct PotentialOptions {
    enum class Mode {
        Nystrom,    ///< midpoint sums with the equivalent-ball diagonal term
        Corrected,  ///< partition of unity: far sum plus analytic integral of a local polynomial fit
    };
    Mode mode = Mode::Nystrom;
    NearFieldOptions near;
};

/// u_in(x) = sum_j exp(-i k x . theta_j) g_j ds_j at arbitrary points.
CVector herglotz_wave(const HerglotzDensity& g, const WaveContext& ctx, std::span<const Point> targets);
/// Herglotz wave sampled on the grid nodes.
ComplexField herglotz_on_grid(const HerglotzDensity& g, const WaveContext& ctx, const GridPtr& grid);

/// V[f](x) = int Phi(x, y) f(y) dy at arbitrary targets.
CVector volume_potential(const ComplexField& f, const WaveContext& ctx, std::span<const Point> targets,
                         const PotentialOptions& opts = {});

/// u^inf(xhat) = int exp(-i k xhat . y) f(y) dy.
FarField far_field_of_source(const ComplexField& f, const WaveContext& ctx, const DirectionsPtr& obs);

struct RadiationReport {
    Point direction{};
    std::vector<double> radii;
    std::vector<double> residuals;
    std::optional<double> slope;  ///< log-log regression slope; empty when all residuals vanish
};

/// Residual of the leading far-field term of V[f] along a fixed direction.
RadiationReport verify_radiation(const ComplexField& f, const WaveContext& ctx, const std::vector<double>& radii,
                                 const Point& direction = {1.0, 0.0, 0.0});

/// Discrete V: grid -> grid. Dense when the node count is at most dense_limit, matrix-free otherwise.
class PotentialOperator {
public:
    static constexpr std::size_t kDefaultDenseLimit = 20000;

    PotentialOperator(GridPtr grid, WaveContext ctx, std::size_t dense_limit = kDefaultDenseLimit);

    const GridPtr& grid() const noexcept { return grid_; }
    const WaveContext& context() const noexcept { return ctx_; }
    bool is_dense() const noexcept { return dense_; }
    /// Throws when the operator is matrix-free.
    const CMatrix& matrix() const;

    CVector apply(const CVector& f) const;
    ComplexField apply(const ComplexField& f) const;

private:
    GridPtr grid_;
    WaveContext ctx_;
    bool dense_ = false;
    CMatrix V_;
};

/// Far-field quadrature as an obs x nodes matrix.
class FarFieldOperator {
public:
    FarFieldOperator(GridPtr grid, DirectionsPtr obs, WaveContext ctx);
    const CMatrix& matrix() const noexcept { return E_; }
    const DirectionsPtr& directions() const noexcept { return obs_; }
    FarField apply(const ComplexField& f) const;

private:
    GridPtr grid_;
    DirectionsPtr obs_;
    CMatrix E_;
};

/// Herglotz synthesis on the grid as a nodes x directions matrix.
class HerglotzOperator {
public:
    HerglotzOperator(GridPtr grid, DirectionsPtr dirs, WaveContext ctx);
    const CMatrix& matrix() const noexcept { return H_; }
    ComplexField apply(const HerglotzDensity& g) const;

private:
    GridPtr grid_;
    DirectionsPtr dirs_;
    CMatrix H_;
};

}  // namespace nlscat
