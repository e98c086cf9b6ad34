#include "nlscat/fields.hpp"

#include <algorithm>
#include <cmath>

#include "nlscat/errors.hpp"
#include "nlscat/kernels.hpp"
#include "nlscat/near_field.hpp"

namespace nlscat {
namespace {

void require_finite(const CVector& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
            throw Error(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

}  // namespace

ComplexField::ComplexField(GridPtr grid, CVector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) {
        throw ConstructionError("ComplexField: null grid");
    }
    if (static_cast<std::size_t>(values_.size()) != grid_->size()) {
        throw ConstructionError("ComplexField: " + std::to_string(values_.size()) + " values for " +
                                std::to_string(grid_->size()) + " nodes");
    }
    require_finite(values_, "ComplexField");
}

ComplexField ComplexField::zeros(GridPtr grid) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    return ComplexField(std::move(grid), CVector::Zero(n));
}

ComplexField ComplexField::from_function(GridPtr grid, const std::function<cplx(const Point&)>& fn) {
    CVector v(static_cast<Eigen::Index>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = fn(grid->node(i));
    }
    return ComplexField(std::move(grid), std::move(v));
}

double ComplexField::l2_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        s += grid_->weight(i) * std::norm(values_[static_cast<Eigen::Index>(i)]);
    }
    return std::sqrt(s);
}

HerglotzDensity::HerglotzDensity(DirectionsPtr dirs, CVector values) : dirs_(std::move(dirs)), values_(std::move(values)) {
    if (!dirs_) {
        throw ConstructionError("HerglotzDensity: null direction set");
    }
    if (static_cast<std::size_t>(values_.size()) != dirs_->size()) {
        throw ConstructionError("HerglotzDensity: value count does not match direction count");
    }
    require_finite(values_, "HerglotzDensity");
    norm_sup_ = nlscat::sup_norm(values_);
    double s = 0.0;
    for (std::size_t j = 0; j < dirs_->size(); ++j) {
        s += dirs_->weight(j) * std::norm(values_[static_cast<Eigen::Index>(j)]);
    }
    norm_l2_ = std::sqrt(s);
}

HerglotzDensity HerglotzDensity::constant(DirectionsPtr dirs, cplx c) {
    const auto m = static_cast<Eigen::Index>(dirs->size());
    return HerglotzDensity(std::move(dirs), CVector::Constant(m, c));
}

HerglotzDensity HerglotzDensity::scaled(cplx s) const { return HerglotzDensity(dirs_, values_ * s); }

FarField::FarField(DirectionsPtr obs, CVector values) : obs_(std::move(obs)), values_(std::move(values)) {
    if (!obs_) {
        throw ConstructionError("FarField: null direction set");
    }
    if (static_cast<std::size_t>(values_.size()) != obs_->size()) {
        throw ConstructionError("FarField: value count does not match observation count");
    }
}

FarField FarField::zeros(DirectionsPtr obs) {
    const auto m = static_cast<Eigen::Index>(obs->size());
    return FarField(std::move(obs), CVector::Zero(m));
}

CVector herglotz_wave(const HerglotzDensity& g, const WaveContext& ctx, std::span<const Point> targets) {
    ctx.validate();
    CMatrix H;
    kernels::assemble_herglotz_omp(*g.directions(), ctx.k, targets, H);
    return H * g.values();
}

ComplexField herglotz_on_grid(const HerglotzDensity& g, const WaveContext& ctx, const GridPtr& grid) {
    return ComplexField(grid, herglotz_wave(g, ctx, grid->nodes()));
}

CVector volume_potential(const ComplexField& f, const WaveContext& ctx, std::span<const Point> targets,
                         const PotentialOptions& opts) {
    ctx.validate();
    if (f.grid()->dimension() != ctx.d) {
        throw ConstructionError("volume_potential: grid dimension differs from wave context");
    }
    if (opts.mode == PotentialOptions::Mode::Corrected) {
        return corrected_potential(f, ctx, targets, opts.near);
    }
    std::vector<std::int64_t> coincident(targets.size(), -1);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (auto id = f.grid()->find_node(targets[t])) {
            coincident[t] = static_cast<std::int64_t>(*id);
        }
    }
    CVector out;
    kernels::point_potential_omp(*f.grid(), ctx, f.values(), targets, coincident, out);
    return out;
}

FarField far_field_of_source(const ComplexField& f, const WaveContext& ctx, const DirectionsPtr& obs) {
    return FarFieldOperator(f.grid(), obs, ctx).apply(f);
}

RadiationReport verify_radiation(const ComplexField& f, const WaveContext& ctx, const std::vector<double>& radii,
                                 const Point& direction) {
    ctx.validate();
    if (radii.size() < 3) {
        throw Error("verify_radiation: need at least 3 radii");
    }
    const double R = f.grid()->radius();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 2.0 * R) || (i > 0 && !(radii[i] > radii[i - 1]))) {
            throw Error("verify_radiation: radii must be increasing and exceed 2R");
        }
    }
    Point xhat = direction;
    if (ctx.d == 2) {
        xhat[2] = 0.0;
    }
    const double len = norm(xhat);
    if (!(len > 0.0)) {
        throw Error("verify_radiation: direction must be non-zero");
    }
    for (double& c : xhat) {
        c /= len;
    }

    RadiationReport rep;
    rep.direction = xhat;
    rep.radii = radii;

    auto obs = DirectionSet::from_directions({xhat}, ctx.d);
    const cplx uinf = far_field_of_source(f, ctx, obs).values()[0];
    const cplx Cd = specfun::farfield_constant(ctx);

    std::vector<Point> targets;
    for (double r : radii) {
        targets.push_back({r * xhat[0], r * xhat[1], r * xhat[2]});
    }
    const CVector V = volume_potential(f, ctx, targets);
    const double decay = 0.5 * (ctx.d - 1);
    bool any = false;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        const cplx lead = Cd * std::polar(1.0, ctx.k * r) * std::pow(r, -decay) * uinf;
        const double res = std::abs(V[static_cast<Eigen::Index>(i)] - lead);
        rep.residuals.push_back(res);
        any = any || res > 0.0;
    }
    if (!any) {
        return rep;
    }
    // Least-squares line through (log r, log rho); zero residuals are skipped.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (rep.residuals[i] <= 0.0) {
            continue;
        }
        const double x = std::log(radii[i]);
        const double y = std::log(rep.residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) {
        rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return rep;
}

PotentialOperator::PotentialOperator(GridPtr grid, WaveContext ctx, std::size_t dense_limit)
    : grid_(std::move(grid)), ctx_(ctx) {
    ctx_.validate();
    if (!grid_ || grid_->dimension() != ctx_.d) {
        throw ConstructionError("PotentialOperator: grid dimension differs from wave context");
    }
    dense_ = grid_->size() <= dense_limit;
    if (dense_) {
        kernels::assemble_potential_omp(*grid_, ctx_, V_);
    }
}

const CMatrix& PotentialOperator::matrix() const {
    if (!dense_) {
        throw Error("PotentialOperator: matrix requested from a matrix-free operator");
    }
    return V_;
}

CVector PotentialOperator::apply(const CVector& f) const {
    if (static_cast<std::size_t>(f.size()) != grid_->size()) {
        throw Error("PotentialOperator: vector length does not match grid");
    }
    if (dense_) {
        return V_ * f;
    }
    std::vector<std::int64_t> coincident(grid_->size());
    for (std::size_t i = 0; i < coincident.size(); ++i) {
        coincident[i] = static_cast<std::int64_t>(i);
    }
    CVector out;
    kernels::point_potential_omp(*grid_, ctx_, f, grid_->nodes(), coincident, out);
    return out;
}

ComplexField PotentialOperator::apply(const ComplexField& f) const {
    if (!f.grid()->same_layout(*grid_)) {
        throw Error("PotentialOperator: field lives on a different grid");
    }
    return ComplexField(grid_, apply(f.values()));
}

FarFieldOperator::FarFieldOperator(GridPtr grid, DirectionsPtr obs, WaveContext ctx)
    : grid_(std::move(grid)), obs_(std::move(obs)) {
    ctx.validate();
    if (obs_->dimension() != grid_->dimension()) {
        throw ConstructionError("FarFieldOperator: direction set and grid dimensions differ");
    }
    kernels::assemble_far_field_omp(*grid_, *obs_, ctx.k, E_);
}

FarField FarFieldOperator::apply(const ComplexField& f) const {
    if (!f.grid()->same_layout(*grid_)) {
        throw Error("FarFieldOperator: field lives on a different grid");
    }
    return FarField(obs_, E_ * f.values());
}

HerglotzOperator::HerglotzOperator(GridPtr grid, DirectionsPtr dirs, WaveContext ctx)
    : grid_(std::move(grid)), dirs_(std::move(dirs)) {
    ctx.validate();
    if (dirs_->dimension() != grid_->dimension()) {
        throw ConstructionError("HerglotzOperator: direction set and grid dimensions differ");
    }
    kernels::assemble_herglotz_omp(*dirs_, ctx.k, grid_->nodes(), H_);
}

ComplexField HerglotzOperator::apply(const HerglotzDensity& g) const {
    if (!g.directions()->same_layout(*dirs_)) {
        throw Error("HerglotzOperator: density lives on a different direction set");
    }
    return ComplexField(grid_, H_ * g.values());
}

}  // namespace nlscat
