#include "nlscat/nonlinearity.hpp"

#include <cmath>
#include <sstream>

#include "nlscat/errors.hpp"

namespace nlscat {
namespace {

double factorial(int l) {
    double f = 1.0;
    for (int i = 2; i <= l; ++i) {
        f *= i;
    }
    return f;
}

}  // namespace

bool ValidationReport::all_pass() const {
    for (const auto& c : clauses) {
        if (!c.pass) {
            return false;
        }
    }
    return true;
}

NonlinearityModel NonlinearityModel::from_derivatives(std::vector<ComplexField> derivatives, double c0,
                                                      std::optional<double> eta,
                                                      std::optional<double> support_radius) {
    if (derivatives.empty()) {
        throw ConstructionError("nonlinearity: at least one coefficient is required");
    }
    if (!(c0 > 0.0) || !std::isfinite(c0)) {
        throw ConstructionError("nonlinearity: c0 must be positive");
    }
    const GridPtr& grid = derivatives.front().grid();
    for (const auto& d : derivatives) {
        if (!d.grid()->same_layout(*grid)) {
            throw ConstructionError("nonlinearity: coefficient fields must share one grid");
        }
    }
    NonlinearityModel m;
    m.c0_ = c0;
    if (eta) {
        if (!(*eta > 0.0)) {
            throw ConstructionError("nonlinearity: eta must be positive");
        }
        m.eta_ = *eta;
    } else {
        m.eta_ = 1.0 / (2.0 * c0);
        m.eta_defaulted_ = true;
    }
    m.R_ = support_radius ? *support_radius : grid->radius();
    if (!(m.R_ > 0.0)) {
        throw ConstructionError("nonlinearity: support radius must be positive");
    }
    for (std::size_t i = 0; i < derivatives.size(); ++i) {
        const double f = factorial(static_cast<int>(i) + 1);
        m.coeffs_.emplace_back(grid, derivatives[i].values() / f);
    }
    m.derivatives_ = std::move(derivatives);
    return m;
}

NonlinearityModel NonlinearityModel::from_coefficients(const std::vector<ComplexField>& coefficients, double c0,
                                                       std::optional<double> eta,
                                                       std::optional<double> support_radius) {
    std::vector<ComplexField> d;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        d.emplace_back(coefficients[i].grid(), coefficients[i].values() * factorial(static_cast<int>(i) + 1));
    }
    return from_derivatives(std::move(d), c0, eta, support_radius);
}

NonlinearityModel NonlinearityModel::zero(GridPtr grid, double c0) {
    return from_derivatives({ComplexField::zeros(std::move(grid))}, c0);
}

const ComplexField& NonlinearityModel::coefficient(int l) const {
    if (l < 1 || l > order()) {
        throw Error("nonlinearity: coefficient order " + std::to_string(l) + " outside 1.." +
                    std::to_string(order()));
    }
    return coeffs_[static_cast<std::size_t>(l - 1)];
}

const ComplexField& NonlinearityModel::derivative_coefficient(int l) const {
    if (l < 1 || l > order()) {
        throw Error("nonlinearity: derivative order " + std::to_string(l) + " outside 1.." +
                    std::to_string(order()));
    }
    return derivatives_[static_cast<std::size_t>(l - 1)];
}

CVector NonlinearityModel::evaluate(const CVector& z) const {
    if (static_cast<std::size_t>(z.size()) != grid()->size()) {
        throw Error("nonlinearity: argument does not live on the model grid");
    }
    CVector out(z.size());
    const int L = order();
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const cplx zi = z[i];
        if (!(std::abs(zi) < eta_)) {
            std::ostringstream msg;
            msg << "nonlinearity: |z| = " << std::abs(zi) << " reached eta = " << eta_ << " at node " << i;
            throw AnalyticityError(msg.str());
        }
        cplx acc = coeffs_[static_cast<std::size_t>(L - 1)].values()[i];
        for (int l = L - 1; l >= 1; --l) {
            acc = acc * zi + coeffs_[static_cast<std::size_t>(l - 1)].values()[i];
        }
        out[i] = acc * zi;
    }
    return out;
}

ComplexField NonlinearityModel::evaluate(const ComplexField& z) const {
    if (!z.grid()->same_layout(*grid())) {
        throw Error("nonlinearity: argument does not live on the model grid");
    }
    return ComplexField(grid(), evaluate(z.values()));
}

bool NonlinearityModel::is_zero() const {
    for (const auto& d : derivatives_) {
        if (d.sup_norm() != 0.0) {
            return false;
        }
    }
    return true;
}

NonlinearityModel NonlinearityModel::truncated(int L) const {
    if (L < 1) {
        throw Error("nonlinearity: truncation order must be at least 1");
    }
    std::vector<ComplexField> d;
    for (int l = 1; l <= L; ++l) {
        d.push_back(l <= order() ? derivatives_[static_cast<std::size_t>(l - 1)] : ComplexField::zeros(grid()));
    }
    return from_derivatives(std::move(d), c0_, eta_defaulted_ ? std::nullopt : std::optional<double>(eta_), R_);
}

ValidationReport validate_assumption(const NonlinearityModel& model) {
    ValidationReport rep;
    rep.eta_defaulted = model.eta_defaulted();
    rep.clauses.push_back({"i", true, "a(x,0) = 0 holds by the Taylor representation without constant term"});

    {
        std::ostringstream s;
        s << "eta = " << model.eta();
        if (model.eta_defaulted()) {
            s << " (default 1/(2 c0))";
        }
        rep.clauses.push_back({"ii", model.eta() > 0.0, s.str()});
    }

    {
        double worst = 0.0;
        int worst_l = 1;
        for (int l = 1; l <= model.order(); ++l) {
            const double g = std::pow(model.derivative_coefficient(l).sup_norm(), 1.0 / l);
            if (g > worst) {
                worst = g;
                worst_l = l;
            }
        }
        const bool ok = worst <= model.c0() * (1.0 + 1e-12);
        std::ostringstream s;
        s << "max_l sup|l! c_l|^(1/l) = " << worst << " (l = " << worst_l << "), c0 = " << model.c0();
        rep.clauses.push_back({"iii", ok, s.str()});
    }

    {
        const auto& grid = *model.grid();
        std::size_t bad = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (norm(grid.node(i)) < model.support_radius()) {
                continue;
            }
            for (const auto& d : model.derivatives()) {
                if (d[i] != cplx{}) {
                    ++bad;
                    break;
                }
            }
        }
        std::ostringstream s;
        s << bad << " node(s) with |x| >= R = " << model.support_radius() << " carry non-zero coefficients";
        rep.clauses.push_back({"iv", bad == 0, s.str()});
    }
    return rep;
}

cplx Profile::operator()(const Point& x) const {
    switch (kind) {
        case Kind::Gaussian: {
            const double r2 = std::pow(distance(x, center), 2);
            return amplitude * std::exp(-r2 / (2.0 * width * width));
        }
        case Kind::Disk:
            return distance(x, center) < width ? amplitude : cplx{};
        case Kind::Polynomial: {
            cplx acc = 0.0;
            for (const auto& t : terms) {
                double m = 1.0;
                for (int a = 0; a < 3; ++a) {
                    m *= std::pow(x[a] - center[a], t.powers[a]);
                }
                acc += t.value * m;
            }
            return amplitude * acc;
        }
    }
    return {};
}

ComplexField sample_profiles(const GridPtr& grid, const std::vector<Profile>& profiles) {
    return ComplexField::from_function(grid, [&](const Point& x) {
        cplx v = 0.0;
        for (const auto& p : profiles) {
            v += p(x);
        }
        return v;
    });
}

}  // namespace nlscat
