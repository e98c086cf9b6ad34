#pragma once

// Truncated Taylor data of the semilinear term a(x, z) = sum_l c_l(x) z^l.

#include <optional>
#include <string>
#include <vector>

#include "nlscat/fields.hpp"

namespace nlscat {

struct ValidationClause {
    std::string id;  ///< "i" .. "iv"
    bool pass = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationClause> clauses;
    bool eta_defaulted = false;
    bool all_pass() const;
};

/// a(x, z) through its derivatives d_l = d^l a / dz^l (x, 0), l = 1..L.
///
/// The derivative fields are stored as given so that reading them back is
/// exact; the Taylor coefficients c_l = d_l / l! are derived once.
class NonlinearityModel {
public:
    /// eta empty selects the default 1 / (2 c0), which is flagged in validation.
    /// support_radius empty selects the grid radius.
    static NonlinearityModel from_derivatives(std::vector<ComplexField> derivatives, double c0,
                                              std::optional<double> eta = std::nullopt,
                                              std::optional<double> support_radius = std::nullopt);
    static NonlinearityModel from_coefficients(const std::vector<ComplexField>& coefficients, double c0,
                                               std::optional<double> eta = std::nullopt,
                                               std::optional<double> support_radius = std::nullopt);
    /// a = 0 with a single vanishing coefficient.
    static NonlinearityModel zero(GridPtr grid, double c0 = 1.0);

    const GridPtr& grid() const noexcept { return derivatives_.front().grid(); }
    int order() const noexcept { return static_cast<int>(derivatives_.size()); }
    double c0() const noexcept { return c0_; }
    double eta() const noexcept { return eta_; }
    bool eta_defaulted() const noexcept { return eta_defaulted_; }
    double support_radius() const noexcept { return R_; }

    /// c_l = d_l / l!, 1 <= l <= L.
    const ComplexField& coefficient(int l) const;
    /// d_l = l! c_l, 1 <= l <= L.
    const ComplexField& derivative_coefficient(int l) const;
    const std::vector<ComplexField>& derivatives() const noexcept { return derivatives_; }

    /// Pointwise sum_l c_l z^l by Horner. Throws AnalyticityError if |z| >= eta anywhere.
    ComplexField evaluate(const ComplexField& z) const;
    CVector evaluate(const CVector& z) const;

    /// True when every coefficient is identically zero.
    bool is_zero() const;

    /// Copy keeping orders 1..L; missing orders are padded with zero fields.
    NonlinearityModel truncated(int L) const;

private:
    NonlinearityModel() = default;

    std::vector<ComplexField> derivatives_;
    std::vector<ComplexField> coeffs_;
    double c0_ = 1.0;
    double eta_ = 0.5;
    bool eta_defaulted_ = false;
    double R_ = 1.0;
};

ValidationReport validate_assumption(const NonlinearityModel& model);

/// Named analytic coefficient profiles used by configuration files.
struct Profile {
    enum class Kind { Gaussian, Disk, Polynomial };
    struct Term {
        std::array<int, 3> powers{0, 0, 0};
        cplx value{};
    };
    Kind kind = Kind::Gaussian;
    cplx amplitude{1.0, 0.0};
    Point center{0.0, 0.0, 0.0};
    double width = 0.25;  ///< Gaussian sigma or disk radius
    std::vector<Term> terms;

    cplx operator()(const Point& x) const;
};

/// Sum of profiles sampled on the grid.
ComplexField sample_profiles(const GridPtr& grid, const std::vector<Profile>& profiles);

}  // namespace nlscat
