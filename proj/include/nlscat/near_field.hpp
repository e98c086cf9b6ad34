#pragma once

// High-order evaluation of the volume potential at points off the grid.
//
// The kernel is split with a smooth radial partition of unity chi around the
// target. The far part Phi (1 - chi) f is smooth and summed with the grid
// rule. In the near part f is replaced by a least-squares polynomial fitted
// to the nodal values, so that integral reduces to tabulated radial moments
// of Phi chi times exact monomial averages over the sphere.

#include <span>

#include "nlscat/fields.hpp"

namespace nlscat {

CVector corrected_potential(const ComplexField& f, const WaveContext& ctx, std::span<const Point> targets,
                            const NearFieldOptions& opts = {});

namespace detail {
/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
/// Integral over S^{d-1} of prod_i x_i^{a_i}.
double sphere_monomial_integral(const std::array<int, 3>& a, int d);
}  // namespace detail

}  // namespace nlscat
