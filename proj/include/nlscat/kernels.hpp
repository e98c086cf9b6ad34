#pragma once

// Data-parallel inner loops of the discretised operators. Every kernel comes
// in two flavours: a plain serial reference (kept for testing and
// benchmarking) and an OpenMP version used by the library. Both produce
// bit-identical results: each output entry is computed by exactly one thread
// with the same summation order.

#include <cstdint>
#include <span>
#include <vector>

#include "nlscat/geometry.hpp"
#include "nlscat/specfun.hpp"

namespace nlscat::kernels {

/// Self-cell value of the volume potential for a cell of volume w: the
/// integral of the kernel over the ball with the same volume.
cplx self_cell_term(double w, const WaveContext& ctx);

/// Dense Nystrom matrix of the volume potential on the grid:
/// V(i,j) = Phi(x_i, x_j) w_j for i != j, V(i,i) = self_cell_term(w_i).
void assemble_potential_serial(const DiskGrid& grid, const WaveContext& ctx, CMatrix& out);
void assemble_potential_omp(const DiskGrid& grid, const WaveContext& ctx, CMatrix& out);

/// Matrix-free potential at arbitrary targets: sum_j Phi(t, y_j) w_j f_j.
/// coincident[t] >= 0 names the grid node that target t sits on; that term
/// is replaced by the self-cell value. Pass an empty span when no target is
/// on the grid.
void point_potential_serial(const DiskGrid& grid, const WaveContext& ctx, const CVector& f,
                            std::span<const Point> targets, std::span<const std::int64_t> coincident,
                            CVector& out);
void point_potential_omp(const DiskGrid& grid, const WaveContext& ctx, const CVector& f,
                         std::span<const Point> targets, std::span<const std::int64_t> coincident,
                         CVector& out);

/// Far-field quadrature matrix E(m, j) = exp(-i k xhat_m . y_j) w_j.
void assemble_far_field_serial(const DiskGrid& grid, const DirectionSet& obs, double k, CMatrix& out);
void assemble_far_field_omp(const DiskGrid& grid, const DirectionSet& obs, double k, CMatrix& out);

/// Herglotz synthesis matrix H(t, j) = exp(-i k x_t . theta_j) ds_j.
void assemble_herglotz_serial(const DirectionSet& dirs, double k, std::span<const Point> targets,
                              CMatrix& out);
void assemble_herglotz_omp(const DirectionSet& dirs, double k, std::span<const Point> targets,
                           CMatrix& out);

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();
/// Caps the OpenMP thread count (n >= 1).
void set_threads(int n);

}  // namespace nlscat::kernels
