#include "nlscat/kernels.hpp"

#include <cmath>

#include <omp.h>

#include "nlscat/errors.hpp"

namespace nlscat::kernels {
namespace {

double equivalent_radius(double w, int d) {
    return d == 2 ? std::sqrt(w / kPi) : std::cbrt(3.0 * w / (4.0 * kPi));
}

inline cplx plane_wave(double k, const Point& x, const Point& dir) {
    const double phase = -k * dot(x, dir);
    return {std::cos(phase), std::sin(phase)};
}

inline cplx potential_row(const DiskGrid& grid, const WaveContext& ctx, const CVector& f,
                          const Point& t, std::int64_t on_node, const cplx& self) {
    const auto& nodes = grid.nodes();
    const auto& w = grid.weights();
    cplx acc = 0.0;
    const std::size_t n = nodes.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (static_cast<std::int64_t>(j) == on_node) {
            acc += self * f[j];
            continue;
        }
        const double r = distance(t, nodes[j]);
        acc += specfun::fundamental_solution_radial(r, ctx) * (w[j] * f[j]);
    }
    return acc;
}

void check_shapes(const CVector& f, const DiskGrid& grid, std::span<const std::int64_t> coincident,
                  std::size_t ntargets) {
    if (static_cast<std::size_t>(f.size()) != grid.size()) {
        throw Error("potential kernel: field size does not match grid");
    }
    if (!coincident.empty() && coincident.size() != ntargets) {
        throw Error("potential kernel: coincidence table has wrong length");
    }
}

}  // namespace

cplx self_cell_term(double w, const WaveContext& ctx) {
    return specfun::ball_self_integral(equivalent_radius(w, ctx.d), ctx);
}

void assemble_potential_serial(const DiskGrid& grid, const WaveContext& ctx, CMatrix& out) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    out.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) {
                out(i, i) = self_cell_term(grid.weight(i), ctx);
            } else {
                const double r = distance(grid.node(i), grid.node(j));
                out(i, j) = specfun::fundamental_solution_radial(r, ctx) * grid.weight(j);
            }
        }
    }
}

void assemble_potential_omp(const DiskGrid& grid, const WaveContext& ctx, CMatrix& out) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    out.resize(n, n);
    // Upper triangle per column, mirrored; every entry has a single writer.
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < n; ++j) {
        out(j, j) = self_cell_term(grid.weight(j), ctx);
        for (Eigen::Index i = 0; i < j; ++i) {
            const double r = distance(grid.node(i), grid.node(j));
            const cplx phi = specfun::fundamental_solution_radial(r, ctx);
            out(i, j) = phi * grid.weight(j);
            out(j, i) = phi * grid.weight(i);
        }
    }
}

void point_potential_serial(const DiskGrid& grid, const WaveContext& ctx, const CVector& f,
                            std::span<const Point> targets, std::span<const std::int64_t> coincident,
                            CVector& out) {
    check_shapes(f, grid, coincident, targets.size());
    out.resize(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const std::int64_t on = coincident.empty() ? -1 : coincident[t];
        const cplx self = on >= 0 ? self_cell_term(grid.weight(static_cast<std::size_t>(on)), ctx) : cplx{};
        out[static_cast<Eigen::Index>(t)] = potential_row(grid, ctx, f, targets[t], on, self);
    }
}

void point_potential_omp(const DiskGrid& grid, const WaveContext& ctx, const CVector& f,
                         std::span<const Point> targets, std::span<const std::int64_t> coincident,
                         CVector& out) {
    check_shapes(f, grid, coincident, targets.size());
    const auto nt = static_cast<std::int64_t>(targets.size());
    out.resize(nt);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t t = 0; t < nt; ++t) {
        const std::int64_t on = coincident.empty() ? -1 : coincident[static_cast<std::size_t>(t)];
        const cplx self = on >= 0 ? self_cell_term(grid.weight(static_cast<std::size_t>(on)), ctx) : cplx{};
        out[t] = potential_row(grid, ctx, f, targets[static_cast<std::size_t>(t)], on, self);
    }
}

void assemble_far_field_serial(const DiskGrid& grid, const DirectionSet& obs, double k, CMatrix& out) {
    const auto m = static_cast<Eigen::Index>(obs.size());
    const auto n = static_cast<Eigen::Index>(grid.size());
    out.resize(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            out(i, j) = plane_wave(k, grid.node(j), obs.direction(i)) * grid.weight(j);
        }
    }
}

void assemble_far_field_omp(const DiskGrid& grid, const DirectionSet& obs, double k, CMatrix& out) {
    const auto m = static_cast<Eigen::Index>(obs.size());
    const auto n = static_cast<Eigen::Index>(grid.size());
    out.resize(m, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            out(i, j) = plane_wave(k, grid.node(j), obs.direction(i)) * grid.weight(j);
        }
    }
}

void assemble_herglotz_serial(const DirectionSet& dirs, double k, std::span<const Point> targets,
                              CMatrix& out) {
    const auto nt = static_cast<Eigen::Index>(targets.size());
    const auto m = static_cast<Eigen::Index>(dirs.size());
    out.resize(nt, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index t = 0; t < nt; ++t) {
            out(t, j) = plane_wave(k, targets[static_cast<std::size_t>(t)], dirs.direction(j)) * dirs.weight(j);
        }
    }
}

void assemble_herglotz_omp(const DirectionSet& dirs, double k, std::span<const Point> targets,
                           CMatrix& out) {
    const auto nt = static_cast<Eigen::Index>(targets.size());
    const auto m = static_cast<Eigen::Index>(dirs.size());
    out.resize(nt, m);
#pragma omp parallel for schedule(static)
    for (Eigen::Index t = 0; t < nt; ++t) {
        for (Eigen::Index j = 0; j < m; ++j) {
            out(t, j) = plane_wave(k, targets[static_cast<std::size_t>(t)], dirs.direction(j)) * dirs.weight(j);
        }
    }
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
    if (n >= 1) {
        omp_set_num_threads(n);
    }
}

}  // namespace nlscat::kernels
