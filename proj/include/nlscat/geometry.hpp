#pragma once

// Cell-centred tensor grids clipped to the ball B_R, and quadrature rules on
// the unit sphere S^{d-1}.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "nlscat/types.hpp"

namespace nlscat {

/// Midpoint quadrature on B_R: cells of the bounding cube [-R, R]^d whose
/// centre lies strictly inside the ball, each weighted by the full cell volume.
class DiskGrid {
public:
    static std::shared_ptr<const DiskGrid> build(double R, int n, int d);

    int dimension() const noexcept { return d_; }
    int nodes_per_axis() const noexcept { return n_; }
    double radius() const noexcept { return R_; }
    /// Cell width h = 2R / n.
    double spacing() const noexcept { return h_; }
    double cell_volume() const noexcept { return cell_volume_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    const std::vector<Point>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const Point& node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    double total_weight() const;

    /// Integer lattice coordinates of node i (cell index along each axis).
    const std::array<int, 3>& lattice_index(std::size_t i) const { return lattice_[i]; }
    /// Position of the cell centre with lattice coordinates idx (may be outside the ball).
    Point lattice_point(const std::array<int, 3>& idx) const;
    /// Node id for the given lattice coordinates, or nullopt when the cell is not a node.
    std::optional<std::size_t> node_at(const std::array<int, 3>& idx) const;
    /// Node whose centre coincides with p to within 1e-9 h, if any.
    std::optional<std::size_t> find_node(const Point& p) const;

    /// Structural equality (same R, n, d); grids built with equal parameters are interchangeable.
    bool same_layout(const DiskGrid& other) const noexcept;

private:
    DiskGrid() = default;

    double R_ = 0.0;
    double h_ = 0.0;
    double cell_volume_ = 0.0;
    int n_ = 0;
    int d_ = 2;
    std::vector<Point> nodes_;
    std::vector<double> weights_;
    std::vector<std::array<int, 3>> lattice_;
    std::vector<std::int32_t> lookup_;  // n^d entries, -1 when the cell is outside the ball
};

using GridPtr = std::shared_ptr<const DiskGrid>;

/// Directions on S^{d-1} with positive surface weights.
class DirectionSet {
public:
    /// d = 2: m equispaced angles 2 pi j / m; d = 3: Fibonacci lattice. Equal weights.
    static std::shared_ptr<const DirectionSet> build(int m, int d);
    /// Arbitrary unit directions with equal weights |S^{d-1}| / m.
    static std::shared_ptr<const DirectionSet> from_directions(std::vector<Point> dirs, int d);

    int dimension() const noexcept { return d_; }
    std::size_t size() const noexcept { return dirs_.size(); }
    const std::vector<Point>& directions() const noexcept { return dirs_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const Point& direction(std::size_t i) const { return dirs_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    /// Polar angle of direction i in d = 2 (in [0, 2 pi)).
    double angle(std::size_t i) const;

    bool same_layout(const DirectionSet& other) const noexcept;

private:
    DirectionSet() = default;
    int d_ = 2;
    std::vector<Point> dirs_;
    std::vector<double> weights_;
};

using DirectionsPtr = std::shared_ptr<const DirectionSet>;

/// |S^{d-1}|: 2 pi for d = 2, 4 pi for d = 3.
double sphere_area(int d);
/// |B_R| in d = 2, 3.
double ball_volume(double R, int d);

}  // namespace nlscat
