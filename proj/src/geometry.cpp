#include "nlscat/geometry.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nlscat/errors.hpp"

namespace nlscat {

double sphere_area(int d) { return d == 2 ? 2.0 * kPi : 4.0 * kPi; }

double ball_volume(double R, int d) {
    return d == 2 ? kPi * R * R : 4.0 / 3.0 * kPi * R * R * R;
}

std::shared_ptr<const DiskGrid> DiskGrid::build(double R, int n, int d) {
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw ConstructionError("disk grid: radius must be positive");
    }
    if (n < 8) {
        throw ConstructionError("disk grid: need at least 8 nodes per axis, got " + std::to_string(n));
    }
    if (d != 2 && d != 3) {
        throw ConstructionError("disk grid: dimension must be 2 or 3");
    }
    auto grid = std::shared_ptr<DiskGrid>(new DiskGrid());
    grid->R_ = R;
    grid->n_ = n;
    grid->d_ = d;
    grid->h_ = 2.0 * R / n;
    grid->cell_volume_ = std::pow(grid->h_, d);

    std::size_t total = static_cast<std::size_t>(n) * n * (d == 3 ? n : 1);
    grid->lookup_.assign(total, -1);
    const int nz = d == 3 ? n : 1;
    // Lexicographic order: first axis slowest.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < nz; ++l) {
                std::array<int, 3> idx{i, j, d == 3 ? l : 0};
                Point p = grid->lattice_point(idx);
                if (norm(p) < R) {
                    const std::size_t flat = (static_cast<std::size_t>(i) * n + j) * nz + l;
                    grid->lookup_[flat] = static_cast<std::int32_t>(grid->nodes_.size());
                    grid->nodes_.push_back(p);
                    grid->weights_.push_back(grid->cell_volume_);
                    grid->lattice_.push_back(idx);
                }
            }
        }
    }
    if (grid->nodes_.empty()) {
        throw ConstructionError("disk grid: no cell centre falls inside the ball");
    }
    return grid;
}

Point DiskGrid::lattice_point(const std::array<int, 3>& idx) const {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < d_; ++a) {
        p[a] = -R_ + (idx[a] + 0.5) * h_;
    }
    return p;
}

std::optional<std::size_t> DiskGrid::node_at(const std::array<int, 3>& idx) const {
    for (int a = 0; a < d_; ++a) {
        if (idx[a] < 0 || idx[a] >= n_) {
            return std::nullopt;
        }
    }
    const int nz = d_ == 3 ? n_ : 1;
    const std::size_t flat =
        (static_cast<std::size_t>(idx[0]) * n_ + idx[1]) * nz + (d_ == 3 ? idx[2] : 0);
    const auto v = lookup_[flat];
    if (v < 0) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(v);
}

std::optional<std::size_t> DiskGrid::find_node(const Point& p) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < d_; ++a) {
        idx[a] = static_cast<int>(std::lround((p[a] + R_) / h_ - 0.5));
    }
    auto id = node_at(idx);
    if (id && distance(nodes_[*id], p) <= 1e-9 * h_) {
        return id;
    }
    return std::nullopt;
}

double DiskGrid::total_weight() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool DiskGrid::same_layout(const DiskGrid& other) const noexcept {
    return this == &other || (R_ == other.R_ && n_ == other.n_ && d_ == other.d_);
}

std::shared_ptr<const DirectionSet> DirectionSet::build(int m, int d) {
    if (m < 4) {
        throw ConstructionError("direction set: need at least 4 directions, got " + std::to_string(m));
    }
    if (d != 2 && d != 3) {
        throw ConstructionError("direction set: dimension must be 2 or 3");
    }
    std::vector<Point> dirs;
    dirs.reserve(m);
    if (d == 2) {
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * kPi * j / m;
            dirs.push_back({std::cos(th), std::sin(th), 0.0});
        }
    } else {
        // Fibonacci lattice on the sphere.
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < m; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / m;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * j;
            dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
    }
    return from_directions(std::move(dirs), d);
}

std::shared_ptr<const DirectionSet> DirectionSet::from_directions(std::vector<Point> dirs, int d) {
    if (dirs.empty()) {
        throw ConstructionError("direction set: empty");
    }
    auto set = std::shared_ptr<DirectionSet>(new DirectionSet());
    set->d_ = d;
    for (auto& p : dirs) {
        const double len = norm(p);
        if (!(len > 0.0)) {
            throw ConstructionError("direction set: zero direction");
        }
        // Leave unit vectors untouched so stored directions round-trip bit-exactly.
        if (std::fabs(len - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
            for (auto& c : p) {
                c /= len;
            }
        }
    }
    set->weights_.assign(dirs.size(), sphere_area(d) / static_cast<double>(dirs.size()));
    set->dirs_ = std::move(dirs);
    return set;
}

double DirectionSet::angle(std::size_t i) const {
    double a = std::atan2(dirs_[i][1], dirs_[i][0]);
    if (a < 0.0) {
        a += 2.0 * kPi;
    }
    return a;
}

bool DirectionSet::same_layout(const DirectionSet& other) const noexcept {
    return this == &other || (d_ == other.d_ && dirs_ == other.dirs_);
}

}  // namespace nlscat
