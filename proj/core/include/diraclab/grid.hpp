#pragma once

#include "diraclab/geometry.hpp"
#include "diraclab/types.hpp"

#include <cstdint>
#include <vector>

namespace diraclab {

enum class Chart { Cartesian, Product };

/// Uniform tensor-product grid over a box.  For Chart::Cartesian the axes are
/// (x, y, z); for Chart::Product they are (r, th, ph).
struct Grid3 {
    Chart chart = Chart::Cartesian;
    std::array<int, 3> n{16, 16, 16};
    Point3 lo{-1, -1, -1};
    Point3 hi{1, 1, 1};
    /// a periodic axis spans [lo, hi) with spacing (hi-lo)/n; only valid for
    /// axes along which the metric is constant (flat Cartesian, product ph)
    std::array<bool, 3> periodic{false, false, false};

    std::size_t size() const {
        return std::size_t(n[0]) * std::size_t(n[1]) * std::size_t(n[2]);
    }
    double dx(int axis) const {
        return (hi[axis] - lo[axis]) / (periodic[axis] ? n[axis] : n[axis] - 1);
    }
    double coord(int axis, int i) const { return lo[axis] + dx(axis) * i; }
    Point3 point(int i, int j, int k) const {
        return {coord(0, i), coord(1, j), coord(2, k)};
    }
    std::size_t idx(int i, int j, int k) const {
        return (std::size_t(i) * n[1] + j) * std::size_t(n[2]) + k;
    }
    /// cell volume element in chart coordinates
    double cell_volume() const { return dx(0) * dx(1) * dx(2); }

    bool same_as(const Grid3& o) const {
        return chart == o.chart && n == o.n && lo == o.lo && hi == o.hi
            && periodic == o.periodic;
    }
};

/// complex scalar field sampled on a Grid3
struct Field {
    Grid3 grid;
    std::vector<cplx> v;

    Field() = default;
    explicit Field(const Grid3& g) : grid(g), v(g.size(), cplx{0, 0}) {}

    cplx& at(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
    cplx at(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }

    void require_same_grid(const Field& o) const {
        if (!grid.same_as(o.grid)) throw ShapeError("field grid mismatch");
    }
};

/// 4-component spinor field, component-major storage
struct SpinorField {
    Grid3 grid;
    std::vector<cplx> v;  // size 4 * grid.size(), component c at v[c*N + idx]

    SpinorField() = default;
    explicit SpinorField(const Grid3& g) : grid(g), v(4 * g.size(), cplx{0, 0}) {}

    std::size_t npoints() const { return grid.size(); }
    cplx* comp(int c) { return v.data() + std::size_t(c) * npoints(); }
    const cplx* comp(int c) const { return v.data() + std::size_t(c) * npoints(); }
    cplx& at(int c, std::size_t p) { return v[std::size_t(c) * npoints() + p]; }
    cplx at(int c, std::size_t p) const { return v[std::size_t(c) * npoints() + p]; }

    void require_same_grid(const SpinorField& o) const {
        if (!grid.same_as(o.grid)) throw ShapeError("spinor grid mismatch");
    }
};

/// 1D radial grid for the mode representation of warped products
struct RadialGrid {
    int n = 256;
    double r_lo = 0.1;
    double r_hi = 10.0;

    double dr() const { return (r_hi - r_lo) / (n - 1); }
    double r(int i) const { return r_lo + dr() * i; }
};

struct RadialField {
    RadialGrid grid;
    std::vector<cplx> v;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g) : grid(g), v(std::size_t(g.n), cplx{0, 0}) {}
};

}  // namespace diraclab
