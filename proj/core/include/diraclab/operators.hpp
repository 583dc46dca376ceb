#pragma once

#include "diraclab/grid.hpp"

namespace diraclab {

// ----------------------------------------------------------------------------
// Precomputed per-grid geometry.  Both shipped metric families are diagonal in
// their chart, which the discretizations below rely on.
// ----------------------------------------------------------------------------
struct GeometryTables {
    Grid3 grid;
    MetricSpec spec;

    std::vector<double> w;                      // sqrt(det h) at nodes
    std::array<std::vector<double>, 3> hjj;     // h^{jj} at nodes
    std::array<std::vector<double>, 3> gface;   // w * h^{jj} at the (i+1/2) face, axis j
    std::vector<double> curv;                   // scalar curvature R_h at nodes

    // spin-sector tables (filled when with_spin)
    std::array<std::vector<double>, 3> fdiag;   // diagonal dreibein f_a^a
    // spin connection: antisymmetric components per derivative axis j,
    // packed (al_j^{23}, al_j^{31}, al_j^{12}) -> 9 doubles per point
    std::vector<double> alpha;

    bool has_spin() const { return !alpha.empty(); }
};

GeometryTables build_geometry_tables(const MetricSpec& spec, const Grid3& grid, bool with_spin);

// ----------------------------------------------------------------------------
// stencils (zero-Dirichlet ghosts; fields are compactly supported by contract)
// ----------------------------------------------------------------------------

/// out = d(in)/d(axis), 2nd-order central
void diff1_2(const Grid3& g, const cplx* in, cplx* out, int axis);
/// out = d(in)/d(axis), 4th-order central
void diff1_4(const Grid3& g, const cplx* in, cplx* out, int axis);

/// Laplace-Beltrami, compact staggered-flux divergence form:
///   (Lap u)_i = (1/w_i) sum_j [ g_{i+1/2} (u_{i+1} - u_i) - g_{i-1/2} (u_i - u_{i-1}) ] / dx_j^2
/// Exactly self-adjoint and negative semidefinite w.r.t. sum w conj(u) v.
void laplace_beltrami_apply(const GeometryTables& T, const cplx* in, cplx* out);

Field laplace_beltrami(const GeometryTables& T, const Field& f);

/// L = (R_h/4 + m^2) - Lap_h ; the wave/virial workhorse, exactly self-adjoint
void apply_L(const GeometryTables& T, double m, const cplx* in, cplx* out);

/// sum over nodes of w * f(idx) * dV  (deterministic reduction)
double weighted_sum(const GeometryTables& T, const std::function<double(std::size_t)>& f);

/// discrete <a, b>_h = sum w conj(a) b dV
cplx inner_h(const GeometryTables& T, const cplx* a, const cplx* b);
double norm_h_sq(const GeometryTables& T, const cplx* a);

/// true when |u| exceeds tol * max|u| within `margin` cells of the boundary
bool support_touches_boundary(const Grid3& g, const cplx* u, int margin, double tol = 1e-12);

}  // namespace diraclab
