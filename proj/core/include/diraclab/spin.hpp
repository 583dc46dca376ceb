#pragma once

#include "diraclab/operators.hpp"

namespace diraclab {

// ----------------------------------------------------------------------------
// Dirac matrices in the standard representation,
//   gamma^0 = diag(1,1,-1,-1), gamma^j = gamma^0 alpha_j,
// satisfying gamma^a gamma^b + gamma^b gamma^a = 2 eta^{ab} I_4.
// ----------------------------------------------------------------------------
struct DiracMatrices {
    std::array<std::array<cplx, 16>, 4> gamma;  // gamma[a], row-major 4x4
    std::array<double, 4> eta{1, -1, -1, -1};

    cplx g(int a, int r, int c) const { return gamma[std::size_t(a)][std::size_t(4 * r + c)]; }
    static const DiracMatrices& get();
};

/// anticommutator residual max_{a,b} |gamma^a gamma^b + gamma^b gamma^a - 2 eta^{ab} I|
double clifford_residual();

// ----------------------------------------------------------------------------
// dreibein / vierbein
// ----------------------------------------------------------------------------

/// Dreibein f_a^i with h^{ij} = f_a^i f_a^j, fixed to the symmetric
/// positive-definite square root of h_inv.  f_lower is h_ij f_a^j.
struct Dreibein {
    SymMatrix3 f;
    SymMatrix3 f_lower;
};

Dreibein dreibein(const MetricSpec& spec, const Point3& x);

/// max |e_a^mu eta^{ab} e_b^nu - g^{mu nu}| with the vierbein built from
/// (phi, f); diagnostic, expected <= 1e-12
double vierbein_check(const MetricSpec& spec, const Point3& x, double t = 0.0);

/// spin connection coefficients alpha_i^{ab} (antisymmetric in a,b)
struct SpinConnection {
    std::array<double, 27> alpha{};  // [i][a][b]
    double a(int i, int aa, int b) const { return alpha[std::size_t(9 * i + 3 * aa + b)]; }
    double& a(int i, int aa, int b) { return alpha[std::size_t(9 * i + 3 * aa + b)]; }
};

SpinConnection spin_connection(const MetricSpec& spec, const Point3& x);

// ----------------------------------------------------------------------------
// the Hamiltonian H = -gamma^0 (i gamma^a f_a^j D_j + m),
// D_j = d_j + (1/8) alpha_j^{ab} [gamma_a, gamma_b]
//
// The discrete operator is the symmetrized split form
//   H u = 1/2 [ P_j D4_j u + (1/w) D4_j (w P_j u) ] + Q_H u
// which is exactly self-adjoint w.r.t. the discrete <.,.>_h inner product
// (P_j is anti-Hermitian pointwise and D4 is an antisymmetric stencil).
// ----------------------------------------------------------------------------

/// H applied to a spinor field; tables must carry the spin sector
SpinorField apply_H(const GeometryTables& T, double m, const SpinorField& u);

/// covariant Laplace-Beltrami on spinors (4th-order stencils), the oracle side
/// of the squaring identity; reduces to the scalar discretization when the
/// connection vanishes (flat metric)
SpinorField covariant_laplacian(const GeometryTables& T, const SpinorField& u);

/// (Lap_D - R/4 - m^2) u, the spatial operator of the squared (wave-form) equation
SpinorField wave_rhs(const GeometryTables& T, double m, const SpinorField& u);

/// || H(Hu) - (m^2 u - Lap_D u + R/4 u) ||_h / ||u||_h
double square_residual(const GeometryTables& T, double m, const SpinorField& u);

// spinor-field inner products
cplx inner_h(const GeometryTables& T, const SpinorField& a, const SpinorField& b);
double norm_h_sq(const GeometryTables& T, const SpinorField& a);

}  // namespace diraclab
