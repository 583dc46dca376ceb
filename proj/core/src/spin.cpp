#include "diraclab/spin.hpp"

#include "diraclab/parallel.hpp"

#include <cmath>
#include <cstring>

namespace diraclab {

namespace {
constexpr cplx I{0, 1};

// 2x2 Pauli action on a pair (v0, v1)
inline void sigma_apply(int j, cplx v0, cplx v1, cplx& o0, cplx& o1) {
    switch (j) {
        case 0: o0 = v1; o1 = v0; break;                    // sigma_1
        case 1: o0 = -I * v1; o1 = I * v0; break;           // sigma_2
        default: o0 = v0; o1 = -v1; break;                  // sigma_3
    }
}

// (a . sigma) acting on (v0, v1); a = (a1, a2, a3)
inline void sigdot_apply(double a1, double a2, double a3, cplx v0, cplx v1, cplx& o0, cplx& o1) {
    o0 = a3 * v0 + cplx{a1, -a2} * v1;
    o1 = cplx{a1, a2} * v0 - a3 * v1;
}

}  // namespace

// ------------------------------------------------------------ DiracMatrices --

const DiracMatrices& DiracMatrices::get() {
    static const DiracMatrices dm = [] {
        DiracMatrices m;
        auto set = [&](int a, std::initializer_list<cplx> vals) {
            int k = 0;
            for (cplx v : vals) m.gamma[std::size_t(a)][std::size_t(k++)] = v;
        };
        set(0, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1});
        set(1, {0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 0});
        set(2, {0, 0, 0, -I, 0, 0, I, 0, 0, I, 0, 0, -I, 0, 0, 0});
        set(3, {0, 0, 1, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0});
        return m;
    }();
    return dm;
}

double clifford_residual() {
    const auto& dm = DiracMatrices::get();
    double worst = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) {
                    cplx s = 0;
                    for (int k = 0; k < 4; ++k)
                        s += dm.g(a, r, k) * dm.g(b, k, c) + dm.g(b, r, k) * dm.g(a, k, c);
                    const cplx want = (r == c && a == b) ? cplx{2 * dm.eta[std::size_t(a)], 0}
                                                         : cplx{0, 0};
                    worst = std::max(worst, std::abs(s - want));
                }
    return worst;
}

// ---------------------------------------------------------------- dreibein --

Dreibein dreibein(const MetricSpec& spec, const Point3& x) {
    const MetricPoint mp = metric_at(spec, x);
    // shipped families are diagonal in their chart; the SPD square root of a
    // positive diagonal matrix is the entrywise root
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j && mp.h_inv(i, j) != 0.0)
                throw NumericalError("dreibein: non-diagonal h_inv is out of scope");
    Dreibein D;
    for (int a = 0; a < 3; ++a) {
        const double v = mp.h_inv(a, a);
        if (!(v > 0)) throw NumericalError("dreibein: h_inv not positive definite");
        D.f(a, a) = std::sqrt(v);
        D.f_lower(a, a) = mp.h(a, a) * D.f(a, a);
    }
    return D;
}

double vierbein_check(const MetricSpec& spec, const Point3& x, double t) {
    const MetricPoint mp = metric_at(spec, x);
    const Dreibein D = dreibein(spec, x);
    const double phi = spec.phi(t);

    double e[4][4] = {};  // e[a][mu]
    e[0][0] = phi;
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i) e[a + 1][i + 1] = D.f(a, i);

    const double eta[4] = {1, -1, -1, -1};
    double worst = 0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double s = 0;
            for (int a = 0; a < 4; ++a) s += e[a][mu] * eta[a] * e[a][nu];
            double g = 0;
            if (mu == 0 && nu == 0)
                g = phi * phi;
            else if (mu > 0 && nu > 0)
                g = -mp.h_inv(mu - 1, nu - 1);
            worst = std::max(worst, std::abs(s - g));
        }
    return worst;
}

SpinConnection spin_connection(const MetricSpec& spec, const Point3& x) {
    const MetricJet J = metric_jet(spec, x);
    double G[3][3][3];
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int l = 0; l < 3; ++l)
                    s += J.h_inv(k, l) * (J.dH(i, l, j) + J.dH(j, i, l) - J.dH(l, i, j));
                G[k][i][j] = 0.5 * s;
            }
    double f[3], dlnf[3][3];
    for (int a = 0; a < 3; ++a) f[a] = std::sqrt(J.h_inv(a, a));
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) dlnf[i][a] = J.dHinv(i, a, a) / (2 * J.h_inv(a, a));

    // alpha_i^{ab} = f_j^a d_i f^{jb} + f_j^a Lambda^j_{ik} f^{kb}, frame indices
    // raised and lowered with eta; for the diagonal dreibein this evaluates to
    //   -( delta_ab d_i ln f_a + (f_b / f_a) Lambda^a_{ib} )
    SpinConnection S;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double v = -(f[b] / f[a]) * G[a][i][b];
                if (a == b) v -= dlnf[i][a];
                S.a(i, a, b) = v;
            }
    return S;
}

// ----------------------------------------------------------------- apply_H --

namespace {

void require_spin(const GeometryTables& T) {
    if (!T.has_spin()) throw NumericalError("geometry tables lack the spin sector");
}

// Omega_j u = -(i/2) (m_j u_A, m_j u_B) with m_j = alpha_j . sigma
inline void omega_apply(const double* a9, int j, const cplx u[4], cplx out[4]) {
    const double a1 = a9[3 * j + 0], a2 = a9[3 * j + 1], a3 = a9[3 * j + 2];
    cplx t0, t1;
    sigdot_apply(a1, a2, a3, u[0], u[1], t0, t1);
    out[0] = -0.5 * I * t0;
    out[1] = -0.5 * I * t1;
    sigdot_apply(a1, a2, a3, u[2], u[3], t0, t1);
    out[2] = -0.5 * I * t0;
    out[3] = -0.5 * I * t1;
}

// X_j = gamma^0 gamma^j : v -> (sigma_j v_B, sigma_j v_A)
inline void X_apply(int j, const cplx v[4], cplx out[4]) {
    sigma_apply(j, v[2], v[3], out[0], out[1]);
    sigma_apply(j, v[0], v[1], out[2], out[3]);
}

}  // namespace

SpinorField apply_H(const GeometryTables& T, double m, const SpinorField& u) {
    require_spin(T);
    if (!u.grid.same_as(T.grid)) throw ShapeError("apply_H: grid mismatch");
    const std::size_t N = T.grid.size();
    SpinorField out(T.grid);
    SpinorField du(T.grid);    // D4_j u, reused per axis
    SpinorField tmp(T.grid);   // w P_j u, reused per axis

    for (int j = 0; j < 3; ++j) {
        for (int c = 0; c < 4; ++c) diff1_4(T.grid, u.comp(c), du.comp(c), j);

        // advective half:  1/2 P_j (D4_j u),  P_j = -i f_j X_j
        parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
            cplx v[4], xv[4];
            for (std::size_t p = b; p < e; ++p) {
                for (int c = 0; c < 4; ++c) v[c] = du.at(c, p);
                X_apply(j, v, xv);
                const cplx fac = -0.5 * I * T.fdiag[std::size_t(j)][p];
                for (int c = 0; c < 4; ++c) out.at(c, p) += fac * xv[c];
            }
        });

        // divergence half:  1/2 (1/w) D4_j (w P_j u)
        parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
            cplx v[4], xv[4];
            for (std::size_t p = b; p < e; ++p) {
                for (int c = 0; c < 4; ++c) v[c] = u.at(c, p);
                X_apply(j, v, xv);
                const cplx fac = -I * T.fdiag[std::size_t(j)][p] * T.w[p];
                for (int c = 0; c < 4; ++c) tmp.at(c, p) = fac * xv[c];
            }
        });
        for (int c = 0; c < 4; ++c) diff1_4(T.grid, tmp.comp(c), du.comp(c), j);
        parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
            for (std::size_t p = b; p < e; ++p) {
                const double iw = 0.5 / T.w[p];
                for (int c = 0; c < 4; ++c) out.at(c, p) += iw * du.at(c, p);
            }
        });
    }

    // pointwise part: Q_H u = -(i/2) sum_j f_j {X_j, Omega_j} u - m gamma^0 u
    parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
        cplx v[4], ov[4], xov[4], xv[4], oxv[4];
        for (std::size_t p = b; p < e; ++p) {
            const double* a9 = &T.alpha[9 * p];
            for (int c = 0; c < 4; ++c) v[c] = u.at(c, p);
            cplx acc[4] = {0, 0, 0, 0};
            for (int j = 0; j < 3; ++j) {
                omega_apply(a9, j, v, ov);
                X_apply(j, ov, xov);
                X_apply(j, v, xv);
                omega_apply(a9, j, xv, oxv);
                const cplx fac = -0.5 * I * T.fdiag[std::size_t(j)][p];
                for (int c = 0; c < 4; ++c) acc[c] += fac * (xov[c] + oxv[c]);
            }
            // - m gamma^0 u
            acc[0] -= m * v[0];
            acc[1] -= m * v[1];
            acc[2] += m * v[2];
            acc[3] += m * v[3];
            for (int c = 0; c < 4; ++c) out.at(c, p) += acc[c];
        }
    });
    return out;
}

SpinorField covariant_laplacian(const GeometryTables& T, const SpinorField& u) {
    require_spin(T);
    if (!u.grid.same_as(T.grid)) throw ShapeError("covariant_laplacian: grid mismatch");
    const std::size_t N = T.grid.size();
    SpinorField out(T.grid);
    SpinorField cd(T.grid);   // D_j u = D4_j u + Omega_j u
    SpinorField tmp(T.grid);

    for (int j = 0; j < 3; ++j) {
        for (int c = 0; c < 4; ++c) diff1_4(T.grid, u.comp(c), cd.comp(c), j);
        parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
            cplx v[4], ov[4];
            for (std::size_t p = b; p < e; ++p) {
                const double* a9 = &T.alpha[9 * p];
                for (int c = 0; c < 4; ++c) v[c] = u.at(c, p);
                omega_apply(a9, j, v, ov);
                for (int c = 0; c < 4; ++c) cd.at(c, p) += ov[c];
            }
        });
        // out += h^{jj} Omega_j (D_j u)  and  tmp = w h^{jj} D_j u
        parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
            cplx v[4], ov[4];
            for (std::size_t p = b; p < e; ++p) {
                const double* a9 = &T.alpha[9 * p];
                const double hj = T.hjj[std::size_t(j)][p];
                for (int c = 0; c < 4; ++c) v[c] = cd.at(c, p);
                omega_apply(a9, j, v, ov);
                for (int c = 0; c < 4; ++c) {
                    out.at(c, p) += hj * ov[c];
                    tmp.at(c, p) = T.w[p] * hj * v[c];
                }
            }
        });
        for (int c = 0; c < 4; ++c) diff1_4(T.grid, tmp.comp(c), cd.comp(c), j);
        parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
            for (std::size_t p = b; p < e; ++p)
                for (int c = 0; c < 4; ++c) out.at(c, p) += cd.at(c, p) / T.w[p];
        });
    }
    return out;
}

SpinorField wave_rhs(const GeometryTables& T, double m, const SpinorField& u) {
    SpinorField out = covariant_laplacian(T, u);
    const std::size_t N = T.grid.size();
    parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t p = b; p < e; ++p) {
            const double pot = 0.25 * T.curv[p] + m * m;
            for (int c = 0; c < 4; ++c) out.at(c, p) -= pot * u.at(c, p);
        }
    });
    return out;
}

double square_residual(const GeometryTables& T, double m, const SpinorField& u) {
    const SpinorField Hu = apply_H(T, m, u);
    const SpinorField HHu = apply_H(T, m, Hu);
    SpinorField rhs = wave_rhs(T, 0.0, u);  // Lap_D u - R/4 u
    const std::size_t N = T.grid.size();
    double num = 0, den = 0;
    for (int c = 0; c < 4; ++c) {
        num += parallel_reduce(N, [&](std::size_t b, std::size_t e) {
            double s = 0;
            for (std::size_t p = b; p < e; ++p) {
                // H^2 u  vs  m^2 u - Lap_D u + R/4 u
                const cplx r = HHu.at(c, p) - (m * m * u.at(c, p) - rhs.at(c, p));
                s += T.w[p] * std::norm(r);
            }
            return s;
        });
        den += parallel_reduce(N, [&](std::size_t b, std::size_t e) {
            double s = 0;
            for (std::size_t p = b; p < e; ++p) s += T.w[p] * std::norm(u.at(c, p));
            return s;
        });
    }
    if (den == 0) return 0.0;
    return std::sqrt(num / den);
}

cplx inner_h(const GeometryTables& T, const SpinorField& a, const SpinorField& b) {
    cplx s = 0;
    for (int c = 0; c < 4; ++c) s += inner_h(T, a.comp(c), b.comp(c));
    return s;
}

double norm_h_sq(const GeometryTables& T, const SpinorField& a) {
    double s = 0;
    for (int c = 0; c < 4; ++c) s += norm_h_sq(T, a.comp(c));
    return s;
}

}  // namespace diraclab
