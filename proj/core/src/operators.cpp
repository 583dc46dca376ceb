#include "diraclab/operators.hpp"

#include "diraclab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace diraclab {

namespace {

// walk every grid line along `axis`, calling fn(base_offset, stride, length)
template <class F>
void for_each_line(const Grid3& g, int axis, F&& fn) {
    const std::size_t S0 = std::size_t(g.n[1]) * g.n[2], S1 = std::size_t(g.n[2]), S2 = 1;
    const std::size_t S[3] = {S0, S1, S2};
    const int a = axis;
    const int b = (axis == 0) ? 1 : 0;
    const int c = (axis == 2) ? 1 : 2;
    for (int ib = 0; ib < g.n[b]; ++ib)
        for (int ic = 0; ic < g.n[c]; ++ic) {
            const std::size_t base = std::size_t(ib) * S[b] + std::size_t(ic) * S[c];
            fn(base, S[a], g.n[a]);
        }
}

double clamp_theta(double th) {
    constexpr double eps = 1e-6;
    constexpr double pi = 3.14159265358979323846;
    return std::min(std::max(th, eps), pi - eps);
}

// Lambda^k_{ij} from a metric jet
void christoffel_from_jet(const MetricJet& J, double G[3][3][3]) {
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int l = 0; l < 3; ++l)
                    s += J.h_inv(k, l) * (J.dH(i, l, j) + J.dH(j, i, l) - J.dH(l, i, j));
                G[k][i][j] = 0.5 * s;
            }
}

}  // namespace

GeometryTables build_geometry_tables(const MetricSpec& spec, const Grid3& grid, bool with_spin) {
    spec.validate();
    GeometryTables T;
    T.grid = grid;
    T.spec = spec;
    const std::size_t N = grid.size();
    T.w.resize(N);
    for (int a = 0; a < 3; ++a) T.hjj[a].resize(N);
    T.curv.resize(N);
    if (with_spin) {
        for (int a = 0; a < 3; ++a) T.fdiag[a].resize(N);
        T.alpha.resize(9 * N);
    }

    parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t p = b; p < e; ++p) {
            const int i = int(p / (std::size_t(grid.n[1]) * grid.n[2]));
            const int j = int((p / std::size_t(grid.n[2])) % std::size_t(grid.n[1]));
            const int k = int(p % std::size_t(grid.n[2]));
            Point3 x = grid.point(i, j, k);
            if (grid.chart == Chart::Product) x[1] = clamp_theta(x[1]);
            const MetricJet J = metric_jet(spec, x);
            T.w[p] = J.sqrt_det;
            for (int a = 0; a < 3; ++a) T.hjj[a][p] = J.h_inv(a, a);
            T.curv[p] = scalar_curvature(spec, x);

            if (with_spin) {
                double G[3][3][3];
                christoffel_from_jet(J, G);
                double f[3], dlnf[3][3];  // dlnf[i][a] = d_i ln f_aa
                for (int a = 0; a < 3; ++a) f[a] = std::sqrt(J.h_inv(a, a));
                for (int i2 = 0; i2 < 3; ++i2)
                    for (int a = 0; a < 3; ++a)
                        dlnf[i2][a] = J.dHinv(i2, a, a) / (2 * J.h_inv(a, a));
                // alpha_i^{ab} = -( delta_ab d_i ln f_a + (f_b/f_a) Lambda^a_{ib} );
                // metric compatibility makes it antisymmetric in (a,b)
                auto alpha_full = [&](int i2, int a, int bb) {
                    double v = -(f[bb] / f[a]) * G[a][i2][bb];
                    if (a == bb) v -= dlnf[i2][a];
                    return v;
                };
                for (int i2 = 0; i2 < 3; ++i2) {
                    const double a23 = 0.5 * (alpha_full(i2, 1, 2) - alpha_full(i2, 2, 1));
                    const double a31 = 0.5 * (alpha_full(i2, 2, 0) - alpha_full(i2, 0, 2));
                    const double a12 = 0.5 * (alpha_full(i2, 0, 1) - alpha_full(i2, 1, 0));
                    T.alpha[9 * p + 3 * std::size_t(i2) + 0] = a23;
                    T.alpha[9 * p + 3 * std::size_t(i2) + 1] = a31;
                    T.alpha[9 * p + 3 * std::size_t(i2) + 2] = a12;
                }
                for (int a = 0; a < 3; ++a) T.fdiag[a][p] = f[a];
            }
        }
    });

    // face tables: exact metric evaluation at face midpoints, clamped in theta
    for (int a = 0; a < 3; ++a) {
        const int nb = (a == 0) ? 1 : 0;
        const int nc = (a == 2) ? 1 : 2;
        const std::size_t nfaces = std::size_t(grid.n[a] + 1) * grid.n[nb] * grid.n[nc];
        T.gface[a].assign(nfaces, 0.0);
        std::size_t q = 0;
        for (int ib = 0; ib < grid.n[nb]; ++ib)
            for (int ic = 0; ic < grid.n[nc]; ++ic)
                for (int fa = 0; fa <= grid.n[a]; ++fa, ++q) {
                    Point3 x;
                    x[a] = grid.lo[a] + (fa - 0.5) * grid.dx(a);
                    x[nb] = grid.coord(nb, ib);
                    x[nc] = grid.coord(nc, ic);
                    if (grid.chart == Chart::Product) {
                        x[1] = clamp_theta(x[1]);
                        if (spec.is_warped()
                            && (spec.d_kind == DKind::Flat || spec.d_kind == DKind::SubFlat))
                            x[0] = std::max(x[0], 0.5 * grid.lo[0]);
                    }
                    const MetricPoint mp = metric_at(spec, x);
                    T.gface[a][q] = mp.sqrt_det * mp.h_inv(a, a);
                }
    }
    return T;
}

namespace {

// face array index for axis a, face index fa in [0, n_a], line (ib, ic)
inline std::size_t face_index(const Grid3& g, int a, int ib, int ic, int fa) {
    const int nb = (a == 0) ? 1 : 0;
    (void)nb;
    return (std::size_t(ib) * g.n[(a == 2) ? 1 : 2] + std::size_t(ic)) * std::size_t(g.n[a] + 1)
         + std::size_t(fa);
}

}  // namespace

void diff1_2(const Grid3& g, const cplx* in, cplx* out, int axis) {
    const double inv2h = 1.0 / (2 * g.dx(axis));
    const bool per = g.periodic[axis];
    for_each_line(g, axis, [&](std::size_t base, std::size_t st, int len) {
        auto val = [&](int i) -> cplx {
            if (per) return in[base + st * std::size_t((i % len + len) % len)];
            return (i >= 0 && i < len) ? in[base + st * std::size_t(i)] : cplx{0, 0};
        };
        for (int i = 0; i < len; ++i)
            out[base + st * std::size_t(i)] = (val(i + 1) - val(i - 1)) * inv2h;
    });
}

void diff1_4(const Grid3& g, const cplx* in, cplx* out, int axis) {
    const double c1 = 8.0 / (12 * g.dx(axis)), c2 = 1.0 / (12 * g.dx(axis));
    const bool per = g.periodic[axis];
    for_each_line(g, axis, [&](std::size_t base, std::size_t st, int len) {
        auto val = [&](int i) -> cplx {
            if (per) return in[base + st * std::size_t((i % len + len) % len)];
            return (i >= 0 && i < len) ? in[base + st * std::size_t(i)] : cplx{0, 0};
        };
        for (int i = 0; i < 2 && i < len; ++i)
            out[base + st * std::size_t(i)] =
                c1 * (val(i + 1) - val(i - 1)) - c2 * (val(i + 2) - val(i - 2));
        for (int i = std::max(2, len - 2); i < len; ++i)
            out[base + st * std::size_t(i)] =
                c1 * (val(i + 1) - val(i - 1)) - c2 * (val(i + 2) - val(i - 2));
        for (int i = 2; i < len - 2; ++i) {
            const std::size_t q = base + st * std::size_t(i);
            out[q] = c1 * (in[q + st] - in[q - st]) - c2 * (in[q + 2 * st] - in[q - 2 * st]);
        }
    });
}

void laplace_beltrami_apply(const GeometryTables& T, const cplx* in, cplx* out) {
    const Grid3& g = T.grid;
    const std::size_t N = g.size();
    std::fill(out, out + N, cplx{0, 0});
    for (int a = 0; a < 3; ++a) {
        const double inv_h2 = 1.0 / (g.dx(a) * g.dx(a));
        const int bdim = (a == 0) ? 1 : 0;
        const int cdim = (a == 2) ? 1 : 2;
        const std::size_t S[3] = {std::size_t(g.n[1]) * g.n[2], std::size_t(g.n[2]), 1};
        const bool per = g.periodic[a];
        for (int ib = 0; ib < g.n[bdim]; ++ib)
            for (int ic = 0; ic < g.n[cdim]; ++ic) {
                const std::size_t base = std::size_t(ib) * S[bdim] + std::size_t(ic) * S[cdim];
                const std::size_t st = S[a];
                for (int i = 0; i < g.n[a]; ++i) {
                    const std::size_t q = base + st * std::size_t(i);
                    const cplx u0 = in[q];
                    cplx up, dn;
                    if (per) {
                        up = in[base + st * std::size_t((i + 1) % g.n[a])];
                        dn = in[base + st * std::size_t((i + g.n[a] - 1) % g.n[a])];
                    } else {
                        up = (i + 1 < g.n[a]) ? in[q + st] : cplx{0, 0};
                        dn = (i > 0) ? in[q - st] : cplx{0, 0};
                    }
                    const double gp = T.gface[a][face_index(g, a, ib, ic, i + 1)];
                    const double gm = T.gface[a][face_index(g, a, ib, ic, i)];
                    out[q] += (gp * (up - u0) - gm * (u0 - dn)) * inv_h2;
                }
            }
    }
    parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t p = b; p < e; ++p) out[p] /= T.w[p];
    });
}

Field laplace_beltrami(const GeometryTables& T, const Field& f) {
    if (!f.grid.same_as(T.grid)) throw ShapeError("laplace_beltrami: grid mismatch");
    Field out(f.grid);
    laplace_beltrami_apply(T, f.v.data(), out.v.data());
    return out;
}

void apply_L(const GeometryTables& T, double m, const cplx* in, cplx* out) {
    laplace_beltrami_apply(T, in, out);
    const std::size_t N = T.grid.size();
    parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t p = b; p < e; ++p)
            out[p] = (0.25 * T.curv[p] + m * m) * in[p] - out[p];
    });
}

double weighted_sum(const GeometryTables& T, const std::function<double(std::size_t)>& f) {
    const double dV = T.grid.cell_volume();
    return dV * parallel_reduce(T.grid.size(), [&](std::size_t b, std::size_t e) {
        double s = 0;
        for (std::size_t p = b; p < e; ++p) s += T.w[p] * f(p);
        return s;
    });
}

cplx inner_h(const GeometryTables& T, const cplx* a, const cplx* b) {
    const double dV = T.grid.cell_volume();
    const double re = parallel_reduce(T.grid.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0;
        for (std::size_t p = lo; p < hi; ++p)
            s += T.w[p] * (a[p].real() * b[p].real() + a[p].imag() * b[p].imag());
        return s;
    });
    const double im = parallel_reduce(T.grid.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0;
        for (std::size_t p = lo; p < hi; ++p)
            s += T.w[p] * (a[p].real() * b[p].imag() - a[p].imag() * b[p].real());
        return s;
    });
    return dV * cplx{re, im};
}

double norm_h_sq(const GeometryTables& T, const cplx* a) {
    const double dV = T.grid.cell_volume();
    return dV * parallel_reduce(T.grid.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0;
        for (std::size_t p = lo; p < hi; ++p) s += T.w[p] * std::norm(a[p]);
        return s;
    });
}

bool support_touches_boundary(const Grid3& g, const cplx* u, int margin, double tol) {
    double umax = 0;
    for (std::size_t p = 0; p < g.size(); ++p) umax = std::max(umax, std::abs(u[p]));
    if (umax == 0) return false;
    const double thresh = tol * umax;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const bool e0 = !g.periodic[0] && (i < margin || i >= g.n[0] - margin);
                const bool e1 = !g.periodic[1] && (j < margin || j >= g.n[1] - margin);
                const bool e2 = !g.periodic[2] && (k < margin || k >= g.n[2] - margin);
                if ((e0 || e1 || e2) && std::abs(u[g.idx(i, j, k)]) > thresh) return true;
            }
    return false;
}

}  // namespace diraclab
