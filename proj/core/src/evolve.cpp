#include "diraclab/evolve.hpp"

#include "diraclab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace diraclab {

// ------------------------------------------------------------------ TimeMap --

namespace {

// adaptive Simpson for int_a^b f
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * eps) {
        return left + right + (left + right - whole) / 15;
    }
    return simpson(f, a, m, fa, flm, fm, eps / 2, depth - 1)
         + simpson(f, m, b, fm, frm, fb, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-13) {
    if (a == b) return 0;
    return simpson(f, a, b, f(a), f(0.5 * (a + b)), f(b), eps, 40);
}

}  // namespace

double TimeMap::s_of_t(double t) const {
    auto f = [this](double tau) {
        const double p = phi(tau);
        if (!(p > 0)) throw DomainError("phi must stay positive on the mapped range");
        return 1.0 / p;
    };
    return integrate(f, 0.0, t);
}

double TimeMap::t_of_s(double s) const {
    // monotone: Newton with bisection fallback
    double lo = 0, hi = (s >= 0) ? 1.0 : -1.0;
    while (s_of_t(hi) < s && s >= 0) hi *= 2;
    while (s_of_t(hi) > s && s < 0) hi *= 2;
    if (s < 0) std::swap(lo, hi);
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double val = s_of_t(t) - s;
        if (std::abs(val) < 1e-14 * (1 + std::abs(s))) break;
        if (val > 0)
            hi = t;
        else
            lo = t;
        const double step = val * phi(t);  // ds/dt = 1/phi
        double tn = t - step;
        if (!(tn > std::min(lo, hi) && tn < std::max(lo, hi))) tn = 0.5 * (lo + hi);
        t = tn;
    }
    return t;
}

TimeMap reparameterize_time(const PhiSpec& phi) {
    if (phi.kind == PhiSpec::Kind::Const && !(phi.value > 0))
        throw DomainError("phi must be strictly positive");
    return TimeMap{phi};
}

// ------------------------------------------------------------- WaveLeapfrog --

double wave_max_stable_dt(const GeometryTables& T, double m) {
    // lambda_max <= max_p [ sum_j 4 h^{jj} / dx_j^2 + max(R/4 + m^2, 0) ]
    double lam = 0;
    const Grid3& g = T.grid;
    for (std::size_t p = 0; p < g.size(); ++p) {
        double s = 0;
        for (int a = 0; a < 3; ++a) s += 4 * T.hjj[std::size_t(a)][p] / (g.dx(a) * g.dx(a));
        s += std::max(0.25 * T.curv[p] + m * m, 0.0);
        lam = std::max(lam, s);
    }
    return 2.0 / std::sqrt(lam);
}

WaveLeapfrog::WaveLeapfrog(const GeometryTables& T, double m, PhiSpec phi, const WaveState& init,
                           double dt)
    : T_(&T), m_(m), phi_(phi), dt_(dt), t_(init.t), up_(init.u), uc_(init.u), scratch_(init.u) {
    if (!init.u.grid.same_as(T.grid)) throw ShapeError("WaveLeapfrog: grid mismatch");
    init.u.require_same_grid(init.v);
    dt_max_ = wave_max_stable_dt(T, m) * phi_(init.t);
    if (dt_ > 0.5 * dt_max_ + 1e-15)
        throw StabilityError("dt exceeds half the maximum stable leapfrog step");

    // Taylor start: u(t0 + dt) = u0 + dt v0 + dt^2/2 u_tt,  u_tt = (-L u0 - phi phi' v0)/phi^2
    const std::size_t N = T.grid.size();
    apply_L(T, m_, init.u.v.data(), scratch_.v.data());
    const double p0 = phi_(init.t), p1 = phi_.d1(init.t);
    for (std::size_t q = 0; q < N; ++q) {
        const cplx utt = (-scratch_.v[q] - p0 * p1 * init.v.v[q]) / (p0 * p0);
        uc_.v[q] = init.u.v[q] + dt_ * init.v.v[q] + 0.5 * dt_ * dt_ * utt;
    }
    t_ = init.t + dt_;
    steps_ = 1;
}

void WaveLeapfrog::step() {
    const std::size_t N = T_->grid.size();
    apply_L(*T_, m_, uc_.v.data(), scratch_.v.data());
    const double p = phi_(t_), p1 = phi_.d1(t_);
    const double A = p * p / (dt_ * dt_) + p * p1 / (2 * dt_);
    const double B = 2 * p * p / (dt_ * dt_);
    const double C = -p * p / (dt_ * dt_) + p * p1 / (2 * dt_);
    Field un(T_->grid);
    parallel_for_slabs(N, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t q = b; q < e; ++q)
            un.v[q] = (-scratch_.v[q] + B * uc_.v[q] + C * up_.v[q]) / A;
    });
    up_.v.swap(uc_.v);
    uc_.v.swap(un.v);
    t_ += dt_;
    ++steps_;
}

Field WaveLeapfrog::u_t_at_prev() const {
    // forward-looking centered derivative is owned by the driver; here we
    // expose the one-sided stencil (u^n - u^{n-1})/dt at t - dt/2 shifted:
    Field ut(T_->grid);
    for (std::size_t q = 0; q < ut.v.size(); ++q) ut.v[q] = (uc_.v[q] - up_.v[q]) / dt_;
    return ut;
}

double WaveLeapfrog::leapfrog_energy() const {
    const std::size_t N = T_->grid.size();
    apply_L(*T_, m_, up_.v.data(), scratch_.v.data());
    const double dV = T_->grid.cell_volume();
    const double kin = parallel_reduce(N, [&](std::size_t b, std::size_t e) {
        double s = 0;
        for (std::size_t q = b; q < e; ++q) s += T_->w[q] * std::norm((uc_.v[q] - up_.v[q]) / dt_);
        return s;
    });
    const double pot = parallel_reduce(N, [&](std::size_t b, std::size_t e) {
        double s = 0;
        for (std::size_t q = b; q < e; ++q)
            s += T_->w[q]
               * (scratch_.v[q].real() * uc_.v[q].real() + scratch_.v[q].imag() * uc_.v[q].imag());
        return s;
    });
    return dV * (kin + pot);
}

double WaveLeapfrog::physical_energy() const {
    Field ut = u_t_at_prev();  // midpoint derivative; O(dt) shift is fine for reporting
    return wave_energy(*T_, m_, uc_, ut, phi_(t_ - 0.5 * dt_));
}

bool WaveLeapfrog::boundary_contaminated(int margin) const {
    return support_touches_boundary(T_->grid, uc_.v.data(), margin);
}

double wave_energy(const GeometryTables& T, double m, const Field& u, const Field& ut,
                   double phi_at_t) {
    Field Lu(T.grid);
    apply_L(T, m, u.v.data(), Lu.v.data());
    const double a = norm_h_sq(T, ut.v.data()) * phi_at_t * phi_at_t;
    const cplx b = inner_h(T, u.v.data(), Lu.v.data());
    return a + b.real();
}

// ------------------------------------------------------------ radial tables --

RadialTables build_radial_tables(const MetricSpec& spec, const RadialGrid& grid) {
    if (!spec.is_warped() || !spec.beta.is_sphere())
        throw UnsupportedMetric("radial tables require a warped product with a sphere section");
    if ((spec.d_kind == DKind::Flat || spec.d_kind == DKind::SubFlat) && !(grid.r_lo > 0))
        throw DomainError("radial grid must satisfy r_lo > 0 for Flat/SubFlat");
    RadialTables T;
    T.spec = spec;
    T.grid = grid;
    const int n = grid.n;
    T.W.resize(std::size_t(n));
    T.Wface.resize(std::size_t(n) + 1);
    T.pot.resize(std::size_t(n));
    T.inv_d.resize(std::size_t(n));
    const double rb = spec.beta.r_beta();
    for (int i = 0; i < n; ++i) {
        const double r = grid.r(i);
        T.W[std::size_t(i)] = spec.d(r);
        T.inv_d[std::size_t(i)] = 1.0 / spec.d(r);
        T.pot[std::size_t(i)] = 0.25 * warped_curvature(spec.d_kind, spec.n, rb, r);
    }
    for (int i = 0; i <= n; ++i) {
        double rf = grid.r_lo + (i - 0.5) * grid.dr();
        if (spec.d_kind != DKind::Hyperbolic) rf = std::max(rf, 0.5 * grid.r_lo);
        T.Wface[std::size_t(i)] = spec.d(rf);
    }
    return T;
}

void apply_L_mode(const RadialTables& T, double m, double lambda, const cplx* in, cplx* out) {
    const int n = T.grid.n;
    const double ih2 = 1.0 / (T.grid.dr() * T.grid.dr());
    for (int i = 0; i < n; ++i) {
        const cplx u0 = in[i];
        const cplx up = (i + 1 < n) ? in[i + 1] : cplx{0, 0};
        const cplx dn = (i > 0) ? in[i - 1] : cplx{0, 0};
        const cplx lap = (T.Wface[std::size_t(i) + 1] * (up - u0) - T.Wface[std::size_t(i)] * (u0 - dn))
                       * ih2 / T.W[std::size_t(i)];
        out[i] = -lap + (lambda * T.inv_d[std::size_t(i)] + T.pot[std::size_t(i)] + m * m) * u0;
    }
}

double radial_norm_sq(const RadialTables& T, const cplx* u) {
    double s = 0;
    for (int i = 0; i < T.grid.n; ++i) s += T.W[std::size_t(i)] * std::norm(u[i]);
    return s * T.grid.dr();
}

double mode_max_stable_dt(const RadialTables& T, double m, double lambda_max) {
    double lam = 0;
    const double ih2 = 1.0 / (T.grid.dr() * T.grid.dr());
    for (int i = 0; i < T.grid.n; ++i) {
        double s = 4 * ih2;  // d is smooth; face/center ratios stay near 1
        s *= std::max(T.Wface[std::size_t(i)], T.Wface[std::size_t(i) + 1]) / T.W[std::size_t(i)];
        s += lambda_max * T.inv_d[std::size_t(i)] + std::max(T.pot[std::size_t(i)] + m * m, 0.0);
        lam = std::max(lam, s);
    }
    return 2.0 / std::sqrt(lam);
}

// --------------------------------------------------------- ModeWaveLeapfrog --

ModeWaveLeapfrog::ModeWaveLeapfrog(const RadialTables& T, double m, PhiSpec phi,
                                   const ModeState& init, double dt)
    : T_(&T), m_(m), phi_(phi), dt_(dt), t_(init.t), up_(init.u), uc_(init.u) {
    double lam_max = 0;
    for (const auto& md : init.u.modes) lam_max = std::max(lam_max, md.lambda);
    const double dt_max = mode_max_stable_dt(T, m, lam_max) * phi_(init.t);
    if (dt_ > 0.5 * dt_max + 1e-15)
        throw StabilityError("dt exceeds half the maximum stable leapfrog step");
    scratch_.resize(std::size_t(T.grid.n));
    const double p0 = phi_(init.t), p1 = phi_.d1(init.t);
    for (std::size_t k = 0; k < init.u.modes.size(); ++k) {
        const auto& u0 = init.u.modes[k].u.v;
        const auto& v0 = init.v.modes[k].u.v;
        apply_L_mode(T, m_, init.u.modes[k].lambda, u0.data(), scratch_.data());
        auto& u1 = uc_.modes[k].u.v;
        for (int i = 0; i < T.grid.n; ++i) {
            const cplx utt = (-scratch_[std::size_t(i)] - p0 * p1 * v0[std::size_t(i)]) / (p0 * p0);
            u1[std::size_t(i)] = u0[std::size_t(i)] + dt_ * v0[std::size_t(i)] + 0.5 * dt_ * dt_ * utt;
        }
    }
    t_ = init.t + dt_;
    steps_ = 1;
}

void ModeWaveLeapfrog::step() {
    const double p = phi_(t_), p1 = phi_.d1(t_);
    const double A = p * p / (dt_ * dt_) + p * p1 / (2 * dt_);
    const double B = 2 * p * p / (dt_ * dt_);
    const double C = -p * p / (dt_ * dt_) + p * p1 / (2 * dt_);
    for (std::size_t k = 0; k < uc_.modes.size(); ++k) {
        apply_L_mode(*T_, m_, uc_.modes[k].lambda, uc_.modes[k].u.v.data(), scratch_.data());
        auto& up = up_.modes[k].u.v;
        auto& uc = uc_.modes[k].u.v;
        for (int i = 0; i < T_->grid.n; ++i) {
            const cplx un = (-scratch_[std::size_t(i)] + B * uc[std::size_t(i)] + C * up[std::size_t(i)]) / A;
            up[std::size_t(i)] = uc[std::size_t(i)];
            uc[std::size_t(i)] = un;
        }
    }
    t_ += dt_;
    ++steps_;
}

ModeSet ModeWaveLeapfrog::u_t_at_prev() const {
    ModeSet out = uc_;
    for (std::size_t k = 0; k < out.modes.size(); ++k)
        for (int i = 0; i < T_->grid.n; ++i)
            out.modes[k].u.v[std::size_t(i)] =
                (uc_.modes[k].u.v[std::size_t(i)] - up_.modes[k].u.v[std::size_t(i)]) / dt_;
    return out;
}

double ModeWaveLeapfrog::leapfrog_energy() const {
    double total = 0;
    for (std::size_t k = 0; k < uc_.modes.size(); ++k) {
        const auto& up = up_.modes[k].u.v;
        const auto& uc = uc_.modes[k].u.v;
        apply_L_mode(*T_, m_, uc_.modes[k].lambda, up.data(), scratch_.data());
        double kin = 0, pot = 0;
        for (int i = 0; i < T_->grid.n; ++i) {
            kin += T_->W[std::size_t(i)] * std::norm((uc[std::size_t(i)] - up[std::size_t(i)]) / dt_);
            pot += T_->W[std::size_t(i)]
                 * (scratch_[std::size_t(i)].real() * uc[std::size_t(i)].real()
                    + scratch_[std::size_t(i)].imag() * uc[std::size_t(i)].imag());
        }
        total += (kin + pot) * T_->grid.dr();
    }
    return total;
}

double ModeWaveLeapfrog::physical_energy() const {
    double total = 0;
    const double p = phi_(t_ - 0.5 * dt_);
    for (std::size_t k = 0; k < uc_.modes.size(); ++k) {
        const auto& up = up_.modes[k].u.v;
        const auto& uc = uc_.modes[k].u.v;
        apply_L_mode(*T_, m_, uc_.modes[k].lambda, uc.data(), scratch_.data());
        double kin = 0, pot = 0;
        for (int i = 0; i < T_->grid.n; ++i) {
            kin += T_->W[std::size_t(i)] * std::norm((uc[std::size_t(i)] - up[std::size_t(i)]) / dt_) * p * p;
            pot += T_->W[std::size_t(i)]
                 * (scratch_[std::size_t(i)].real() * uc[std::size_t(i)].real()
                    + scratch_[std::size_t(i)].imag() * uc[std::size_t(i)].imag());
        }
        total += (kin + pot) * T_->grid.dr();
    }
    return total;
}

// ------------------------------------- spherical quadrature and harmonics --

CrossSectionQuad cross_section_quad(double a, int n_theta, int n_phi) {
    if (!(a > 0) || n_theta < 2 || n_phi < 4) throw ParameterError("bad cross-section quadrature");
    CrossSectionQuad q;
    q.a = a;
    q.n_theta = n_theta;
    q.n_phi = n_phi;
    q.theta.resize(std::size_t(n_theta));
    q.wtheta.resize(std::size_t(n_theta));
    // Gauss-Legendre nodes on [-1, 1] by Newton on P_n
    for (int i = 0; i < n_theta; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n_theta + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < n_theta; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            pp = n_theta * (x * p0 - p1) / (x * x - 1);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.theta[std::size_t(n_theta - 1 - i)] = std::acos(x);
        q.wtheta[std::size_t(n_theta - 1 - i)] = 2.0 / ((1 - x * x) * pp * pp);
    }
    q.phi.resize(std::size_t(n_phi));
    for (int i = 0; i < n_phi; ++i) q.phi[std::size_t(i)] = 2 * M_PI * i / n_phi;
    q.wphi = 2 * M_PI / n_phi;
    return q;
}

namespace {

// normalized associated Legendre Pbar_l^m(x), orthonormal with the 1/sqrt(2pi)
// azimuthal factor folded into real_sph_harm
double pbar(int l, int m, double x) {
    double pmm = std::sqrt(1.0 / (4 * M_PI));
    const double sx = std::sqrt(std::max(0.0, 1 - x * x));
    for (int k = 1; k <= m; ++k)
        pmm *= -std::sqrt((2.0 * k + 1) / (2.0 * k)) * sx;
    if (l == m) return pmm;
    double pm1 = x * std::sqrt(2.0 * m + 3) * pmm;
    if (l == m + 1) return pm1;
    for (int ll = m + 2; ll <= l; ++ll) {
        const double a = std::sqrt((4.0 * ll * ll - 1) / (double(ll) * ll - double(m) * m));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - double(m) * m) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1));
        const double p = a * (x * pm1 - b * pmm);
        pmm = pm1;
        pm1 = p;
    }
    return pm1;
}

}  // namespace

double real_sph_harm(int ell, int m, double theta, double phi, double a) {
    const double x = std::cos(theta);
    const int am = std::abs(m);
    if (am > ell) throw ParameterError("real_sph_harm: |m| > ell");
    double val = pbar(ell, am, x);
    if (m > 0)
        val *= std::sqrt(2.0) * std::cos(m * phi);
    else if (m < 0)
        val *= std::sqrt(2.0) * std::sin(am * phi);
    return val / a;  // orthonormal w.r.t. a^2 dmu dphi
}

ModeSet mode_decompose(const MetricSpec& spec, const QuadField& f, int ell_max) {
    if (!spec.is_warped() || !spec.beta.is_sphere())
        throw UnsupportedMetric("mode_decompose requires a RoundSphere cross-section");
    const auto& q = f.quad;
    ModeSet ms;
    ms.spec = spec;
    ms.grid = f.rgrid;
    const double a = spec.beta.radius;
    for (int ell = 0; ell <= ell_max; ++ell)
        for (int m = -ell; m <= ell; ++m) {
            Mode md;
            md.ell = ell;
            md.msub = m;
            md.lambda = double(ell) * (ell + 1) / (a * a);
            md.u = RadialField(f.rgrid);
            ms.modes.push_back(std::move(md));
        }
    // coefficients: u_lm(r) = int f conj(Y) a^2 dmu dphi
    std::vector<double> Y(std::size_t(q.n_theta) * q.n_phi);
    for (auto& md : ms.modes) {
        for (int it = 0; it < q.n_theta; ++it)
            for (int ip = 0; ip < q.n_phi; ++ip)
                Y[std::size_t(it) * q.n_phi + ip] =
                    real_sph_harm(md.ell, md.msub, q.theta[std::size_t(it)], q.phi[std::size_t(ip)], a);
        for (int ir = 0; ir < f.rgrid.n; ++ir) {
            cplx s = 0;
            for (int it = 0; it < q.n_theta; ++it)
                for (int ip = 0; ip < q.n_phi; ++ip)
                    s += f.v[f.idx(ir, it, ip)] * Y[std::size_t(it) * q.n_phi + ip]
                       * q.wtheta[std::size_t(it)];
            md.u.v[std::size_t(ir)] = s * q.wphi * a * a;
        }
    }
    return ms;
}

QuadField mode_synthesize_quad(const ModeSet& ms, const CrossSectionQuad& q) {
    QuadField f(ms.grid, q);
    const double a = ms.spec.beta.radius;
    for (const auto& md : ms.modes)
        for (int it = 0; it < q.n_theta; ++it)
            for (int ip = 0; ip < q.n_phi; ++ip) {
                const double Y =
                    real_sph_harm(md.ell, md.msub, q.theta[std::size_t(it)], q.phi[std::size_t(ip)], a);
                for (int ir = 0; ir < ms.grid.n; ++ir)
                    f.v[f.idx(ir, it, ip)] += md.u.v[std::size_t(ir)] * Y;
            }
    return f;
}

Field mode_synthesize(const ModeSet& ms, const Grid3& grid) {
    if (grid.chart != Chart::Product) throw ShapeError("mode_synthesize needs a product grid");
    if (grid.n[0] != ms.grid.n || std::abs(grid.lo[0] - ms.grid.r_lo) > 1e-12
        || std::abs(grid.hi[0] - ms.grid.r_hi) > 1e-12)
        throw ShapeError("mode_synthesize: radial axes differ");
    Field f(grid);
    const double a = ms.spec.beta.radius;
    for (const auto& md : ms.modes)
        for (int j = 0; j < grid.n[1]; ++j)
            for (int k = 0; k < grid.n[2]; ++k) {
                const double Y = real_sph_harm(md.ell, md.msub, grid.coord(1, j), grid.coord(2, k), a);
                for (int i = 0; i < grid.n[0]; ++i)
                    f.at(i, j, k) += md.u.v[std::size_t(i)] * Y;
            }
    return f;
}

// -------------------------------------------------------- DiracCrankNicolson --

DiracCrankNicolson::DiracCrankNicolson(const GeometryTables& T, double m, PhiSpec phi,
                                       SpinorField u0, double dt, double cg_tol, int cg_maxit)
    : T_(&T), m_(m), phi_(phi), dt_(dt), tol_(cg_tol), maxit_(cg_maxit), u_(std::move(u0)),
      uprev_(u_), uprev2_(u_) {
    if (!u_.grid.same_as(T.grid)) throw ShapeError("DiracCrankNicolson: grid mismatch");
}

void DiracCrankNicolson::step() {
    const double a = dt_ / (2 * phi_(t_ + 0.5 * dt_));
    const std::size_t n = u_.v.size();
    const cplx ia{0, a};

    // rhs = (I - i a H)^2 u = u - 2 i a H u - a^2 H^2 u
    SpinorField Hu = apply_H(*T_, m_, u_);
    SpinorField HHu = apply_H(*T_, m_, Hu);
    SpinorField b(T_->grid);
    for (std::size_t q = 0; q < n; ++q)
        b.v[q] = u_.v[q] - 2.0 * ia * Hu.v[q] - a * a * HHu.v[q];

    auto apply_A = [&](const SpinorField& x) {
        SpinorField hx = apply_H(*T_, m_, x);
        SpinorField hhx = apply_H(*T_, m_, hx);
        for (std::size_t q = 0; q < n; ++q) hhx.v[q] = x.v[q] + a * a * hhx.v[q];
        return hhx;
    };

    // CG on (I + a^2 H^2) x = b in the h inner product
    SpinorField x = b;
    SpinorField r(T_->grid), p(T_->grid);
    {
        SpinorField Ax = apply_A(x);
        for (std::size_t q = 0; q < n; ++q) r.v[q] = b.v[q] - Ax.v[q];
    }
    p = r;
    double rs = norm_h_sq(*T_, r);
    const double bs = norm_h_sq(*T_, b);
    int it = 0;
    for (; it < maxit_ && rs > tol_ * tol_ * bs; ++it) {
        SpinorField Ap = apply_A(p);
        const double pAp = inner_h(*T_, p, Ap).real();
        const double alpha = rs / pAp;
        for (std::size_t q = 0; q < n; ++q) {
            x.v[q] += alpha * p.v[q];
            r.v[q] -= alpha * Ap.v[q];
        }
        const double rs2 = norm_h_sq(*T_, r);
        const double beta = rs2 / rs;
        rs = rs2;
        for (std::size_t q = 0; q < n; ++q) p.v[q] = r.v[q] + beta * p.v[q];
    }
    last_iters_ = it;

    uprev2_.v.swap(uprev_.v);
    uprev_.v.swap(u_.v);
    u_.v.swap(x.v);
    t_ += dt_;
    ++steps_;
}

// -------------------------------------------------------------- initial data --

namespace {
double u01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }
double usym(std::mt19937_64& g) { return 2 * u01(g) - 1; }
}  // namespace

Field random_bumps(const Grid3& g, std::uint64_t seed, int nbumps, double width,
                   double placement_radius, double kmax) {
    std::mt19937_64 rng(seed);
    struct Bump {
        Point3 c;
        Point3 k;
        cplx amp;
        double w;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < nbumps; ++b) {
        Bump bp;
        for (int a = 0; a < 3; ++a) bp.c[a] = usym(rng) * placement_radius;
        for (int a = 0; a < 3; ++a) bp.k[a] = usym(rng) * kmax;
        bp.amp = cplx{usym(rng), usym(rng)};
        bp.w = width * (0.7 + 0.6 * u01(rng));
        bumps.push_back(bp);
    }
    Field f(g);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const Point3 x = g.point(i, j, k);
                cplx s = 0;
                for (const auto& bp : bumps) {
                    const double r2 = (x[0] - bp.c[0]) * (x[0] - bp.c[0])
                                    + (x[1] - bp.c[1]) * (x[1] - bp.c[1])
                                    + (x[2] - bp.c[2]) * (x[2] - bp.c[2]);
                    s += bp.amp * std::exp(-r2 / (2 * bp.w * bp.w))
                       * std::exp(cplx{0, bp.k[0] * x[0] + bp.k[1] * x[1] + bp.k[2] * x[2]});
                }
                f.at(i, j, k) = s;
            }
    return f;
}

ModeState random_mode_state(const MetricSpec& spec, const RadialGrid& rg, std::uint64_t seed,
                            int nmodes, int ell_min, int ell_max, double center, double width) {
    std::mt19937_64 rng(seed);
    const double a = spec.beta.radius;
    ModeState st;
    st.t = 0;
    st.u.spec = spec;
    st.u.grid = rg;
    st.v = st.u;
    for (int k = 0; k < nmodes; ++k) {
        const int ell = ell_min + int(u01(rng) * (ell_max - ell_min + 1));
        const int m = -ell + int(u01(rng) * (2 * ell + 1));
        Mode mu, mv;
        mu.ell = mv.ell = ell;
        mu.msub = mv.msub = m;
        mu.lambda = mv.lambda = double(ell) * (ell + 1) / (a * a);
        mu.u = RadialField(rg);
        mv.u = RadialField(rg);
        const double c = center * (0.8 + 0.4 * u01(rng));
        const double w = width * (0.7 + 0.6 * u01(rng));
        const cplx amp{usym(rng), usym(rng)};
        const cplx vamp{usym(rng), usym(rng)};
        const double kr = 2.0 * usym(rng);
        for (int i = 0; i < rg.n; ++i) {
            const double r = rg.r(i);
            const double e = std::exp(-(r - c) * (r - c) / (2 * w * w));
            mu.u.v[std::size_t(i)] = amp * e * std::exp(cplx{0, kr * r});
            mv.u.v[std::size_t(i)] = 0.5 * vamp * e;
        }
        st.u.modes.push_back(std::move(mu));
        st.v.modes.push_back(std::move(mv));
    }
    return st;
}

}  // namespace diraclab
