#pragma once

#include "diraclab/operators.hpp"
#include "diraclab/spin.hpp"

#include <functional>

namespace diraclab {

// ----------------------------------------------------------------------------
// time reparameterization: s(t) = int_0^t dtau / phi(tau), so that
// phi d_t = d_s and the evolved equation in s has unit time weight
// ----------------------------------------------------------------------------
struct TimeMap {
    PhiSpec phi;
    double s_of_t(double t) const;
    double t_of_s(double s) const;
};

TimeMap reparameterize_time(const PhiSpec& phi);

// ----------------------------------------------------------------------------
// scalar wave backend:  -(phi d_t)^2 u + Lap_h u - (R_h/4) u - m^2 u = 0,
// leapfrog in t, exactly self-adjoint spatial operator
// ----------------------------------------------------------------------------
struct WaveState {
    Field u;
    Field v;  // d_t u
    double t = 0;
};

class WaveLeapfrog {
public:
    /// dt must satisfy dt <= cfl_limit * max_stable_dt with cfl_limit <= 0.5
    WaveLeapfrog(const GeometryTables& T, double m, PhiSpec phi, const WaveState& init,
                 double dt);

    double max_stable_dt() const { return dt_max_; }
    double dt() const { return dt_; }
    double t() const { return t_; }
    int steps_taken() const { return steps_; }

    /// advance one step
    void step();

    const Field& u_prev() const { return up_; }
    const Field& u_cur() const { return uc_; }
    /// centered time derivative at the PREVIOUS time level (t - dt)
    /// (available after at least one step)
    Field u_t_at_prev() const;

    /// exactly conserved discrete invariant of the phi = 1 leapfrog:
    ///   E^{n+1/2} = ||(u^{n+1} - u^n)/dt||_h^2 + Re<L u^n, u^{n+1}>_h
    double leapfrog_energy() const;

    /// physical energy ||phi u_t||^2 + Re<u, L u> with centered u_t
    double physical_energy() const;

    bool boundary_contaminated(int margin = 5) const;

    const GeometryTables& tables() const { return *T_; }
    double mass() const { return m_; }

private:
    const GeometryTables* T_;
    double m_;
    PhiSpec phi_;
    double dt_, dt_max_, t_;
    int steps_ = 0;
    Field up_, uc_;  // u at t - dt and t
    mutable Field scratch_;
};

double wave_max_stable_dt(const GeometryTables& T, double m);

/// energy functional on explicit state fields
double wave_energy(const GeometryTables& T, double m, const Field& u, const Field& ut,
                   double phi_at_t);

// ----------------------------------------------------------------------------
// radial-mode backend for warped products (RoundSphere cross-sections)
// ----------------------------------------------------------------------------
struct Mode {
    int ell = 0;
    int msub = 0;        // azimuthal index of the real harmonic, in [-ell, ell]
    double lambda = 0;   // cross-section eigenvalue, ell(ell+1)/a^2
    RadialField u;
};

struct ModeSet {
    MetricSpec spec;
    RadialGrid grid;
    std::vector<Mode> modes;
};

struct RadialTables {
    MetricSpec spec;
    RadialGrid grid;
    std::vector<double> W;       // d(r) at nodes  (mode-wise volume weight)
    std::vector<double> Wface;   // d(r) at i+1/2 faces, size n+1
    std::vector<double> pot;     // R_h/4 at nodes
    std::vector<double> inv_d;   // 1/d(r)
};

RadialTables build_radial_tables(const MetricSpec& spec, const RadialGrid& grid);

/// mode-wise operator  L_ell u = -(1/d)(d u')' + (lambda/d) u + (R_h/4 + m^2) u
void apply_L_mode(const RadialTables& T, double m, double lambda, const cplx* in, cplx* out);

double radial_norm_sq(const RadialTables& T, const cplx* u);
double mode_max_stable_dt(const RadialTables& T, double m, double lambda_max);

struct ModeState {
    ModeSet u;
    ModeSet v;  // d_t u, same mode layout
    double t = 0;
};

class ModeWaveLeapfrog {
public:
    ModeWaveLeapfrog(const RadialTables& T, double m, PhiSpec phi, const ModeState& init,
                     double dt);
    void step();
    double t() const { return t_; }
    double dt() const { return dt_; }
    const ModeSet& u_prev() const { return up_; }
    const ModeSet& u_cur() const { return uc_; }
    ModeSet u_t_at_prev() const;
    double leapfrog_energy() const;
    double physical_energy() const;
    const RadialTables& tables() const { return *T_; }
    double mass() const { return m_; }

private:
    const RadialTables* T_;
    double m_;
    PhiSpec phi_;
    double dt_, t_;
    int steps_ = 0;
    ModeSet up_, uc_;
    mutable std::vector<cplx> scratch_;
};

// ----------------------------------------------------------------------------
// spherical-harmonic transform on the RoundSphere cross-section
// (Gauss-Legendre in cos th x uniform ph; exact for band-limited data)
// ----------------------------------------------------------------------------
struct CrossSectionQuad {
    int n_theta = 0, n_phi = 0;
    double a = 1.0;                  // sphere radius
    std::vector<double> theta;       // GL nodes mapped to theta
    std::vector<double> wtheta;      // GL weights (d mu)
    std::vector<double> phi;         // uniform nodes
    double wphi = 0;                 // 2 pi / n_phi
};

CrossSectionQuad cross_section_quad(double a, int n_theta, int n_phi);

/// real orthonormal spherical harmonic on the radius-a sphere
double real_sph_harm(int ell, int m, double theta, double phi, double a);

/// field sampled on (radial nodes) x (cross-section quadrature nodes);
/// the representation on which the spherical transform is quadrature-exact
struct QuadField {
    RadialGrid rgrid;
    CrossSectionQuad quad;
    std::vector<cplx> v;  // idx = (ir * n_theta + it) * n_phi + ip

    QuadField() = default;
    QuadField(const RadialGrid& rg, const CrossSectionQuad& q)
        : rgrid(rg), quad(q), v(std::size_t(rg.n) * q.n_theta * q.n_phi, cplx{0, 0}) {}
    std::size_t idx(int ir, int it, int ip) const {
        return (std::size_t(ir) * quad.n_theta + it) * std::size_t(quad.n_phi) + ip;
    }
};

/// decompose onto real spherical harmonics up to ell_max (RoundSphere only)
ModeSet mode_decompose(const MetricSpec& spec, const QuadField& f, int ell_max);
QuadField mode_synthesize_quad(const ModeSet& ms, const CrossSectionQuad& q);

/// evaluate the mode sum on an arbitrary Product-chart grid sharing the radial
/// axis (used to compare mode-wise and 3D discretizations)
Field mode_synthesize(const ModeSet& ms, const Grid3& grid);

// ----------------------------------------------------------------------------
// Dirac backend: i phi d_t u = H u, Crank-Nicolson one-step map
//   u^{n+1} = (I + i a H)^{-1} (I - i a H) u^n,  a = dt / (2 phi(t_mid)),
// realized through the SPD solve (I + a^2 H^2) w = (I - i a H)^2 u^n by CG in
// <.,.>_h: exactly unitary up to the solver tolerance
// ----------------------------------------------------------------------------
class DiracCrankNicolson {
public:
    DiracCrankNicolson(const GeometryTables& T, double m, PhiSpec phi, SpinorField u0,
                       double dt, double cg_tol = 1e-12, int cg_maxit = 400);
    void step();
    double t() const { return t_; }
    const SpinorField& u() const { return u_; }
    const SpinorField& u_prev() const { return uprev_; }
    const SpinorField& u_prev2() const { return uprev2_; }
    int steps_taken() const { return steps_; }
    int last_cg_iters() const { return last_iters_; }
    double dt() const { return dt_; }

private:
    const GeometryTables* T_;
    double m_;
    PhiSpec phi_;
    double dt_, t_ = 0;
    double tol_;
    int maxit_;
    int steps_ = 0;
    int last_iters_ = 0;
    SpinorField u_, uprev_, uprev2_;
};

// ----------------------------------------------------------------------------
// seeded initial data
// ----------------------------------------------------------------------------

/// superposition of `nbumps` randomly placed complex Gaussian bumps
Field random_bumps(const Grid3& g, std::uint64_t seed, int nbumps, double width,
                   double placement_radius, double kmax);

/// per-mode radial bumps for warped runs; ell drawn from [ell_min, ell_max]
ModeState random_mode_state(const MetricSpec& spec, const RadialGrid& rg, std::uint64_t seed,
                            int nmodes, int ell_min, int ell_max, double center, double width);

}  // namespace diraclab
