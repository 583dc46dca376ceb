#pragma once

#include "diraclab/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace diraclab {

// ----------------------------------------------------------------------------
// metric families
//
// AsymptoticallyFlat: h^{jk} = (1 + eps <x>^{-sigma}) delta_{jk} on R^3
//                     (Cartesian chart; eps = 0 is the flat metric).
// WarpedProduct:      h = diag(1, d(r) b22(th), d(r) b33(th)) in the product
//                     chart x = (r, th, ph); the cross-section is a round
//                     sphere of radius a (b22 = a^2, b33 = a^2 sin^2 th) or a
//                     Custom section carrying only a curvature bound.
// ----------------------------------------------------------------------------

enum class DKind { Hyperbolic, Flat, SubFlat };

struct BetaSpec {
    enum class Model { RoundSphere, Custom };
    Model model = Model::RoundSphere;
    double radius = 1.0;      // RoundSphere: a > 0
    double r_beta_min = 0.0;  // Custom: lower bound on the scalar curvature of beta

    static BetaSpec sphere(double a);
    static BetaSpec custom(double r_beta_min);

    bool is_sphere() const { return model == Model::RoundSphere; }
    /// scalar curvature of the cross-section (RoundSphere: exactly 2/a^2)
    double r_beta() const;
};

/// Time weight phi(t) > 0.  "const:<v>" or the literal "1+t^2".
struct PhiSpec {
    enum class Kind { Const, OnePlusT2 };
    Kind kind = Kind::Const;
    double value = 1.0;

    double operator()(double t) const {
        return kind == Kind::Const ? value : 1.0 + t * t;
    }
    double d1(double t) const { return kind == Kind::Const ? 0.0 : 2.0 * t; }
    bool is_one() const { return kind == Kind::Const && value == 1.0; }
    std::string to_string() const;
    static PhiSpec parse(const std::string& s);
};

struct MetricSpec {
    enum class Kind { AsymptoticallyFlat, WarpedProduct };
    Kind kind = Kind::AsymptoticallyFlat;

    // AsymptoticallyFlat
    double epsilon = 0.0;
    double sigma = 1.0;  // decay exponent, in (0, 1]

    // WarpedProduct
    DKind d_kind = DKind::Flat;
    double n = 1.0;  // SubFlat exponent, in (2 - sqrt 2, 4/3]
    BetaSpec beta;

    PhiSpec phi;

    static MetricSpec asymptotically_flat(double eps, double sig = 1.0);
    static MetricSpec warped(DKind dk, BetaSpec b, double n_exp = 1.0);
    static MetricSpec flat() { return asymptotically_flat(0.0); }

    bool is_asymflat() const { return kind == Kind::AsymptoticallyFlat; }
    bool is_warped() const { return kind == Kind::WarpedProduct; }
    bool is_exactly_flat() const { return is_asymflat() && epsilon == 0.0; }

    /// throws ParameterError on invalid parameter combinations
    void validate() const;

    /// warp factor d(r) and derivatives
    double d(double r) const;
    double d1(double r) const;
    double d2(double r) const;
    double d3(double r) const;

    /// conformal factor c(x) = 1 + eps <x>^{-sigma} and radial derivatives
    double conf(double r) const;
    double conf1(double r) const;
    double conf2(double r) const;
    double conf3(double r) const;

    /// checks chart-domain membership (warped Flat/SubFlat need r > 0, the
    /// sphere chart needs th in (0, pi)); throws DomainError otherwise
    void check_domain(const Point3& x) const;
};

// ----------------------------------------------------------------------------
// pointwise evaluation
// ----------------------------------------------------------------------------

struct MetricPoint {
    SymMatrix3 h;
    SymMatrix3 h_inv;
    double sqrt_det = 1.0;
};

/// metric value + first and second coordinate derivatives of h and h_inv
struct MetricJet {
    SymMatrix3 h, h_inv;
    double sqrt_det = 1.0;
    std::array<double, 27> dh{};       // [l][i][j] = d_l h_ij
    std::array<double, 27> dh_inv{};   // [l][i][j] = d_l h^{ij}
    std::array<double, 81> d2h{};      // [l][m][i][j] = d_l d_m h_ij

    double dH(int l, int i, int j) const { return dh[size_t(9 * l + 3 * i + j)]; }
    double dHinv(int l, int i, int j) const { return dh_inv[size_t(9 * l + 3 * i + j)]; }
    double d2H(int l, int m, int i, int j) const {
        return d2h[size_t(27 * l + 9 * m + 3 * i + j)];
    }
    double& dH(int l, int i, int j) { return dh[size_t(9 * l + 3 * i + j)]; }
    double& dHinv(int l, int i, int j) { return dh_inv[size_t(9 * l + 3 * i + j)]; }
    double& d2H(int l, int m, int i, int j) {
        return d2h[size_t(27 * l + 9 * m + 3 * i + j)];
    }
};

MetricPoint metric_at(const MetricSpec& spec, const Point3& x);
MetricJet metric_jet(const MetricSpec& spec, const Point3& x);

Connection3 christoffel(const MetricSpec& spec, const Point3& x);

/// scalar curvature via the general Christoffel formula
///   R = h^{jk} ( d_i Gam^i_jk - d_k Gam^i_ji + Gam^i_il Gam^l_jk - Gam^i_kl Gam^l_ji )
double scalar_curvature(const MetricSpec& spec, const Point3& x);

/// warped-product closed form  R_h = -2 d''/d + (1/2)(d'/d)^2 + R_beta / d
double warped_curvature(DKind dk, double n, double r_beta, double r);

/// radial closed forms for the conformal family (used by the multiplier module
/// and the virial curvature term); exact limits at r = 0
double conformal_curvature_radial(const MetricSpec& spec, double r);
double conformal_curvature_radial_d1(const MetricSpec& spec, double r);

/// d R_h / dr for warped products
double warped_curvature_d1(DKind dk, double n, double r_beta, double r);

/// Laplace-Beltrami of a radial function on the asymptotically flat family,
/// evaluated through the radial closed form
///   Lap_h psi = hhat psi'' + (hbar - hhat)/r psi' + (1/sqrt det h) d_j(htil^{jk}) xhat_k psi'
double lappsi_radial(const MetricSpec& spec, double r, double psi1, double psi2);

// ----------------------------------------------------------------------------
// assumption profile (asymptotically flat family only)
// ----------------------------------------------------------------------------

struct AssumptionProfile {
    double nu = 1.0;             // paper-coupled lower ellipticity bound, nu = 1 - C_I
    double N = 1.0;              // upper ellipticity bound
    double nu_empirical = 1.0;   // tightest sampled Rayleigh-quotient bracket
    double N_empirical = 1.0;
    double C_I = 0.0;            // flatness amplitude, sup <x>^sigma |h_inv - I|
    double C_h = 0.0;            // derivative bound, sup <x>^{1+sigma} (|h'| + |x||h''| + |x|^2|h'''|)
    double sigma = 1.0;
    double C_sigma = 0.0;        // |R_h| <= C_sigma / (<x>^{1+sigma'} |x|)
    double sigma_prime = 0.5;
    double C_nabla = 0.0;        // bound on <x>^{1+alpha} grad(sqrt det h), grad(sqrt det h h^{jk})
    double alpha = 0.5;          // measured exponent alpha(sigma)
};

struct SampleBox {
    Point3 lo{-8, -8, -8};
    Point3 hi{8, 8, 8};
};

/// empirically tightest (nu, N, C_I, C_h) over the sample set plus the
/// analytic values for the model family; C_sigma / C_nabla carry a 1.1x
/// safety factor on the sampled suprema
AssumptionProfile assumption_check(const MetricSpec& spec, const SampleBox& box, int resolution);

}  // namespace diraclab
