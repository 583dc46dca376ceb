#pragma once

#include "diraclab/geometry.hpp"

namespace diraclab {

enum class MultiplierFamily { FlatVirial, HyperbolicWP, SubFlatWP };

/// Radial multiplier psi_R with a C^2 ladder and a surface-delta part at r = R.
struct MultiplierProfile {
    MultiplierFamily family = MultiplierFamily::FlatVirial;
    double R = 1.0;
    double n = 1.0;  // SubFlatWP exponent

    static MultiplierProfile flat_virial(double R);
    static MultiplierProfile hyperbolic_wp(double R);
    static MultiplierProfile subflat_wp(double n, double R);

    /// "flat-virial" | "hyperbolic-wp" | "subflat-wp:n=<value>"
    static MultiplierProfile parse(const std::string& s, double R);
    std::string name() const;

    /// multiplier/metric compatibility (FlatVirial <-> AsymptoticallyFlat or
    /// flat-type warped; HyperbolicWP <-> Hyperbolic; SubFlatWP <-> SubFlat)
    bool compatible_with(const MetricSpec& spec) const;
};

struct PsiValues {
    double psi = 0, psi1 = 0, psi2 = 0, psi3 = 0;  // value and first three derivatives
};

PsiValues psi_eval(const MultiplierProfile& p, double r);

/// regular part of the fourth derivative (the delta at r = R is carried separately)
double psi4_regular(const MultiplierProfile& p, double r);

/// Coefficient of delta(r - R): for FlatVirial the psi'''' delta (equal to the
/// flat-metric Lap^2 psi delta), for the warped families the Lap_h^2 psi delta.
struct SingularPart {
    double r = 1.0;     // surface radius
    double coef = 0.0;  // signed delta coefficient
};

SingularPart psi_singular(const MultiplierProfile& p);

/// D^2(psi)^{ij} = h^{il} h^{kj} d_l d_k psi - Lambda^{k,ij} d_k psi
SymMatrix3 d2_psi(const MetricSpec& spec, const MultiplierProfile& p, const Point3& x);

struct Bilaplacian {
    double regular = 0.0;
    double singular_coef = 0.0;  // metric-aware delta coefficient at r = R
};

/// Lap_h^2 psi: closed forms for the warped families, nested radial evaluation
/// for FlatVirial on the asymptotically flat family.
/// Throws EvaluationAtSingularSurface when r is on the delta surface.
Bilaplacian bilaplacian_psi(const MetricSpec& spec, const MultiplierProfile& p, const Point3& x);

/// Lap_h psi for radial psi (used by the virial flux term)
double lap_psi(const MetricSpec& spec, const MultiplierProfile& p, double r);

}  // namespace diraclab
