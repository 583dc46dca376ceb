#include "diraclab/multiplier.hpp"

#include <cmath>
#include <cstdio>

namespace diraclab {

MultiplierProfile MultiplierProfile::flat_virial(double R) {
    if (!(R > 0)) throw ParameterError("multiplier threshold R must be > 0");
    return {MultiplierFamily::FlatVirial, R, 1.0};
}
MultiplierProfile MultiplierProfile::hyperbolic_wp(double R) {
    if (!(R > 0)) throw ParameterError("multiplier threshold R must be > 0");
    return {MultiplierFamily::HyperbolicWP, R, 1.0};
}
MultiplierProfile MultiplierProfile::subflat_wp(double n, double R) {
    if (!(R > 0)) throw ParameterError("multiplier threshold R must be > 0");
    constexpr double lo = 0.58578643762690495;
    if (!(n > lo && n <= 4.0 / 3.0))
        throw ParameterError("SubFlatWP exponent must lie in (2-sqrt 2, 4/3]");
    return {MultiplierFamily::SubFlatWP, R, n};
}

MultiplierProfile MultiplierProfile::parse(const std::string& s, double R) {
    if (s == "flat-virial") return flat_virial(R);
    if (s == "hyperbolic-wp") return hyperbolic_wp(R);
    if (s.rfind("subflat-wp:n=", 0) == 0) return subflat_wp(std::stod(s.substr(13)), R);
    throw ConfigError("unknown multiplier family: " + s);
}

std::string MultiplierProfile::name() const {
    switch (family) {
        case MultiplierFamily::FlatVirial: return "flat-virial";
        case MultiplierFamily::HyperbolicWP: return "hyperbolic-wp";
        case MultiplierFamily::SubFlatWP: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "subflat-wp:n=%.17g", n);
            return buf;
        }
    }
    return "?";
}

bool MultiplierProfile::compatible_with(const MetricSpec& spec) const {
    switch (family) {
        case MultiplierFamily::FlatVirial:
            return spec.is_asymflat() || (spec.is_warped() && spec.d_kind == DKind::Flat);
        case MultiplierFamily::HyperbolicWP:
            return spec.is_warped() && spec.d_kind == DKind::Hyperbolic;
        case MultiplierFamily::SubFlatWP:
            return spec.is_warped() && spec.d_kind == DKind::SubFlat;
    }
    return false;
}

PsiValues psi_eval(const MultiplierProfile& p, double r) {
    const double R = p.R;
    PsiValues v;
    switch (p.family) {
        case MultiplierFamily::FlatVirial: {
            if (r < 0) throw DomainError("psi_eval: FlatVirial needs r >= 0");
            if (r <= R) {
                v.psi = r * r / (6 * R);
                v.psi1 = r / (3 * R);
                v.psi2 = 1 / (3 * R);
                v.psi3 = 0;
            } else {
                v.psi = r / 2 + R * R / (6 * r) - R / 2;
                v.psi1 = 0.5 - R * R / (6 * r * r);
                v.psi2 = R * R / (3 * r * r * r);
                v.psi3 = -R * R / (r * r * r * r);
            }
            break;
        }
        case MultiplierFamily::HyperbolicWP: {
            const double aR = jbracket(R);
            if (r <= R) {
                v.psi = r + r * r / (2 * aR);
                v.psi1 = 1 + r / aR;
                v.psi2 = 1 / aR;
                v.psi3 = 0;
            } else {
                const double E = std::exp((R - r) / 2);
                v.psi = R + R * R / (2 * aR) + (r - R) * (1 + (2 + R) / aR) + 4 * (E - 1) / aR;
                v.psi1 = 1 + (2 + R) / aR - 2 * E / aR;
                v.psi2 = E / aR;
                v.psi3 = -0.5 * E / aR;
            }
            break;
        }
        case MultiplierFamily::SubFlatWP: {
            if (r < 0) throw DomainError("psi_eval: SubFlatWP needs r >= 0");
            const double aR = jbracket(R), n = p.n;
            if (r <= R) {
                v.psi = r * r / (2 * aR);
                v.psi1 = r / aR;
                v.psi2 = 1 / aR;
                v.psi3 = 0;
            } else {
                const double Rn = std::pow(R, n);
                const double integ = (std::abs(n - 1.0) < 1e-14)
                                         ? std::log(r / R)
                                         : (std::pow(r, 1 - n) - std::pow(R, 1 - n)) / (1 - n);
                v.psi = R * R / (2 * aR)
                      + (R / aR) * ((n + 1) * (r - R) / n - (Rn / n) * integ);
                v.psi1 = ((n + 1) / n - std::pow(R / r, n) / n) * R / aR;
                v.psi2 = std::pow(R, n + 1) / (std::pow(r, n + 1) * aR);
                v.psi3 = -(n + 1) * std::pow(R, n + 1) / (std::pow(r, n + 2) * aR);
            }
            break;
        }
    }
    return v;
}

double psi4_regular(const MultiplierProfile& p, double r) {
    const double R = p.R;
    switch (p.family) {
        case MultiplierFamily::FlatVirial:
            return (r > R) ? 4 * R * R / std::pow(r, 5) : 0.0;
        case MultiplierFamily::HyperbolicWP:
            return (r > R) ? 0.25 * std::exp((R - r) / 2) / jbracket(R) : 0.0;
        case MultiplierFamily::SubFlatWP:
            return (r > R) ? (p.n + 1) * (p.n + 2) * std::pow(R, p.n + 1)
                                 / (std::pow(r, p.n + 3) * jbracket(R))
                           : 0.0;
    }
    return 0.0;
}

SingularPart psi_singular(const MultiplierProfile& p) {
    const double R = p.R, aR = jbracket(R);
    switch (p.family) {
        case MultiplierFamily::FlatVirial: return {R, -1.0 / (R * R)};
        case MultiplierFamily::HyperbolicWP: return {R, -1.0 / (2 * aR)};
        case MultiplierFamily::SubFlatWP: return {R, -(p.n + 1) / (R * aR)};
    }
    return {R, 0.0};
}

SymMatrix3 d2_psi(const MetricSpec& spec, const MultiplierProfile& p, const Point3& x) {
    const Connection3 C = christoffel(spec, x);
    const MetricPoint mp = metric_at(spec, x);
    SymMatrix3 out;

    if (spec.is_asymflat()) {
        const double r = norm2(x);
        const PsiValues v = psi_eval(p, r);
        // Hessian of a radial function: d_l d_k psi = xh_l xh_k psi'' + (d_lk - xh xh) psi'/r
        double xh[3] = {0, 0, 0};
        double q1 = v.psi2;  // psi'/r -> psi''(0) as r -> 0
        if (r > 1e-12) {
            for (int i = 0; i < 3; ++i) xh[i] = x[i] / r;
            q1 = v.psi1 / r;
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int l = 0; l < 3; ++l)
                    for (int k = 0; k < 3; ++k) {
                        const double hess = xh[l] * xh[k] * v.psi2
                                          + ((l == k ? 1.0 : 0.0) - xh[l] * xh[k]) * q1;
                        s += mp.h_inv(i, l) * mp.h_inv(k, j) * hess;
                    }
                for (int k = 0; k < 3; ++k) s -= C.up(k, i, j) * v.psi1 * xh[k];
                out(i, j) = s;
            }
        return out;
    }

    // warped chart: psi depends on r = x1 only
    const PsiValues v = psi_eval(p, x[0]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = mp.h_inv(i, 0) * mp.h_inv(0, j) * v.psi2;
            s -= C.up(0, i, j) * v.psi1;
            out(i, j) = s;
        }
    return out;
}

double lap_psi(const MetricSpec& spec, const MultiplierProfile& p, double r) {
    const PsiValues v = psi_eval(p, r);
    if (spec.is_asymflat()) return lappsi_radial(spec, r, v.psi1, v.psi2);
    // warped: Lap psi = psi'' + (d'/d) psi'
    return v.psi2 + (spec.d1(r) / spec.d(r)) * v.psi1;
}

Bilaplacian bilaplacian_psi(const MetricSpec& spec, const MultiplierProfile& p, const Point3& x) {
    if (!p.compatible_with(spec))
        throw UnsupportedMetric("multiplier family incompatible with metric family");
    const double r = spec.is_asymflat() ? norm2(x) : x[0];
    const double R = p.R, aR = jbracket(R);
    const double tol = 1e-9 * std::max(1.0, R);

    Bilaplacian out;
    switch (p.family) {
        case MultiplierFamily::HyperbolicWP:
            if (std::abs(r - R) < tol)
                throw EvaluationAtSingularSurface("bilaplacian_psi at r = R");
            out.regular = (r < R) ? 1.0 / (4 * aR) : 0.0;
            out.singular_coef = -1.0 / (2 * aR);
            return out;
        case MultiplierFamily::SubFlatWP:
            if (std::abs(r - R) < tol)
                throw EvaluationAtSingularSurface("bilaplacian_psi at r = R");
            out.regular = (r < R) ? 0.0
                                  : (p.n + 1) * (2 - p.n) * R / (std::pow(r, 3) * aR);
            out.singular_coef = -(p.n + 1) / (R * aR);
            return out;
        case MultiplierFamily::FlatVirial: break;
    }

    if (std::abs(r - R) < tol) throw EvaluationAtSingularSurface("bilaplacian_psi at r = R");

    if (spec.is_warped()) {
        // flat-type warped product: Lap psi = 1/max(R, r), harmonic off the surface
        out.regular = 0.0;
        out.singular_coef = -1.0 / (R * R);
        return out;
    }

    // asymptotically flat family: nested radial evaluation of Lap_h(Lap_h psi),
    //   g   = c psi'' + 2 c q1 - (1/2) c' psi',     q1 = psi'/r
    //   g'  = c' psi'' + c psi''' + 2 c' q1 + 2 c q2 - (1/2)(c'' psi' + c' psi'')
    //   g'' = c'' psi'' + 2 c' psi''' + c psi4 + 2 c'' q1 + 4 c' q2 + 2 c q3
    //         - (1/2)(c''' psi' + 2 c'' psi'' + c' psi''')
    // with q2 = (psi'' - q1)/r, q3 = (psi''' - 2 q2)/r (all regular limits at 0)
    const PsiValues v = psi_eval(p, r);
    const double p4 = psi4_regular(p, r);
    const double c = spec.conf(r), c1 = spec.conf1(r), c2 = spec.conf2(r), c3 = spec.conf3(r);
    double q1, q2, q3;
    if (r < 1e-7) {
        q1 = v.psi2;
        q2 = 0.0;
        q3 = 0.0;
    } else {
        q1 = v.psi1 / r;
        q2 = (v.psi2 - q1) / r;
        q3 = (v.psi3 - 2 * q2) / r;
    }
    const double g1 = c1 * v.psi2 + c * v.psi3 + 2 * c1 * q1 + 2 * c * q2
                    - 0.5 * (c2 * v.psi1 + c1 * v.psi2);
    const double g2 = c2 * v.psi2 + 2 * c1 * v.psi3 + c * p4 + 2 * c2 * q1 + 4 * c1 * q2
                    + 2 * c * q3 - 0.5 * (c3 * v.psi1 + 2 * c2 * v.psi2 + c1 * v.psi3);
    if (r < 1e-7) {
        out.regular = 3 * c * g2;  // g'(0) = 0, g'/r -> g''(0)
    } else {
        out.regular = c * g2 + 2 * c * g1 / r - 0.5 * c1 * g1;
    }
    // delta coefficient: hhat(R) * [jump of d_r(Lap_h psi)] = c(R) * c(R) * (-1/R^2)
    const double cR = spec.conf(R);
    out.singular_coef = -cR * cR / (R * R);
    return out;
}

}  // namespace diraclab
