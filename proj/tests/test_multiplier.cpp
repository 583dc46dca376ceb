#include "diraclab/multiplier.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace diraclab;

TEST_CASE("flat-virial ladder values") {
    const auto p = MultiplierProfile::flat_virial(1.0);
    // both branches give psi' = 1/3 at r = R = 1
    CHECK(psi_eval(p, 1.0).psi1 == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(psi_eval(p, 1.0 + 1e-12).psi1 == doctest::Approx(1.0 / 3).epsilon(1e-9));
    // psi' -> 1/2 at infinity
    CHECK(psi_eval(p, 1e7).psi1 == doctest::Approx(0.5).epsilon(1e-10));
    // bounds 0 <= psi' <= 1/2, psi'' <= 1/(2 max(R, r)), and for r > R psi'' >= 0, psi''' <= 0
    for (int i = 0; i <= 2000; ++i) {
        const double r = 1e-3 + i * 0.01;
        const auto v = psi_eval(p, r);
        CHECK(v.psi1 >= 0.0);
        CHECK(v.psi1 <= 0.5 + 1e-15);
        CHECK(v.psi2 <= 1.0 / (2 * std::max(1.0, r)) + 1e-15);
        CHECK(v.psi2 >= 0.0);
        if (r > 1.0) CHECK(v.psi3 <= 0.0);
    }
}

TEST_CASE("hyperbolic ladder values") {
    const auto p = MultiplierProfile::hyperbolic_wp(1.0);
    const double want = 1.0 + 1.0 / std::sqrt(2.0);
    CHECK(psi_eval(p, 1.0).psi1 == doctest::Approx(want).epsilon(1e-14));
    CHECK(psi_eval(p, 1.0 + 1e-12).psi1 == doctest::Approx(want).epsilon(1e-9));
    for (double r = -6; r <= 8; r += 0.05) CHECK(psi_eval(p, r).psi2 > 0.0);
}

TEST_CASE("subflat ladder values") {
    const auto p = MultiplierProfile::subflat_wp(4.0 / 3.0, 1.0);
    const double aR = std::sqrt(2.0);
    for (double r = 0.0; r <= 1.0; r += 0.1)
        CHECK(psi_eval(p, r).psi2 == doctest::Approx(1.0 / aR).epsilon(1e-14));
    for (double r = 1.01; r <= 20; r += 0.13) CHECK(psi_eval(p, r).psi2 > 0.0);
    // n = 1 inside the admissible range exercises the log branch of psi
    const auto p1 = MultiplierProfile::subflat_wp(1.0, 2.0);
    CHECK(std::isfinite(psi_eval(p1, 5.0).psi));
}

TEST_CASE("C2 matching at r = R across three decades of R") {
    const std::vector<MultiplierProfile> profiles = {
        MultiplierProfile::flat_virial(1.0), MultiplierProfile::hyperbolic_wp(1.0),
        MultiplierProfile::subflat_wp(1.2, 1.0)};
    for (auto p : profiles)
        for (int i = 0; i < 20; ++i) {
            const double R = 0.1 * std::pow(1000.0, i / 19.0);  // [0.1, 100]
            p.R = R;
            // both branch formulas evaluated at the matching radius itself
            const auto lo = psi_eval(p, R);
            const auto hi = psi_eval(p, std::nextafter(R, 1e300));
            CHECK(std::abs(lo.psi - hi.psi) <= 1e-10 * (std::abs(lo.psi) + 1.0));
            CHECK(std::abs(lo.psi1 - hi.psi1) <= 1e-10 * (std::abs(lo.psi1) + 1.0));
            CHECK(std::abs(lo.psi2 - hi.psi2) <= 1e-10 * (std::abs(lo.psi2) + 1.0));
        }
}

TEST_CASE("singular surface coefficients") {
    CHECK(psi_singular(MultiplierProfile::flat_virial(2.0)).coef
          == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(psi_singular(MultiplierProfile::hyperbolic_wp(1.0)).coef
          == doctest::Approx(-0.35355339059327376).epsilon(1e-14));
    CHECK(psi_singular(MultiplierProfile::subflat_wp(4.0 / 3.0, 1.0)).coef
          == doctest::Approx(-1.6499158227686109).epsilon(1e-14));
}

TEST_CASE("d2_psi: flat metric inside the ball and PSD outside") {
    const auto spec = MetricSpec::flat();
    const auto p = MultiplierProfile::flat_virial(2.0);
    const auto M = d2_psi(spec, p, {0.4, 0.5, -0.3});  // |x| < R
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(M(i, j) == doctest::Approx(i == j ? 1.0 / 6 : 0.0).epsilon(1e-12).scale(1.0));

    // r > R: positive semidefinite (random directions)
    std::mt19937_64 r2(3);
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int s = 0; s < 200; ++s) {
        const Point3 x{dist(r2) * 10, dist(r2) * 10, dist(r2) * 10};
        if (norm2(x) <= 2.01) continue;
        const auto D = d2_psi(spec, p, x);
        const Point3 v{dist(r2), dist(r2), dist(r2)};
        double q = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) q += v[i] * D(i, j) * v[j];
        CHECK(q >= -1e-12);
    }
}

TEST_CASE("d2_psi on warped products matches the product closed form") {
    // D2(psi)^{11} = psi'', D2(psi)^{ij} = 1/2 (d'/d) psi' h^{ij} for i,j >= 2
    struct Case {
        MetricSpec spec;
        MultiplierProfile prof;
    };
    const std::vector<Case> cases = {
        {MetricSpec::warped(DKind::Hyperbolic, BetaSpec::sphere(1.0)),
         MultiplierProfile::hyperbolic_wp(1.5)},
        {MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(0.9), 4.0 / 3.0),
         MultiplierProfile::subflat_wp(4.0 / 3.0, 1.5)},
    };
    for (const auto& c : cases)
        for (double r : {0.7, 1.5 - 1e-9, 2.2, 5.0}) {
            const Point3 x{r, 1.2, 0.7};
            const auto D = d2_psi(c.spec, c.prof, x);
            const auto v = psi_eval(c.prof, r);
            const auto mp = metric_at(c.spec, x);
            const double fac = 0.5 * (c.spec.d1(r) / c.spec.d(r)) * v.psi1;
            CHECK(D(0, 0) == doctest::Approx(v.psi2).epsilon(1e-11));
            CHECK(D(1, 1) == doctest::Approx(fac * mp.h_inv(1, 1)).epsilon(1e-11));
            CHECK(D(2, 2) == doctest::Approx(fac * mp.h_inv(2, 2)).epsilon(1e-11));
            CHECK(std::abs(D(0, 1)) <= 1e-12);
            CHECK(std::abs(D(1, 2)) <= 1e-12);
        }
}

TEST_CASE("bilaplacian closed forms for the warped families") {
    const auto hspec = MetricSpec::warped(DKind::Hyperbolic, BetaSpec::sphere(1.0));
    const auto hp = MultiplierProfile::hyperbolic_wp(1.0);
    const double aR = std::sqrt(2.0);
    CHECK(bilaplacian_psi(hspec, hp, {0.3, 1.0, 1.0}).regular
          == doctest::Approx(1 / (4 * aR)).epsilon(1e-14));
    CHECK(bilaplacian_psi(hspec, hp, {2.5, 1.0, 1.0}).regular == 0.0);
    CHECK(bilaplacian_psi(hspec, hp, {2.5, 1.0, 1.0}).singular_coef
          == doctest::Approx(-1 / (2 * aR)).epsilon(1e-14));
    CHECK_THROWS_AS(bilaplacian_psi(hspec, hp, {1.0, 1.0, 1.0}), EvaluationAtSingularSurface);

    const double n = 4.0 / 3.0;
    const auto sspec = MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(1.0), n);
    const auto sp = MultiplierProfile::subflat_wp(n, 1.0);
    const double r = 2.0;
    CHECK(bilaplacian_psi(sspec, sp, {r, 1.0, 1.0}).regular
          == doctest::Approx((n + 1) * (2 - n) * 1.0 / (r * r * r * aR)).epsilon(1e-13));
    CHECK(bilaplacian_psi(sspec, sp, {0.5, 1.0, 1.0}).regular == 0.0);

    // incompatible pairings are rejected
    CHECK_THROWS_AS(bilaplacian_psi(hspec, sp, {0.5, 1.0, 1.0}), UnsupportedMetric);
}

TEST_CASE("bilaplacian of the flat-virial multiplier vanishes off the surface (flat metric)") {
    const auto spec = MetricSpec::flat();
    const auto p = MultiplierProfile::flat_virial(1.5);
    for (double r : {0.2, 0.9, 1.8, 4.0, 9.0}) {
        const auto b = bilaplacian_psi(spec, p, {r, 0, 0});
        CHECK(std::abs(b.regular) <= 1e-12);
        CHECK(b.singular_coef == doctest::Approx(-1.0 / (1.5 * 1.5)).epsilon(1e-14));
    }
    // flat-type warped chart carries the same coefficients
    const auto wspec = MetricSpec::warped(DKind::Flat, BetaSpec::sphere(1.0));
    const auto bw = bilaplacian_psi(wspec, p, {2.0, 1.0, 1.0});
    CHECK(bw.regular == 0.0);
    CHECK(bw.singular_coef == doctest::Approx(-1.0 / 2.25).epsilon(1e-14));
}

namespace {

// distributional check: int Lap^2 psi chi dmu  ==  int psi Lap^2 chi dmu
// on radial functions, via fine 1D quadrature; chi is a smooth bump straddling R
double bump(double r, double c, double w) {
    const double t = (r - c) / w;
    return std::exp(-t * t);
}
double bump1(double r, double c, double w) {
    const double t = (r - c) / w;
    return -2 * t / w * std::exp(-t * t);
}
double bump2(double r, double c, double w) {
    const double t = (r - c) / w;
    return (4 * t * t - 2) / (w * w) * std::exp(-t * t);
}

}  // namespace

TEST_CASE("distributional consistency of the delta coefficients") {
    SUBCASE("conformal metric, flat-virial multiplier") {
        const auto spec = MetricSpec::asymptotically_flat(0.1, 1.0);
        const auto p = MultiplierProfile::flat_virial(2.0);
        const int n = 48001;
        const double rmax = 12.0, h = rmax / (n - 1);
        const double hfd = 1e-4;
        auto meas = [&](double r) {  // 4 pi r^2 sqrt(det h)
            const double c = spec.conf(r);
            return 4 * M_PI * r * r * std::pow(c, -1.5);
        };
        auto chi = [&](double r) { return bump(r, 2.0, 0.9); };
        // lhs: regular quadrature + delta coefficient times the surface integral of chi
        double lhs = 0;
        for (int i = 1; i < n - 1; ++i) {
            const double r = i * h;
            if (std::abs(r - 2.0) < 1e-12) continue;
            lhs += bilaplacian_psi(spec, p, {r, 0, 0}).regular * chi(r) * meas(r) * h;
        }
        const double coef = bilaplacian_psi(spec, p, {1.0, 0, 0}).singular_coef;
        lhs += coef * chi(2.0) * meas(2.0);

        // rhs: int psi Lap^2 chi; Lap chi through the radial closed form with
        // exact bump derivatives, outer Laplacian by central differences of it
        auto lap_chi = [&](double r) {
            return lappsi_radial(spec, r, bump1(r, 2.0, 0.9), bump2(r, 2.0, 0.9));
        };
        double rhs = 0;
        for (int i = 1; i < n - 1; ++i) {
            const double r = i * h;
            const double g1 = (lap_chi(r + hfd) - lap_chi(r - hfd)) / (2 * hfd);
            const double g2 =
                (lap_chi(r + hfd) - 2 * lap_chi(r) + lap_chi(r - hfd)) / (hfd * hfd);
            rhs += psi_eval(p, r).psi * lappsi_radial(spec, r, g1, g2) * meas(r) * h;
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(2e-4));
    }

    SUBCASE("hyperbolic warped product") {
        const auto spec = MetricSpec::warped(DKind::Hyperbolic, BetaSpec::sphere(1.0));
        const auto p = MultiplierProfile::hyperbolic_wp(1.0);
        const int n = 36001;
        const double rlo = -8, rhi = 10, h = (rhi - rlo) / (n - 1);
        const double hfd = 1e-4;
        auto meas = [&](double r) { return spec.d(r); };  // cross-section area folded out
        auto chi = [&](double r) { return bump(r, 1.0, 0.8); };
        auto lap_chi = [&](double r) {
            return bump2(r, 1.0, 0.8) + (spec.d1(r) / spec.d(r)) * bump1(r, 1.0, 0.8);
        };
        double lhs = 0, rhs = 0;
        for (int i = 1; i < n - 1; ++i) {
            const double r = rlo + i * h;
            if (std::abs(r - 1.0) > 1e-12)
                lhs += bilaplacian_psi(spec, p, {r, 1, 1}).regular * chi(r) * meas(r) * h;
            const double g1 = (lap_chi(r + hfd) - lap_chi(r - hfd)) / (2 * hfd);
            const double g2 =
                (lap_chi(r + hfd) - 2 * lap_chi(r) + lap_chi(r - hfd)) / (hfd * hfd);
            rhs += psi_eval(p, r).psi * (g2 + (spec.d1(r) / spec.d(r)) * g1) * meas(r) * h;
        }
        lhs += psi_singular(p).coef * chi(1.0) * meas(1.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(2e-4));
    }
}

TEST_CASE("profile parsing and compatibility") {
    const auto p = MultiplierProfile::parse("subflat-wp:n=1.25", 2.0);
    CHECK(p.family == MultiplierFamily::SubFlatWP);
    CHECK(p.n == doctest::Approx(1.25));
    CHECK_THROWS_AS(MultiplierProfile::parse("bogus", 1.0), ConfigError);

    CHECK(MultiplierProfile::flat_virial(1.0).compatible_with(MetricSpec::flat()));
    CHECK(MultiplierProfile::flat_virial(1.0).compatible_with(
        MetricSpec::warped(DKind::Flat, BetaSpec::sphere(1.0))));
    CHECK(!MultiplierProfile::hyperbolic_wp(1.0).compatible_with(MetricSpec::flat()));
}
