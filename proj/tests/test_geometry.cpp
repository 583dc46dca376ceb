#include "diraclab/geometry.hpp"
#include "diraclab/operators.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace diraclab;

namespace {
std::mt19937_64 rng(12345);
double uniform(double a, double b) {
    return a + (b - a) * std::uniform_real_distribution<double>(0, 1)(rng);
}
}  // namespace

TEST_CASE("flat limit reproduces the identity metric") {
    const auto spec = MetricSpec::flat();
    for (int s = 0; s < 20; ++s) {
        Point3 x{uniform(-5, 5), uniform(-5, 5), uniform(-5, 5)};
        const auto mp = metric_at(spec, x);
        CHECK(max_abs_diff(mp.h, SymMatrix3::identity()) <= 1e-15);
        CHECK(mp.sqrt_det == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("conformal metric at the origin") {
    const auto spec = MetricSpec::asymptotically_flat(0.1, 1.0);
    const auto mp = metric_at(spec, {0, 0, 0});
    CHECK(mp.h_inv(0, 0) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(mp.h_inv(1, 1) == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(mp.h_inv(0, 1) == 0.0);
    // 1.1^{-3/2}
    CHECK(mp.sqrt_det == doctest::Approx(0.86678417204144756).epsilon(1e-14));
}

TEST_CASE("warped flat metric in product coordinates") {
    const auto spec = MetricSpec::warped(DKind::Flat, BetaSpec::sphere(1.0));
    const double th = 1.1;
    const auto mp = metric_at(spec, {2.0, th, 0.3});
    CHECK(mp.h(0, 0) == doctest::Approx(1.0));
    CHECK(mp.h(1, 1) == doctest::Approx(4.0).epsilon(1e-14));  // d(2) * a^2
    CHECK(mp.h(2, 2) == doctest::Approx(4.0 * std::sin(th) * std::sin(th)).epsilon(1e-14));
    CHECK(mp.sqrt_det == doctest::Approx(4.0 * std::sin(th)).epsilon(1e-14));
}

TEST_CASE("metric inverse residual at random points") {
    const std::array<MetricSpec, 4> specs = {
        MetricSpec::asymptotically_flat(0.1, 0.5),
        MetricSpec::warped(DKind::Hyperbolic, BetaSpec::sphere(1.0)),
        MetricSpec::warped(DKind::Flat, BetaSpec::sphere(0.7)),
        MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(1.0), 4.0 / 3.0)};
    for (const auto& spec : specs)
        for (int s = 0; s < 50; ++s) {
            Point3 x = spec.is_asymflat()
                           ? Point3{uniform(-6, 6), uniform(-6, 6), uniform(-6, 6)}
                           : Point3{uniform(0.3, 6), uniform(0.3, 2.8), uniform(0, 6)};
            const auto mp = metric_at(spec, x);
            CHECK(max_abs_diff(mp.h * mp.h_inv, SymMatrix3::identity()) <= 1e-12);
            CHECK(mp.sqrt_det > 0);
        }
}

TEST_CASE("christoffel symmetry and raised-index identity") {
    const std::array<MetricSpec, 2> specs = {
        MetricSpec::asymptotically_flat(0.15, 0.7),
        MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(1.3), 1.2)};
    for (const auto& spec : specs)
        for (int s = 0; s < 30; ++s) {
            Point3 x = spec.is_asymflat()
                           ? Point3{uniform(-4, 4), uniform(-4, 4), uniform(-4, 4)}
                           : Point3{uniform(0.4, 5), uniform(0.4, 2.7), uniform(0, 6)};
            const auto C = christoffel(spec, x);
            const auto mp = metric_at(spec, x);
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        CHECK(C.low(k, i, j) == doctest::Approx(C.low(k, j, i)).epsilon(1e-13));
                        double up = 0;
                        for (int l = 0; l < 3; ++l)
                            for (int m2 = 0; m2 < 3; ++m2)
                                up += mp.h_inv(i, l) * mp.h_inv(j, m2) * C.low(k, l, m2);
                        CHECK(C.up(k, i, j) == doctest::Approx(up).epsilon(1e-12).scale(1.0));
                    }
        }
}

TEST_CASE("flat christoffel vanishes") {
    const auto C = christoffel(MetricSpec::flat(), {1.2, -0.4, 2.2});
    for (double v : C.lower) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("warped raised connection matches the product closed form") {
    // Lambda^{1,ij} = 0 when i = 1 or j = 1, else -1/2 d'/d^2 beta^{ij}
    const auto spec = MetricSpec::warped(DKind::Hyperbolic, BetaSpec::sphere(1.0));
    for (int s = 0; s < 20; ++s) {
        const double r = uniform(-2, 3), th = uniform(0.3, 2.8);
        const auto C = christoffel(spec, {r, th, 1.0});
        const double a = 1.0;
        const double b22_inv = 1.0 / (a * a);
        const double b33_inv = 1.0 / (a * a * std::sin(th) * std::sin(th));
        const double D = spec.d(r), D1 = spec.d1(r);
        CHECK(std::abs(C.up(0, 0, 0)) <= 1e-13);
        CHECK(std::abs(C.up(0, 0, 1)) <= 1e-13);
        CHECK(std::abs(C.up(0, 2, 0)) <= 1e-13);
        CHECK(C.up(0, 1, 1) == doctest::Approx(-0.5 * D1 / (D * D) * b22_inv).epsilon(1e-12));
        CHECK(C.up(0, 2, 2) == doctest::Approx(-0.5 * D1 / (D * D) * b33_inv).epsilon(1e-12));
        CHECK(std::abs(C.up(0, 1, 2)) <= 1e-13);
    }
}

TEST_CASE("warped curvature closed forms") {
    // hyperbolic: R_h = -3/8 + e^{-r/2} R_beta
    CHECK(warped_curvature(DKind::Hyperbolic, 1.0, 0.0, 1.7)
          == doctest::Approx(-3.0 / 8).epsilon(1e-14));
    CHECK(warped_curvature(DKind::Hyperbolic, 1.0, 1.0, 0.0)
          == doctest::Approx(5.0 / 8).epsilon(1e-14));
    // flat-type with unit sphere is Euclidean R^3
    CHECK(std::abs(warped_curvature(DKind::Flat, 1.0, 2.0, 0.9)) <= 1e-13);
    // subflat at n = 4/3 with R_beta = 0: 4n - 3n^2 = 0
    CHECK(std::abs(warped_curvature(DKind::SubFlat, 4.0 / 3.0, 0.0, 1.0)) <= 1e-13);
    // generic subflat value
    const double n = 1.1, rb = 3.0, r = 2.3;
    CHECK(warped_curvature(DKind::SubFlat, n, rb, r)
          == doctest::Approx((4 * n - 3 * n * n) / (2 * r * r) + rb / std::pow(r, n))
                 .epsilon(1e-13));
}

TEST_CASE("general curvature formula agrees with warped closed forms") {
    const std::array<MetricSpec, 3> specs = {
        MetricSpec::warped(DKind::Hyperbolic, BetaSpec::sphere(1.0)),
        MetricSpec::warped(DKind::Flat, BetaSpec::sphere(1.0)),
        MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(0.8), 4.0 / 3.0)};
    for (const auto& spec : specs)
        for (int s = 0; s < 100; ++s) {
            const double r = (spec.d_kind == DKind::Hyperbolic) ? uniform(-3, 4) : uniform(0.2, 8);
            const Point3 x{r, uniform(0.2, 2.9), uniform(0, 6.28)};
            const double got = scalar_curvature(spec, x);
            const double want = warped_curvature(spec.d_kind, spec.n, spec.beta.r_beta(), r);
            if (std::abs(want) > 1e-8)
                CHECK(got == doctest::Approx(want).epsilon(1e-12));
            else
                CHECK(std::abs(got - want) <= 1e-10);
        }
}

TEST_CASE("conformal curvature closed form agrees with the general formula") {
    const auto spec = MetricSpec::asymptotically_flat(0.1, 1.0);
    for (int s = 0; s < 60; ++s) {
        Point3 x{uniform(-5, 5), uniform(-5, 5), uniform(-5, 5)};
        const double r = norm2(x);
        const double want = conformal_curvature_radial(spec, r);
        const double got = scalar_curvature(spec, x);
        CHECK(got == doctest::Approx(want).epsilon(1e-10).scale(std::abs(want) + 1e-3));
    }
    CHECK(std::abs(scalar_curvature(MetricSpec::flat(), {0.3, 1.0, -2.0})) <= 1e-14);
}

TEST_CASE("conformal curvature radial derivative agrees with finite differences") {
    const auto spec = MetricSpec::asymptotically_flat(0.08, 0.6);
    const double h = 1e-4;
    for (double r : {0.5, 1.0, 2.5, 6.0}) {
        const double fd = (conformal_curvature_radial(spec, r + h)
                           - conformal_curvature_radial(spec, r - h))
                        / (2 * h);
        CHECK(conformal_curvature_radial_d1(spec, r) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("assumption profile: flat and conformal model values") {
    SampleBox box;
    const auto flat = assumption_check(MetricSpec::flat(), box, 12);
    CHECK(flat.nu == doctest::Approx(1.0));
    CHECK(flat.N == doctest::Approx(1.0));
    CHECK(flat.C_I == doctest::Approx(0.0));
    CHECK(flat.C_h == doctest::Approx(0.0));

    const auto spec = MetricSpec::asymptotically_flat(0.1, 1.0);
    const auto P = assumption_check(spec, box, 16);
    CHECK(P.C_I == doctest::Approx(0.1).epsilon(1e-12));     // sup attained at the origin
    CHECK(P.N == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(P.nu == doctest::Approx(0.9).epsilon(1e-12));      // paper coupling nu = 1 - C_I
    CHECK(P.nu_empirical >= 1.0 - 1e-12);                    // h_inv >= I for this family
    CHECK(P.N_empirical <= P.N + 1e-12);
    CHECK(P.C_h > 0);

    // empirical nu, N bracket random Rayleigh quotients
    for (int s = 0; s < 200; ++s) {
        Point3 x{uniform(-8, 8), uniform(-8, 8), uniform(-8, 8)};
        Point3 xi{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
        const double n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if (n2 < 1e-6) continue;
        const auto mp = metric_at(spec, x);
        double q = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) q += mp.h_inv(i, j) * xi[i] * xi[j];
        q /= n2;
        CHECK(q >= P.nu_empirical - 1e-10);
        CHECK(q <= P.N_empirical + 1e-10);
    }
}

TEST_CASE("domain and parameter errors") {
    CHECK_THROWS_AS(metric_at(MetricSpec::warped(DKind::Flat, BetaSpec::sphere(1.0)),
                              Point3{-0.5, 1.0, 0.0}),
                    DomainError);
    CHECK_THROWS_AS(MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(1.0), 0.5), ParameterError);
    CHECK_THROWS_AS(MetricSpec::warped(DKind::SubFlat, BetaSpec::sphere(1.0), 1.4), ParameterError);
    CHECK_THROWS_AS(BetaSpec::sphere(-1.0), ParameterError);
    CHECK_THROWS_AS(assumption_check(MetricSpec::warped(DKind::Flat, BetaSpec::sphere(1.0)),
                                     SampleBox{}, 8),
                    UnsupportedMetric);
    // Custom cross-section has no pointwise metric
    CHECK_THROWS_AS(metric_at(MetricSpec::warped(DKind::Flat, BetaSpec::custom(2.0)),
                              Point3{1.0, 1.0, 1.0}),
                    UnsupportedMetric);
}

TEST_CASE("laplace_beltrami: flat quadratic and harmonic fields") {
    Grid3 g;
    g.chart = Chart::Cartesian;
    g.n = {33, 33, 33};
    g.lo = {-4, -4, -4};
    g.hi = {4, 4, 4};
    const auto T = build_geometry_tables(MetricSpec::flat(), g, false);
    Field f(g), lin(g);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const Point3 x = g.point(i, j, k);
                f.at(i, j, k) = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                lin.at(i, j, k) = x[0];
            }
    const Field lf = laplace_beltrami(T, f);
    const Field ll = laplace_beltrami(T, lin);
    // interior checks (away from the zero-ghost boundary)
    for (int i = 4; i < g.n[0] - 4; ++i) {
        CHECK(lf.at(i, 16, 16).real() == doctest::Approx(6.0).epsilon(1e-11));
        CHECK(std::abs(ll.at(i, 16, 16)) <= 1e-11);
    }
}

TEST_CASE("laplace_beltrami second-order convergence on a manufactured solution") {
    const auto spec = MetricSpec::asymptotically_flat(0.1, 1.0);
    auto run = [&](int npts) {
        Grid3 g;
        g.chart = Chart::Cartesian;
        g.n = {npts, npts, npts};
        g.lo = {-6, -6, -6};
        g.hi = {6, 6, 6};
        const auto T = build_geometry_tables(spec, g, false);
        Field f(g);
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    const Point3 x = g.point(i, j, k);
                    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                    f.at(i, j, k) = std::exp(-r2 / 2.0);
                }
        const Field lf = laplace_beltrami(T, f);
        // radial closed form via lappsi: psi' = -r e^{-r^2/2}, psi'' = (r^2-1) e^{-r^2/2}
        double err = 0;
        for (int i = 2; i < g.n[0] - 2; ++i)
            for (int j = 2; j < g.n[1] - 2; ++j)
                for (int k = 2; k < g.n[2] - 2; ++k) {
                    const Point3 x = g.point(i, j, k);
                    const double r = norm2(x);
                    const double e = std::exp(-r * r / 2);
                    const double want = lappsi_radial(spec, r, -r * e, (r * r - 1) * e);
                    err = std::max(err, std::abs(lf.at(i, j, k).real() - want));
                }
        return err;
    };
    const double e1 = run(33), e2 = run(65);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.9);
}
