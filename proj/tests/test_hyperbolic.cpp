#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nearcycle/hyperbolic.hpp"
#include "oracle_helpers.hpp"

using namespace nearcycle;

namespace {

HPoint random_point(oracle::Rng& rng, int dim, double rad = 0.85) {
    std::vector<double> k(static_cast<std::size_t>(dim));
    for (;;) {
        double n2 = 0.0;
        for (auto& c : k) {
            c = rng.uniform(-rad, rad);
            n2 += c * c;
        }
        if (n2 < rad * rad) return HPoint::from_klein(k);
    }
}

GeodesicSubspace x_axis_line(int dim) {
    return GeodesicSubspace(HPoint::from_klein(dim == 2 ? std::initializer_list<double>{0.0, 0.0}
                                                        : std::initializer_list<double>{0.0, 0.0, 0.0}),
                            {{1.0, 0.0, 0.0}});
}

}  // namespace

TEST_CASE("Klein round trip and ball invariant") {
    oracle::Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        HPoint p = random_point(rng, 3);
        auto k = p.klein();
        HPoint q = HPoint::from_klein(k);
        auto k2 = q.klein();
        for (int j = 0; j < 3; ++j)
            REQUIRE(std::abs(k[static_cast<std::size_t>(j)] - k2[static_cast<std::size_t>(j)]) < 1e-12);
    }
    REQUIRE_THROWS_AS(HPoint::from_klein({1.0, 0.0, 0.0}), std::domain_error);
    REQUIRE_THROWS_AS(HPoint::from_klein({0.999999999999999, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("hyp_distance closed form matches Klein metric quadrature") {
    // artanh(0.5) for the axis example.
    HPoint o = HPoint::from_klein({0.0, 0.0, 0.0});
    HPoint q = HPoint::from_klein({0.5, 0.0, 0.0});
    const double d = hyp_distance(o, q);
    REQUIRE(d == Catch::Approx(std::atanh(0.5)).margin(1e-12));
    REQUIRE(d == Catch::Approx(0.5493061443340549).margin(1e-9));
    const double quad = oracle::klein_segment_length({0.0, 0.0, 0.0}, {0.5, 0.0, 0.0});
    REQUIRE(std::abs(d - quad) < 1e-8);

    oracle::Rng rng(7);
    for (int i = 0; i < 25; ++i) {
        HPoint a = random_point(rng, 3);
        HPoint b = random_point(rng, 3);
        const double dd = hyp_distance(a, b);
        const double qq = oracle::klein_segment_length(a.klein(), b.klein());
        REQUIRE(std::abs(dd - qq) < 1e-7);
    }
}

TEST_CASE("hyp_distance axioms") {
    oracle::Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        HPoint a = random_point(rng, 3);
        HPoint b = random_point(rng, 3);
        HPoint c = random_point(rng, 3);
        REQUIRE(hyp_distance(a, a) == 0.0);
        REQUIRE(std::abs(hyp_distance(a, b) - hyp_distance(b, a)) < 1e-12);
        REQUIRE(hyp_distance(a, c) <= hyp_distance(a, b) + hyp_distance(b, c) + 1e-10);
    }
    HPoint p2 = HPoint::from_klein({0.1, 0.2});
    HPoint p3 = HPoint::from_klein({0.1, 0.2, 0.0});
    REQUIRE_THROWS_AS(hyp_distance(p2, p3), std::invalid_argument);
}

TEST_CASE("geodesic_point endpoints, midpoint, affine chord") {
    HPoint o = HPoint::from_klein({0.0, 0.0, 0.0});
    HPoint q = HPoint::from_klein({0.8, 0.0, 0.0});
    HPoint a = geodesic_point(o, q, 0.0);
    HPoint b = geodesic_point(o, q, 1.0);
    REQUIRE(hyp_distance(a, o) < 1e-12);
    REQUIRE(hyp_distance(b, q) < 1e-12);

    // Midpoint along the x axis: artanh(x) = artanh(0.8)/2, i.e. x = 0.5.
    // (Bisection oracle on hyp_distance along the affine segment.)
    {
        double lo = 0.0, hi = 0.8;
        const double total = hyp_distance(o, q);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hyp_distance(o, HPoint::from_klein({mid, 0.0, 0.0})) < 0.5 * total)
                lo = mid;
            else
                hi = mid;
        }
        const double oracle_mid = 0.5 * (lo + hi);
        REQUIRE(oracle_mid == Catch::Approx(0.5).margin(1e-9));
        HPoint m = geodesic_point(o, q, 0.5);
        REQUIRE(m.klein()[0] == Catch::Approx(oracle_mid).margin(1e-9));
        REQUIRE(std::abs(hyp_distance(o, m) - hyp_distance(m, q)) < 1e-9);
    }

    oracle::Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        HPoint p = random_point(rng, 3);
        HPoint r = random_point(rng, 3);
        const double s = rng.uniform();
        HPoint g = geodesic_point(p, r, s);
        REQUIRE(std::abs(hyp_distance(p, g) - s * hyp_distance(p, r)) < 1e-9);
        // Lies on the affine Klein segment.
        auto kp = p.klein(), kr = r.klein(), kg = g.klein();
        double best = 1e9;
        for (int t = 0; t <= 1000; ++t) {
            const double tt = t / 1000.0;
            double e = 0.0;
            for (int j = 0; j < 3; ++j) {
                const double c = kp[static_cast<std::size_t>(j)] +
                                 tt * (kr[static_cast<std::size_t>(j)] - kp[static_cast<std::size_t>(j)]);
                e += (c - kg[static_cast<std::size_t>(j)]) * (c - kg[static_cast<std::size_t>(j)]);
            }
            best = std::min(best, std::sqrt(e));
        }
        REQUIRE(best < 2e-3);  // coarse chord sampling; exactness checked via distances
    }
    REQUIRE(hyp_distance(geodesic_point(o, o, 0.7), o) == 0.0);
}

TEST_CASE("Klein affine segments are geodesics (arclength = distance)") {
    oracle::Rng rng(31);
    for (int i = 0; i < 10; ++i) {
        HPoint a = random_point(rng, 2);
        HPoint b = random_point(rng, 2);
        const double quad = oracle::klein_segment_length(a.klein(), b.klein());
        REQUIRE(std::abs(quad - hyp_distance(a, b)) < 1e-7);
    }
}

TEST_CASE("project_to_geodesic: fixed points, symmetry, minimizer, Lipschitz") {
    GeodesicSubspace axis = x_axis_line(3);

    HPoint onaxis = HPoint::from_klein({0.3, 0.0, 0.0});
    REQUIRE(hyp_distance(project_to_geodesic(onaxis, axis), onaxis) < 1e-12);

    HPoint off = HPoint::from_klein({0.0, 0.5, 0.0});
    HPoint foot = project_to_geodesic(off, axis);
    REQUIRE(hyp_distance(foot, HPoint::from_klein({0.0, 0.0, 0.0})) < 1e-9);

    oracle::Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        HPoint p = random_point(rng, 3);
        HPoint f = project_to_geodesic(p, axis);
        const double dproj = hyp_distance(p, f);
        // Dense sampling oracle along the axis.
        for (int t = 0; t <= 1000; ++t) {
            const double x = -0.999 + 1.998 * t / 1000.0;
            HPoint z = HPoint::from_klein({x, 0.0, 0.0});
            REQUIRE(dproj <= hyp_distance(p, z) + 1e-9);
        }
    }

    // Busemann-Feller: projection is 1-Lipschitz.
    for (int i = 0; i < 1000; ++i) {
        HPoint p = random_point(rng, 3);
        HPoint q = random_point(rng, 3);
        const double dp = hyp_distance(project_to_geodesic(p, axis), project_to_geodesic(q, axis));
        REQUIRE(dp <= hyp_distance(p, q) + 1e-9);
    }

    // 2-dimensional geodesic subspace in H^3.
    GeodesicSubspace plane(HPoint::from_klein({0.0, 0.0, 0.0}),
                           {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
    for (int i = 0; i < 200; ++i) {
        HPoint p = random_point(rng, 3);
        HPoint q = random_point(rng, 3);
        const double dp = hyp_distance(project_to_geodesic(p, plane), project_to_geodesic(q, plane));
        REQUIRE(dp <= hyp_distance(p, q) + 1e-9);
    }

    REQUIRE_THROWS_AS(GeodesicSubspace(HPoint::from_klein({0.0, 0.0, 0.0}),
                                       {{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}}),
                      std::invalid_argument);
}

TEST_CASE("Fermi coordinates: on-axis, round trip, induced tube metric") {
    GeodesicSubspace axis = x_axis_line(3);
    FermiFrame frame(axis);

    HPoint on = frame.axis_point(0.3);
    FermiCoords fc = fermi_from_point(frame, on);
    REQUIRE(fc.t == Catch::Approx(0.3).margin(1e-12));
    REQUIRE(fc.r == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(fc.theta == 0.0);

    oracle::Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        HPoint p = random_point(rng, 3);
        FermiCoords c = fermi_from_point(frame, p);
        HPoint back = fermi_to_point(frame, c);
        REQUIRE(hyp_distance(p, back) < 1e-9);
        // r equals the distance to the axis.
        REQUIRE(std::abs(c.r - hyp_distance(p, project_to_geodesic(p, axis))) < 1e-9);
    }

    // Tube metric: dr^2 + cosh^2(r) dt^2 + sinh^2(r) dtheta^2, second order.
    const double r0 = 0.1, dt = 0.01;
    HPoint a = fermi_to_point(frame, {0.0, r0, 0.0});
    HPoint b = fermi_to_point(frame, {dt, r0, 0.0});
    REQUIRE(std::abs(hyp_distance(a, b) - std::cosh(r0) * dt) < 1e-5);
    const double dth = 0.01;
    HPoint c2 = fermi_to_point(frame, {0.0, r0, dth});
    REQUIRE(std::abs(hyp_distance(a, c2) - std::sinh(r0) * dth) < 1e-5);
}

TEST_CASE("point_reflection: linear negation at origin, involution, isometry") {
    HPoint o = HPoint::from_klein({0.0, 0.0, 0.0});
    HPoint p = HPoint::from_klein({0.3, 0.2, 0.0});
    HPoint refl = point_reflection(o, p);
    auto k = refl.klein();
    REQUIRE(k[0] == Catch::Approx(-0.3).margin(1e-12));
    REQUIRE(k[1] == Catch::Approx(-0.2).margin(1e-12));
    REQUIRE(std::abs(k[2]) < 1e-12);

    oracle::Rng rng(3);
    HPoint center = random_point(rng, 3, 0.5);
    for (int i = 0; i < 100; ++i) {
        HPoint x = random_point(rng, 3);
        HPoint y = random_point(rng, 3);
        HPoint sx = point_reflection(center, x);
        HPoint sy = point_reflection(center, y);
        REQUIRE(hyp_distance(point_reflection(center, sx), x) < 1e-12);
        REQUIRE(std::abs(hyp_distance(sx, sy) - hyp_distance(x, y)) < 1e-9);
        REQUIRE(std::abs(hyp_distance(center, sx) - hyp_distance(center, x)) < 1e-9);
        // Midpoint is the center.
        HPoint mid = geodesic_point(x, sx, 0.5);
        REQUIRE(hyp_distance(mid, center) < 1e-9);
    }
    REQUIRE(hyp_distance(point_reflection(center, center), center) < 1e-12);
}

TEST_CASE("comparison_angle: degenerate cases, equilateral, Euclidean limit") {
    REQUIRE(comparison_angle(1.0, 2.0, 3.0) == Catch::Approx(std::acos(-1.0)).margin(1e-9));
    REQUIRE(comparison_angle(2.0, 1.0, 1.0) == Catch::Approx(0.0).margin(1e-9));

    // Equilateral side 1: verified against an explicit hyperboloid triangle.
    // Oracle: place A at the origin, B at distance 1 on the x axis, and find
    // the direction angle psi with dist(B, C(psi)) = 1 by bisection.
    {
        HPoint A = HPoint::from_klein({0.0, 0.0, 0.0});
        HPoint B = geodesic_point(A, HPoint::from_klein({0.9, 0.0, 0.0}), 1.0 / hyp_distance(A, HPoint::from_klein({0.9, 0.0, 0.0})));
        REQUIRE(hyp_distance(A, B) == Catch::Approx(1.0).margin(1e-12));
        auto C_at = [&](double psi) {
            const double kn = std::tanh(1.0);  // Klein radius of hyperbolic distance 1
            return HPoint::from_klein({kn * std::cos(psi), kn * std::sin(psi), 0.0});
        };
        double lo = 0.0, hi = std::acos(-1.0);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hyp_distance(B, C_at(mid)) < 1.0)
                lo = mid;
            else
                hi = mid;
        }
        const double psi = 0.5 * (lo + hi);
        const double lam = comparison_angle(1.0, 1.0, 1.0);
        REQUIRE(std::abs(lam - psi) < 1e-6);
        REQUIRE(lam == Catch::Approx(0.9187978721780272).margin(1e-6));
        REQUIRE(lam < std::acos(-1.0) / 3.0);
    }

    // Small-scale limit: Euclidean equilateral angle pi/3.
    REQUIRE(comparison_angle(1e-4, 1e-4, 1e-4) ==
            Catch::Approx(std::acos(-1.0) / 3.0).margin(1e-6));

    REQUIRE_THROWS_AS(comparison_angle(1.0, 1.0, 2.1), std::domain_error);
    REQUIRE_THROWS_AS(comparison_angle(1.0, 2.0, 0.5), std::domain_error);
}

TEST_CASE("comparison_angle monotone for hinge in H^2 itself") {
    // In constant curvature -1 the comparison angle is exactly constant along
    // geodesic hinges; sanity-check that lambda(a,b) is nonincreasing as a, b
    // grow for a genuine hyperbolic hinge.
    HPoint A = HPoint::from_klein({0.0, 0.0});
    const double ang = 1.1;
    auto leg = [&](double ang0, double d) {
        const double kr = std::tanh(d);
        return HPoint::from_klein({kr * std::cos(ang0), kr * std::sin(ang0)});
    };
    double prev = -1.0;
    for (double s = 0.1; s <= 0.8; s += 0.1) {
        HPoint y = leg(0.0, s);
        HPoint z = leg(ang, s);
        const double lam = comparison_angle(s, s, hyp_distance(y, z));
        if (prev >= 0.0) REQUIRE(lam <= prev + 1e-9);
        REQUIRE(std::abs(lam - ang) < 1e-9);
        prev = lam;
    }
}
