#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <lrharm/bounds.hpp>

#include "support.hpp"

using lrharm::BoundValue;
using lrharm::ConeQuantities;
using lrharm::CouplingPair;
using lrharm::DerivedScales;
using lrharm::Graph;
using lrharm::Kind;

namespace {

DerivedScales unit_scales() {
    DerivedScales s;
    s.norm_x = s.norm_p = s.norm_xp = s.norm_px = 1.0;
    s.tau_rate = 1.0;
    return s;
}

// Naive long-double references for the full-domain tail factors.
double tail_odd_ref(double tau, long a) {
    return static_cast<double>(std::pow(static_cast<long double>(tau), 2.0L * a + 1.0L) *
                               std::cosh(static_cast<long double>(tau)) /
                               std::tgamma(2.0L * a + 2.0L));
}
double tail_even_ref(double tau, long b) {
    return static_cast<double>(std::pow(static_cast<long double>(tau), 2.0L * b) *
                               std::cosh(static_cast<long double>(tau)) /
                               std::tgamma(2.0L * b + 1.0L));
}

ConeQuantities cone_for(int dist, int range, double t, const DerivedScales& s) {
    const Graph g = lrharm::path_graph(dist + 1);
    return lrharm::cone_quantities(g, 0, dist, range, s, t);
}

}  // namespace

TEST_CASE("log-domain special functions match direct evaluation", "[bounds]") {
    for (double tau : {0.0, 0.3, 1.0, 5.0, 20.0}) {
        CHECK_THAT(lrharm::log_cosh(tau),
                   Catch::Matchers::WithinAbs(std::log(std::cosh(tau)), 1e-13));
    }
    CHECK_THAT(lrharm::log_cosh(800.0),
               Catch::Matchers::WithinRel(800.0 - std::numbers::ln2, 1e-14));
    CHECK(lrharm::log_cosh(-3.0) == lrharm::log_cosh(3.0));

    CHECK_THAT(lrharm::log_sinh(1.0),
               Catch::Matchers::WithinAbs(std::log(std::sinh(1.0)), 1e-13));
    CHECK_THAT(lrharm::log_sinh(700.0),
               Catch::Matchers::WithinRel(700.0 - std::numbers::ln2, 1e-14));
    CHECK(lrharm::log_sinh(0.0) == -lrharm::kInf);
    CHECK_THROWS_AS(lrharm::log_sinh(-0.1), std::domain_error);

    long double fact = 1.0L;
    for (long k = 1; k <= 20; ++k) {
        fact *= static_cast<long double>(k);
        CHECK_THAT(lrharm::log_factorial(k),
                   Catch::Matchers::WithinRel(static_cast<double>(std::log(fact)), 1e-13));
    }
    CHECK(lrharm::log_factorial(0) == 0.0);
    CHECK_THROWS_AS(lrharm::log_factorial(-1), std::invalid_argument);
}

TEST_CASE("zeta values agree with closed forms", "[bounds]") {
    const double pi = std::numbers::pi;
    CHECK_THAT(lrharm::riemann_zeta(2.0),
               Catch::Matchers::WithinAbs(pi * pi / 6.0, 1e-12));
    CHECK_THAT(lrharm::riemann_zeta(4.0),
               Catch::Matchers::WithinAbs(std::pow(pi, 4) / 90.0, 1e-12));
    CHECK_THAT(lrharm::riemann_zeta(6.0),
               Catch::Matchers::WithinAbs(std::pow(pi, 6) / 945.0, 1e-12));
    CHECK_THAT(lrharm::riemann_zeta(3.0),
               Catch::Matchers::WithinAbs(1.2020569031595943, 1e-12));
    CHECK_THAT(lrharm::riemann_zeta(1.5),
               Catch::Matchers::WithinAbs(2.6123753486854883, 1e-12));
    CHECK_THAT(lrharm::riemann_zeta(30.0),
               Catch::Matchers::WithinRel(1.0 + std::pow(2.0, -30.0) + std::pow(3.0, -30.0),
                                          1e-14));
    CHECK(lrharm::riemann_zeta(2.0) > lrharm::riemann_zeta(2.5));
    CHECK_THROWS_AS(lrharm::riemann_zeta(1.0), std::domain_error);
    CHECK_THROWS_AS(lrharm::riemann_zeta(0.5), std::domain_error);
}

TEST_CASE("cone quantities use exact integer arithmetic", "[bounds]") {
    const DerivedScales s = unit_scales();

    const ConeQuantities q = cone_for(5, 2, 0.25, s);
    CHECK(q.d == 2.5);
    CHECK(q.b == 2);       // ceil(5/4)
    CHECK(q.a == 1);       // ceil(3/4)
    CHECK(q.ceil_d == 3);  // ceil(5/2)
    CHECK(q.a_p1 == 2);
    CHECK(q.tau == 0.25);
    CHECK(q.inside_cone);     // e/4 < 2.5
    CHECK(q.inside_cone_p1);  // e/4 < 5

    const ConeQuantities hot = cone_for(3, 1, 2.0, s);
    CHECK(hot.d == 3.0);
    CHECK(hot.b == 2);
    CHECK(hot.a == 1);
    CHECK(hot.ceil_d == 3);
    CHECK(hot.a_p1 == 2);
    CHECK_FALSE(hot.inside_cone);  // 2e > 3
    CHECK(hot.inside_cone_p1);     // 2e < 6

    // tau = 0 sits inside every cone with positive distance.
    const ConeQuantities rest = cone_for(4, 1, 0.0, s);
    CHECK(rest.inside_cone);
    CHECK(rest.inside_cone_p1);

    // Coincident vertices: all indices collapse to zero, no cone applies.
    const Graph g4 = lrharm::path_graph(4);
    const ConeQuantities diag = lrharm::cone_quantities(g4, 2, 2, 1, s, 0.3);
    CHECK(diag.d == 0.0);
    CHECK(diag.a == 0);
    CHECK(diag.b == 0);
    CHECK(diag.ceil_d == 0);
    CHECK(diag.a_p1 == 0);
    CHECK_FALSE(diag.inside_cone);
    CHECK_FALSE(diag.inside_cone_p1);

    // Property: the exact integers equal the floating-point ceilings.
    const Graph g24 = lrharm::path_graph(24);
    for (int dist = 0; dist <= 23; ++dist)
        for (int range : {1, 2, 3, 4}) {
            const ConeQuantities cc = lrharm::cone_quantities(g24, 0, dist, range, s, 0.1);
            const double dd = static_cast<double>(dist) / range;
            CHECK(cc.d == dd);
            CHECK(cc.b == static_cast<long>(std::ceil(dd / 2.0 - 1e-12)));
            CHECK(cc.a == std::max(0L, static_cast<long>(std::ceil((dd - 1.0) / 2.0 - 1e-12))));
            CHECK(cc.ceil_d == static_cast<long>(std::ceil(dd - 1e-12)));
            CHECK(cc.a_p1 == std::max(0L, cc.ceil_d - 1));
        }

    CHECK_THROWS_AS(cone_for(2, 0, 0.1, s), std::invalid_argument);
    const Graph disconnected(2, {});
    CHECK_THROWS_AS(lrharm::cone_quantities(disconnected, 0, 1, 1, s, 0.1), std::domain_error);
}

TEST_CASE("full-domain local bound matches its series-tail formula", "[bounds]") {
    const DerivedScales s = unit_scales();

    // tau = 1, dist = 2: the xp/px bound is cosh(1)/2.
    const ConeQuantities q = cone_for(2, 1, 1.0, s);
    CHECK_THAT(lrharm::bound_local(q, s, Kind::xp),
               Catch::Matchers::WithinAbs(0.77154031740762190, 1e-14));
    CHECK(lrharm::bound_local(q, s, Kind::px) == lrharm::bound_local(q, s, Kind::xp));
    CHECK_THAT(lrharm::bound_local(q, s, Kind::xx),
               Catch::Matchers::WithinRel(tail_odd_ref(1.0, 1), 1e-12));

    // Anisotropic norms scale the xx/pp prefactors independently.
    DerivedScales aniso = unit_scales();
    aniso.norm_x = 9.0;
    aniso.norm_p = 2.0;
    aniso.norm_xp = 4.0;
    aniso.norm_px = 4.0;
    CHECK_THAT(lrharm::bound_local(q, aniso, Kind::xx),
               Catch::Matchers::WithinRel(2.0 / 2.0 * tail_odd_ref(1.0, 1), 1e-12));
    CHECK_THAT(lrharm::bound_local(q, aniso, Kind::pp),
               Catch::Matchers::WithinRel(9.0 / 2.0 * tail_odd_ref(1.0, 1), 1e-12));

    // Deep regime stays finite in log arithmetic: tau = 50, dist = 100.
    const ConeQuantities deep = cone_for(100, 1, 50.0, s);
    const double b_deep = lrharm::bound_local(deep, s, Kind::xx);
    CHECK(std::isfinite(b_deep));
    CHECK_THAT(b_deep, Catch::Matchers::WithinRel(tail_odd_ref(50.0, 50), 1e-9));
    CHECK_THAT(lrharm::bound_local(deep, s, Kind::px),
               Catch::Matchers::WithinRel(tail_even_ref(50.0, 50), 1e-9));

    // tau = 0 collapses: odd kinds vanish, even kinds vanish beyond b >= 1
    // and equal 1 on the diagonal block (b = 0).
    const ConeQuantities rest = cone_for(2, 1, 0.0, s);
    CHECK(lrharm::bound_local(rest, s, Kind::xx) == 0.0);
    CHECK(lrharm::bound_local(rest, s, Kind::xp) == 0.0);
    const Graph g3 = lrharm::path_graph(3);
    const ConeQuantities diag = lrharm::cone_quantities(g3, 1, 1, 1, s, 0.0);
    CHECK(lrharm::bound_local(diag, s, Kind::xp) == 1.0);

    // Degenerate ||PX|| = 0: first admissible term only.
    DerivedScales deg = unit_scales();
    deg.norm_px = 0.0;
    deg.norm_p = 3.0;
    const ConeQuantities near = cone_for(1, 1, 0.5, s);  // a = 0
    CHECK(lrharm::bound_local(near, deg, Kind::xx) == 3.0 * 0.5);
    CHECK(lrharm::bound_local(q, deg, Kind::xx) == 0.0);  // a = 1
}

TEST_CASE("cone-form local bound: frozen value and applicability", "[bounds]") {
    const DerivedScales s = unit_scales();

    // tau = 2/e makes e*tau/d = 1/2 at d = 4: common factor
    // (1/2)^4 / (sqrt(4) * (1 - 1/4)) = 1/24.
    const double t_half = 2.0 / std::numbers::e;
    const ConeQuantities q = cone_for(4, 1, t_half, s);
    const BoundValue common = lrharm::bound_local_cone_common(q);
    REQUIRE(common.applicable());
    CHECK_THAT(common.value, Catch::Matchers::WithinRel(0.041666666666666664, 1e-13));

    // Prefactors: xp/px use the common factor directly; xx is ||P||/sqrt(||PX||) times it.
    DerivedScales aniso = unit_scales();
    aniso.norm_p = 3.0;
    aniso.norm_px = 4.0;
    const BoundValue bxx = lrharm::bound_local_cone(q, aniso, Kind::xx);
    REQUIRE(bxx.applicable());
    CHECK_THAT(bxx.value, Catch::Matchers::WithinRel(1.5 * common.value, 1e-13));
    const BoundValue bxp = lrharm::bound_local_cone(q, aniso, Kind::xp);
    REQUIRE(bxp.applicable());
    CHECK(bxp.value == common.value);

    // Outside the cone, at zero distance, and with degenerate prefactor: n/a.
    const ConeQuantities outside = cone_for(2, 1, 1.5, s);  // e*1.5 > 2
    CHECK_FALSE(lrharm::bound_local_cone_common(outside).applicable());
    const Graph g2 = lrharm::path_graph(2);
    const ConeQuantities zero_d = lrharm::cone_quantities(g2, 0, 0, 1, s, 0.1);
    CHECK_FALSE(lrharm::bound_local_cone_common(zero_d).applicable());
    DerivedScales deg = unit_scales();
    deg.norm_px = 0.0;
    CHECK_FALSE(lrharm::bound_local_cone(q, deg, Kind::xx).applicable());
    CHECK(lrharm::bound_local_cone(q, deg, Kind::xp).applicable());

    // tau = 0 inside the cone gives exactly zero.
    const ConeQuantities rest = cone_for(4, 1, 0.0, s);
    const BoundValue at_rest = lrharm::bound_local_cone_common(rest);
    REQUIRE(at_rest.applicable());
    CHECK(at_rest.value == 0.0);

    // Deep inside the cone the closed form stays finite and positive-decaying.
    double prev = lrharm::kInf;
    for (int dist : {6, 9, 14}) {
        const ConeQuantities c = cone_for(dist, 1, 0.3, s);
        const BoundValue cone = lrharm::bound_local_cone(c, s, Kind::xx);
        REQUIRE(cone.applicable());
        CHECK(std::isfinite(cone.value));
        CHECK(cone.value > 0.0);
        CHECK(cone.value < prev);  // farther pairs get smaller bounds
        prev = cone.value;
    }
}

TEST_CASE("identity-momentum bounds: frozen values and degeneracies", "[bounds]") {
    const DerivedScales s = unit_scales();

    // tau = 1, dist = 3: xp bound is cosh(1)/6! = cosh(1)/720.
    const ConeQuantities q = cone_for(3, 1, 1.0, s);
    CHECK_THAT(lrharm::bound_local_p1(q, s, Kind::xp),
               Catch::Matchers::WithinAbs(0.0021431675483545050, 1e-15));
    CHECK_THAT(lrharm::bound_local_p1(q, s, Kind::xx),
               Catch::Matchers::WithinRel(tail_odd_ref(1.0, 3), 1e-12));
    CHECK_THAT(lrharm::bound_local_p1(q, s, Kind::pp),
               Catch::Matchers::WithinRel(tail_odd_ref(1.0, 2), 1e-12));

    DerivedScales stiff = unit_scales();
    stiff.norm_x = 16.0;
    CHECK_THAT(lrharm::bound_local_p1(q, stiff, Kind::xx),
               Catch::Matchers::WithinRel(tail_odd_ref(1.0, 3) / 4.0, 1e-12));
    CHECK_THAT(lrharm::bound_local_p1(q, stiff, Kind::pp),
               Catch::Matchers::WithinRel(4.0 * tail_odd_ref(1.0, 2), 1e-12));

    // X = 0 degenerates to the exact free kernels.
    DerivedScales free_s = unit_scales();
    free_s.norm_x = 0.0;
    CHECK(lrharm::bound_local_p1(q, free_s, Kind::xx) == 0.0);  // ceil_d = 3
    CHECK(lrharm::bound_local_p1(q, free_s, Kind::pp) == 0.0);
    const Graph g3 = lrharm::path_graph(3);
    const ConeQuantities diag = lrharm::cone_quantities(g3, 1, 1, 1, s, 0.7);
    CHECK(lrharm::bound_local_p1(diag, free_s, Kind::xx) == 0.7);  // |t| on the diagonal
}

TEST_CASE("identity-momentum cone bounds: frozen values and rejections", "[bounds]") {
    const DerivedScales s = unit_scales();

    // e*tau = 2 at d = 2: xx common factor (1/2)^4 / (sqrt(2) * 3/4) = 1/(12 sqrt 2).
    const double t_val = 2.0 / std::numbers::e;
    const ConeQuantities q = cone_for(2, 1, t_val, s);
    const BoundValue bxx = lrharm::bound_local_p1_cone(q, s, Kind::xx);
    REQUIRE(bxx.applicable());
    CHECK_THAT(bxx.value, Catch::Matchers::WithinRel(0.058925565098878960, 1e-13));
    const BoundValue bxp = lrharm::bound_local_p1_cone(q, s, Kind::xp);
    REQUIRE(bxp.applicable());
    CHECK(bxp.value == bxx.value);  // ||X|| = 1 keeps them equal

    DerivedScales stiff = unit_scales();
    stiff.norm_x = 4.0;
    const BoundValue bxx4 = lrharm::bound_local_p1_cone(q, stiff, Kind::xx);
    REQUIRE(bxx4.applicable());
    CHECK_THAT(bxx4.value, Catch::Matchers::WithinRel(bxp.value / 2.0, 1e-13));

    // pp at e*tau = 2, dist = 2: a = 1, z = 2/3, value (4/9)/(5/9) = 4/5.
    const BoundValue bpp = lrharm::bound_local_p1_cone(q, s, Kind::pp);
    REQUIRE(bpp.applicable());
    CHECK_THAT(bpp.value, Catch::Matchers::WithinRel(0.8, 1e-13));

    // pp rejections: a = 0 (dist <= R) and e*tau >= 2a+1.
    const ConeQuantities near = cone_for(1, 1, 0.2, s);
    const BoundValue rej = lrharm::bound_local_p1_cone(near, s, Kind::pp);
    CHECK_FALSE(rej.applicable());
    CHECK(rej.value == lrharm::kInf);
    const ConeQuantities hot = cone_for(2, 1, 1.2, s);  // e*1.2 > 3 = 2a+1
    CHECK_FALSE(lrharm::bound_local_p1_cone(hot, s, Kind::pp).applicable());

    // xx/xp rejections: e*tau >= 2d and zero distance.
    const ConeQuantities wide = cone_for(2, 1, 1.5, s);  // e*1.5 > 4
    CHECK_FALSE(lrharm::bound_local_p1_cone(wide, s, Kind::xx).applicable());
    const Graph g2 = lrharm::path_graph(2);
    const ConeQuantities zero_d = lrharm::cone_quantities(g2, 1, 1, 1, s, 0.1);
    CHECK_FALSE(lrharm::bound_local_p1_cone(zero_d, s, Kind::xx).applicable());

    // X = 0 kills the xx prefactor (1/sqrt(0)); xp stays applicable.
    DerivedScales free_s = unit_scales();
    free_s.norm_x = 0.0;
    CHECK_FALSE(lrharm::bound_local_p1_cone(q, free_s, Kind::xx).applicable());
    CHECK(lrharm::bound_local_p1_cone(q, free_s, Kind::xp).applicable());

    // tau = 0 deep inside: exact zero.
    const ConeQuantities rest = cone_for(3, 1, 0.0, s);
    const BoundValue rest_xx = lrharm::bound_local_p1_cone(rest, s, Kind::xx);
    REQUIRE(rest_xx.applicable());
    CHECK(rest_xx.value == 0.0);
}

TEST_CASE("algebraic-decay scales and bound", "[bounds]") {
    // D = 1, c_D = 2, eta = 3: a0 = 2 * 2^4 * zeta(3) = 32 zeta(3).
    lrharm::DimensionProfile dp;
    dp.dim = 1;
    dp.c_d = 2.0;
    const lrharm::NonlocalScales ns = lrharm::nonlocal_scales(dp, 0.5, 3.0);
    CHECK_THAT(ns.a0, Catch::Matchers::WithinRel(38.465820901107018, 1e-12));
    CHECK_THAT(ns.tau_rate, Catch::Matchers::WithinRel(0.5 * ns.a0, 1e-15));

    CHECK_THROWS_AS(lrharm::nonlocal_scales(dp, 0.5, 1.0), std::domain_error);   // eta <= D
    CHECK_THROWS_AS(lrharm::nonlocal_scales(dp, 0.0, 3.0), std::invalid_argument);
    lrharm::DimensionProfile empty_dp;
    empty_dp.dim = 1;
    empty_dp.c_d = 0.0;
    CHECK_THROWS_AS(lrharm::nonlocal_scales(empty_dp, 0.5, 3.0), std::domain_error);

    const Graph g = lrharm::ring_graph(10);
    const lrharm::DimensionProfile prof = lrharm::dimension_profile(g, 1);
    const CouplingPair cp = lrharm::algebraic_couplings(g, 0.01, 3.0, false, false);
    const lrharm::NonlocalScales real = lrharm::nonlocal_scales(prof, 0.01, 3.0);
    const double t = 0.4;
    const double tau = real.tau_rate * t;
    for (int j : {0, 1, 3, 5}) {
        const int dist = g.dist(0, j);
        const double den = real.a0 * std::pow(1.0 + dist, 3.0);
        CHECK_THAT(lrharm::bound_nonlocal(g, cp, prof, 0, j, t, Kind::xx),
                   Catch::Matchers::WithinRel(std::sinh(tau) / den, 1e-12));
        CHECK_THAT(lrharm::bound_nonlocal(g, cp, prof, 0, j, t, Kind::pp),
                   Catch::Matchers::WithinRel(std::sinh(tau) / den, 1e-12));
        const double delta = j == 0 ? 1.0 : 0.0;
        CHECK_THAT(lrharm::bound_nonlocal(g, cp, prof, 0, j, t, Kind::xp),
                   Catch::Matchers::WithinRel(delta + std::cosh(tau) / den, 1e-12));
    }
    // t = 0: odd kinds zero, even kinds keep the Kronecker delta plus 1/(a0 (1+d)^eta).
    CHECK(lrharm::bound_nonlocal(g, cp, prof, 0, 2, 0.0, Kind::xx) == 0.0);
    CHECK_THAT(lrharm::bound_nonlocal(g, cp, prof, 0, 0, 0.0, Kind::px),
               Catch::Matchers::WithinRel(1.0 + 1.0 / real.a0, 1e-12));

    // Missing metadata and unreachable pairs are rejected.
    const CouplingPair local_cp = lrharm::spring_chain(g, 1.0, 1.0);
    CHECK_THROWS_AS(lrharm::bound_nonlocal(g, local_cp, prof, 0, 1, 0.1, Kind::xx),
                    std::invalid_argument);
}

TEST_CASE("bounds dominate computed kernels on a spring ring", "[bounds]") {
    const Graph g = lrharm::ring_graph(12);
    const CouplingPair cp = lrharm::spring_chain(g, 0.7, 1.1);
    const DerivedScales sc = lrharm::spectral_norms(cp);
    const double t = 2.0 / sc.tau_rate;
    const lrharm::KernelSet ks = lrharm::kernels_series(cp, t, 1e-13);
    const double slack = ks.total_error() + 1e-12;

    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j) {
            const ConeQuantities cq = lrharm::cone_quantities(g, i, j, 1, sc, t);
            for (Kind k : lrharm::kAllKinds) {
                const double exact = std::abs(lrharm::kernel_entry(ks, k, i, j));
                CHECK(exact <= lrharm::bound_local(cq, sc, k) + slack);
                const BoundValue cone = lrharm::bound_local_cone(cq, sc, k);
                if (cone.applicable()) CHECK(exact <= cone.value + slack);
                const BoundValue p1c = lrharm::bound_local_p1_cone(cq, sc, k);
                if (p1c.applicable()) CHECK(exact <= p1c.value + slack);
                CHECK(exact <= lrharm::bound_local_p1(cq, sc, k) + slack);
            }
        }
}

TEST_CASE("power support verification", "[bounds]") {
    const Graph g = lrharm::path_graph(9);
    const CouplingPair cp = lrharm::spring_chain(g, 1.0, 0.8);
    CHECK(lrharm::verify_power_support(g, cp.X, 1, 6));

    const Graph ring = lrharm::ring_graph(11);
    const CouplingPair rcp = lrharm::random_local_couplings(ring, 2, 99, false);
    CHECK(lrharm::verify_power_support(ring, rcp.X, 2, 5));
    CHECK(lrharm::verify_power_support(ring, rcp.P, 2, 5));

    // A matrix denser than the claimed range is rejected up front.
    Eigen::MatrixXd dense = Eigen::MatrixXd::Constant(9, 9, 0.1);
    CHECK_THROWS_AS(lrharm::verify_power_support(g, dense, 1, 3), std::invalid_argument);
}

TEST_CASE("theorem tags round-trip", "[bounds]") {
    for (lrharm::Theorem th :
         {lrharm::Theorem::local, lrharm::Theorem::local_cone, lrharm::Theorem::local_p1,
          lrharm::Theorem::local_p1_cone, lrharm::Theorem::nonlocal})
        CHECK(lrharm::theorem_from_name(lrharm::theorem_name(th)) == th);
    CHECK_THROWS_AS(lrharm::theorem_from_name("bogus"), std::invalid_argument);

    const BoundValue ok = BoundValue::ok(2.5);
    CHECK(ok.applicable());
    CHECK(ok.value == 2.5);
    const BoundValue na = BoundValue::na("because");
    CHECK_FALSE(na.applicable());
    CHECK(na.value == lrharm::kInf);
    CHECK(na.reason == "because");
}
