#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "erg/circle.hpp"
#include "erg/errors.hpp"
#include "erg/io.hpp"
#include "erg/plmap.hpp"

using namespace erg;

namespace {

PLMap doubling() { return PLMap::linear(2, 0.0); }

}  // namespace

TEST_CASE("wrap and circle metric") {
    CHECK(wrap(1.25) == doctest::Approx(0.25));
    CHECK(wrap(-0.25) == doctest::Approx(0.75));
    CHECK(circle_dist(0.1, 0.9) == doctest::Approx(0.2));
    CHECK(circle_dist(0.0, 0.5) == doctest::Approx(0.5));
    CHECK(circle_delta(0.9, 0.1) == doctest::Approx(0.2));
}

TEST_CASE("arc membership and constructions") {
    Arc a(0.0, 0.1, true);
    CHECK(a.contains(0.05));
    CHECK(a.contains(0.95));
    CHECK(a.contains(0.1));
    CHECK_FALSE(a.contains(0.2));
    Arc open(0.0, 0.1, false);
    CHECK_FALSE(open.contains(0.1));
    Arc b = Arc::between(0.9, 0.1);
    CHECK(b.center == doctest::Approx(0.0));
    CHECK(b.radius == doctest::Approx(0.1));
    Arc u = arc_union(Arc(0.1, 0.1), Arc(0.25, 0.1));
    CHECK(u.contains(0.0));
    CHECK(u.contains(0.35));
    CHECK_FALSE(u.contains(0.5));
    CHECK_THROWS_AS(arc_union(Arc(0.0, 0.05), Arc(0.5, 0.05)), Error);
}

TEST_CASE("eval: doubling, identity, degree 3") {
    CHECK(doubling()(0.3) == doctest::Approx(0.6));
    CHECK(PLMap::identity()(0.77) == doctest::Approx(0.77));
    PLMap f3;
    f3.degree = 3;
    f3.breakpoints = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    f3.lift_values = {0.0, 1.0, 2.0, 3.0};
    f3.validate();
    CHECK(f3(0.5) == doctest::Approx(0.5));  // 1.5 mod 1
}

TEST_CASE("preimages: doubling, identity, two-slope map, dense-scan oracle") {
    auto p = doubling().preimages(0.5);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.75));

    auto q = PLMap::identity().preimages(0.1);
    REQUIRE(q.size() == 1);
    CHECK(q[0] == doctest::Approx(0.1));

    PLMap g;  // degree 2, slopes {4, 4/3} on [0,1/4] and [1/4,1]
    g.degree = 2;
    g.breakpoints = {0.0, 0.25, 1.0};
    g.lift_values = {0.0, 1.0, 2.0};
    g.validate();
    auto r = g.preimages(0.5);
    CHECK(r.size() == 2);
    // Dense-scan oracle: no solution farther than 1e-6 from a reported one.
    const int N = 1000000;
    for (int i = 0; i < N; ++i) {
        double x = static_cast<double>(i) / N;
        if (circle_dist(g(x), 0.5) < 1e-7) {
            double best = 1.0;
            for (double rr : r) best = std::min(best, circle_dist(rr, x));
            CHECK(best < 1e-6);
        }
    }
    for (double rr : r) CHECK(circle_dist(g(rr), 0.5) < 1e-12);

    PLMap flat;
    flat.degree = 1;
    flat.breakpoints = {0.0, 0.5, 1.0};
    flat.lift_values = {0.0, 0.0, 1.0};
    CHECK_THROWS_AS(flat.preimages(0.2), Error);
}

TEST_CASE("c0_distance: identity cases and local displacement") {
    PLMap f = doubling();
    CHECK(c0_distance(f, f) == doctest::Approx(0.0));
    CHECK(c0_distance(PLMap::identity(), PLMap::rotation(0.1)) == doctest::Approx(0.1));
    CHECK(c0_distance(PLMap::rotation(0.1), PLMap::identity()) == doctest::Approx(0.1));
    // Antipodal rotation: the sup is the metric's maximum 1/2.
    CHECK(c0_distance(PLMap::identity(), PLMap::rotation(0.5)) == doctest::Approx(0.5));

    LocalHomeo t = LocalHomeo::knot(Arc::from_endpoints(0.4, 0.8), 0.6, 0.63);
    PLMap g = compose_local(f, t);
    CHECK(c0_distance(f, g) == doctest::Approx(0.03));
}

TEST_CASE("compose_local agrees with pointwise composition") {
    PLMap f = doubling();
    LocalHomeo t = LocalHomeo::knot(Arc(0.6, 0.15, true), 0.58, 0.66);
    PLMap g = compose_local(f, t);
    CHECK(g.degree == 2);
    for (int i = 0; i < 10000; ++i) {
        double x = static_cast<double>(i) / 10000.0;
        CHECK(circle_dist(g(x), t(f(x))) < 1e-12);
    }
    // T = identity leaves the map unchanged.
    PLMap h = compose_local(f, LocalHomeo::identity());
    CHECK(c0_distance(f, h) == doctest::Approx(0.0));
    // f = identity: the composition is the homeomorphism itself.
    LocalHomeo m = LocalHomeo::knot(Arc::from_endpoints(0.3, 0.7), 0.5, 0.4);
    CHECK(compose_local(PLMap::identity(), m)(0.5) == doctest::Approx(0.4));
}

TEST_CASE("pl_approximate: PL inputs pass through, plateaus get tilted") {
    SampledMap s = SampledMap::from_plmap(doubling(), 256);
    PLMap g = pl_approximate(s, 0.1);
    CHECK(c0_distance(g, doubling()) < 1e-9);
    CHECK(g.degree == 2);

    SampledMap r = SampledMap::from_plmap(PLMap::rotation(0.25), 256);
    PLMap gr = pl_approximate(r, 0.01);
    CHECK(c0_distance(gr, PLMap::rotation(0.25)) < 1e-9);

    // Degree-1 map with a flat plateau on [0.25, 0.5].
    PLMap plateau;
    plateau.degree = 1;
    plateau.breakpoints = {0.0, 0.25, 0.5, 1.0};
    plateau.lift_values = {0.0, 0.5, 0.5, 1.0};
    SampledMap ps = SampledMap::from_plmap(plateau, 1024);
    ps.lipschitz = 2.0;
    PLMap gp = pl_approximate(ps, 0.05);
    CHECK(gp.min_abs_slope() >= 0.99e-3);
    CHECK(gp.finite_preimages());
    CHECK(gp.degree == 1);
    double dev = 0.0;
    for (int i = 0; i < 1024; ++i) {
        double x = static_cast<double>(i) / 1024.0;
        dev = std::max(dev, circle_dist(gp(x), plateau(x)));
    }
    CHECK(dev < 0.05);
    CHECK_NOTHROW((void)gp.preimages(0.5));
}

TEST_CASE("randomized sampled endomorphisms stay approximable") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        int deg = 1 + static_cast<int>(rng() % 2);
        double a = 0.3 * uni(rng);
        double ph = uni(rng);
        bool plateau = trial % 3 == 0;
        auto lift = [&](double t) {
            double v = deg * t + a * std::sin(2.0 * M_PI * (t + ph)) / (2.0 * M_PI) * 2.0;
            if (plateau && t > 0.4 && t < 0.5) v = deg * 0.4;  // flat shelf
            return v;
        };
        SampledMap s;
        s.degree = deg;
        s.lipschitz = deg + 2.0 * a + 1.0;
        const int n = 2048;
        double prev = lift(0.0);
        s.lift_samples.resize(n);
        for (int i = 0; i < n; ++i) {
            double v = lift(static_cast<double>(i) / n);
            prev = std::max(prev, v);  // monotonize so the lift is nondecreasing
            s.lift_samples[static_cast<std::size_t>(i)] = prev;
        }
        PLMap g = pl_approximate(s, 0.05);
        CHECK(g.finite_preimages());
        CHECK(g.degree == deg);
        auto pre = g.preimages(uni(rng));
        CHECK(pre.size() <= g.pieces());
        double dev = 0.0;
        for (int i = 0; i < n; ++i)
            dev = std::max(dev, circle_dist(g(static_cast<double>(i) / n),
                                            wrap(s.lift_samples[static_cast<std::size_t>(i)])));
        CHECK(dev < 0.05);
    }
}

TEST_CASE("map JSON round trip") {
    PLMap g;
    g.degree = 2;
    g.breakpoints = {0.0, 0.25, 1.0};
    g.lift_values = {0.1, 1.1, 2.1};
    g.validate();
    PLMap h = plmap_from_json(plmap_to_json(g));
    CHECK(c0_distance(g, h) == doctest::Approx(0.0));
    CHECK(h.degree == 2);
}

TEST_CASE("periodic points survive composition with a knot") {
    PLMap f = PLMap::rotation(0.49);  // f^2 shifts by -0.02
    double x0 = 0.25;
    double src = f.iterate(x0, 2);
    Arc supp = Arc::between(src, x0);
    supp.radius += 0.02;
    LocalHomeo t = LocalHomeo::knot(supp, src, x0);
    PLMap g = compose_local(f, t);
    CHECK(circle_dist(g.iterate(x0, 2), x0) < 1e-12);
}
