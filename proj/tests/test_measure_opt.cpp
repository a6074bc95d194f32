#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <set>

#include "erg/measure_opt.hpp"

using namespace erg;

namespace {

PLMap doubling() { return PLMap::linear(2, 0.0); }

Potential cosine(int n = 1 << 14) {
    return Potential::sample([](double x) { return std::cos(2.0 * M_PI * x); }, n, 2.0 * M_PI);
}

}  // namespace

TEST_CASE("ulam model rows are stochastic and supported on images") {
    UlamModel m = build_ulam(doubling(), cosine(), 256);
    for (int i = 0; i < m.bins; ++i) {
        double total = 0.0;
        for (auto& [j, frac] : m.transition[static_cast<std::size_t>(i)]) {
            CHECK(frac >= -1e-12);
            total += frac;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ulam upper bound: constant, doubling+cosine, refinement monotonicity") {
    UlamBound c = ulam_upper_bound(doubling(), Potential::constant(3.25), 64);
    CHECK(c.value == doctest::Approx(3.25));

    UlamBound b = ulam_upper_bound(doubling(), cosine(), 4096);
    CHECK(b.value >= 1.0 - 1e-2);
    CHECK(b.value <= 1.0 + 1e-2);
    CHECK(b.bar > 0.0);
    CHECK(!b.cycle.empty());

    UlamBound coarse = ulam_upper_bound(doubling(), cosine(), 512);
    UlamBound fine = ulam_upper_bound(doubling(), cosine(), 1024);
    CHECK(fine.value <= coarse.value + coarse.bar);
}

TEST_CASE("ulam upper bound dominates every enumerated periodic orbit") {
    PLMap f = doubling();
    Potential phi = cosine();
    UlamBound b = ulam_upper_bound(f, phi, 1024);
    for (const Orbit& o : periodic_orbits(f, 5)) {
        double s = 0.0;
        for (double x : o.points) s += phi(x);
        CHECK(s / o.period <= b.value + b.bar + 1e-9);
    }
}

TEST_CASE("rotation upper bound stays near the Lebesgue average") {
    // Unique invariant measure (Lebesgue), true optimum 0.  The cycle
    // relaxation overshoots by the per-step bin slack, so the assertion is
    // deliberately loose and one-sided exact from below.
    PLMap rot = PLMap::rotation(0.6180339887498949);
    UlamBound b = ulam_upper_bound(rot, cosine(), 4096);
    CHECK(b.value >= -1e-9);
    CHECK(b.value <= 0.35);
    UlamBound fine = ulam_upper_bound(rot, cosine(), 8192);
    CHECK(fine.value <= b.value + b.bar);
}

TEST_CASE("periodic orbit enumeration on the doubling map") {
    auto p1 = periodic_orbits(doubling(), 1);
    REQUIRE(p1.size() == 1);
    CHECK(p1[0].points[0] == doctest::Approx(0.0));

    auto p2 = periodic_orbits(doubling(), 2);
    REQUIRE(p2.size() == 2);
    CHECK(p2[1].period == 2);
    CHECK(p2[1].points[0] == doctest::Approx(1.0 / 3.0));
    CHECK(p2[1].points[1] == doctest::Approx(2.0 / 3.0));

    // p <= p' inclusion for fixed points.
    auto p3 = periodic_orbits(doubling(), 3);
    bool has_fixed = false;
    for (auto& o : p3)
        if (o.period == 1 && circle_dist(o.points[0], 0.0) < 1e-9) has_fixed = true;
    CHECK(has_fixed);
    // #periodic points of period dividing p is 2^p - 1 for the doubling map.
    int count3 = 0;
    for (auto& o : p3)
        if (3 % o.period == 0) count3 += o.period;
    CHECK(count3 == 7);
}

TEST_CASE("degree-3 map: orbit count matches a dense fixed-point scan") {
    PLMap f3;
    f3.degree = 3;
    f3.breakpoints = {0.0, 0.4, 1.0};
    f3.lift_values = {0.05, 1.25, 3.05};
    f3.validate();
    auto orbits = periodic_orbits(f3, 3);
    std::set<long long> pts;
    for (auto& o : orbits)
        if (3 % o.period == 0)
            for (double x : o.points) pts.insert(std::llround(x * 1e7));
    // Oracle: scan f^3 for fixed points on a dense grid.
    int scan_count = 0;
    const int N = 3000000;
    double prev_gap = circle_delta(0.0, f3.iterate(0.0, 3));
    for (int i = 1; i <= N; ++i) {
        double x = static_cast<double>(i) / N;
        double gap = circle_delta(x, f3.iterate(x, 3));
        // Antipodal wrap flips the sign of circle_delta too; only genuine
        // zero crossings (small gap on both sides) count.
        if (((prev_gap <= 0 && gap > 0) || (prev_gap >= 0 && gap < 0)) &&
            std::fabs(prev_gap) < 0.25 && std::fabs(gap) < 0.25)
            ++scan_count;
        prev_gap = gap;
    }
    CHECK(static_cast<int>(pts.size()) == scan_count);
}

TEST_CASE("best periodic average picks the right orbit") {
    PLMap f = doubling();
    LowerBound plus = best_periodic_average(f, cosine(), 2, 1, 200, 200);
    CHECK(plus.periodic_best == doctest::Approx(1.0));
    CHECK(plus.witness.period == 1);

    Potential neg =
        Potential::sample([](double x) { return -std::cos(2.0 * M_PI * x); }, 1 << 14, 2.0 * M_PI);
    LowerBound minus = best_periodic_average(f, neg, 2, 1, 200, 200);
    CHECK(minus.periodic_best == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(minus.witness.period == 2);

    LowerBound zero = best_periodic_average(f, Potential::constant(0.0), 2, 1, 50, 100);
    CHECK(zero.value == doctest::Approx(0.0));
}

TEST_CASE("normalization drives the upper bound to zero") {
    PLMap f = doubling();
    Potential phi = cosine();
    UlamBound b = ulam_upper_bound(f, phi, 2048);
    Potential psi = normalize(phi, b.value);
    UlamBound nb = ulam_upper_bound(f, psi, 2048);
    CHECK(std::fabs(nb.value) <= nb.bar + 1e-9);
    // Constant case is exact.
    Potential c5 = Potential::constant(5.0);
    CHECK(normalize(c5, 5.0).max() == doctest::Approx(0.0));
}

TEST_CASE("ulam csv dump writes the transition table") {
    UlamModel m = build_ulam(doubling(), cosine(1 << 10), 32);
    UlamBound b = ulam_upper_bound(m);
    dump_ulam_csv(m, b, "ulam_test.csv");
    std::FILE* fp = std::fopen("ulam_test.csv", "r");
    REQUIRE(fp != nullptr);
    char head[64] = {0};
    REQUIRE(std::fgets(head, sizeof head, fp) != nullptr);
    CHECK(std::string(head).rfind("from,to,", 0) == 0);
    std::fclose(fp);
    std::remove("ulam_test.csv");
}
