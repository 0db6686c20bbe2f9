#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "quasifix/contraction.hpp"
#include "quasifix/generate.hpp"
#include "quasifix/picard.hpp"
#include "test_support.hpp"

using namespace quasifix;
using testing::five_point_map;
using testing::five_point_space;

namespace {

FiniteMetricSpace uniform_space(Index n) {
    Matrix d = Matrix::Constant(n, n, 1.0);
    d.diagonal().setZero();
    std::vector<std::string> labels;
    for (Index i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
    return FiniteMetricSpace{std::move(labels), std::move(d)};
}

}  // namespace

TEST_CASE("iteration reaches the fixed point of the five point example") {
    const FiniteMetricSpace s = five_point_space();
    const SelfMap T = five_point_map();

    const IterationTrace from4 = iterate(s, T, 3, 50);
    CHECK(from4.status == IterationStatus::fixed_point_found);
    CHECK(from4.steps == std::vector<Index>{3, 1, 0, 0});
    CHECK(from4.residuals == std::vector<double>{1.0, 1.0, 0.0});
    CHECK(from4.point == 0);
    CHECK(from4.step_count == 2);

    const IterationTrace from1 = iterate(s, T, 0, 50);
    CHECK(from1.status == IterationStatus::fixed_point_found);
    CHECK(from1.steps == std::vector<Index>{0, 0});
    CHECK(from1.step_count == 0);

    for (Index x = 0; x < 5; ++x) {
        const IterationTrace t = iterate(s, T, x, 50);
        CHECK(t.status == IterationStatus::fixed_point_found);
        CHECK(t.point == 0);
        CHECK(t.step_count <= 2);
    }
    CHECK(find_fixed_points(s, T) == std::vector<Index>{0});
}

TEST_CASE("cycles and iteration caps are reported as such") {
    const FiniteMetricSpace s = uniform_space(3);

    const SelfMap swap{{1, 0, 2}};
    const IterationTrace t = iterate(s, swap, 0, 50);
    CHECK(t.status == IterationStatus::cycle_detected);
    CHECK(t.cycle == std::vector<Index>{0, 1});
    CHECK(t.point == -1);

    const SelfMap chain{{1, 2, 2}};
    const IterationTrace capped = iterate(s, chain, 0, 1);
    CHECK(capped.status == IterationStatus::max_iters_exceeded);
    CHECK(capped.steps == std::vector<Index>{0, 1});

    const SelfMap rotate{{1, 2, 0}};
    const IterationTrace rotated = iterate(s, rotate, 1, 50);
    CHECK(rotated.status == IterationStatus::cycle_detected);
    CHECK(rotated.cycle == std::vector<Index>{1, 2, 0});

    CHECK_THROWS_AS(iterate(s, chain, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(iterate(s, chain, 5, 10), std::out_of_range);
}

TEST_CASE("every start terminates once the cap covers the space") {
    SplitMix64 rng(606);
    for (int trial = 0; trial < 60; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.next_below(8));
        const FiniteMetricSpace s = generate_space(n, 0.4, rng.next());
        const SelfMap T = random_self_map(n, rng);
        for (Index x = 0; x < n; ++x) {
            const IterationTrace t = iterate(s, T, x, n + 1);
            CHECK(t.status != IterationStatus::max_iters_exceeded);
            for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
                CHECK(T(t.steps[i]) == t.steps[i + 1]);
                CHECK(t.residuals[i] == s.dist(t.steps[i], t.steps[i + 1]));
            }
            if (t.status == IterationStatus::fixed_point_found) {
                CHECK(T(t.point) == t.point);
                CHECK(t.steps[static_cast<std::size_t>(t.step_count)] == t.point);
            } else {
                REQUIRE(t.cycle.size() >= 2);
                for (std::size_t i = 0; i < t.cycle.size(); ++i)
                    CHECK(T(t.cycle[i]) == t.cycle[(i + 1) % t.cycle.size()]);
            }
        }
    }
}

TEST_CASE("a-priori bound values and validation") {
    CHECK(a_priori_bound(0.5, 0, 1.0) == 2.0);
    CHECK(a_priori_bound(0.5, 1, 1.0) == 1.0);
    CHECK(a_priori_bound(0.5, 3, 1.0) == 0.25);
    CHECK(a_priori_bound(0.0, 0, 3.0) == 3.0);
    CHECK(a_priori_bound(0.0, 2, 3.0) == 0.0);

    CHECK_THROWS_AS(a_priori_bound(1.0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(a_priori_bound(-0.1, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(a_priori_bound(0.5, -1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(a_priori_bound(0.5, 1, -1.0), std::invalid_argument);
}

TEST_CASE("a-priori bound holds with equality cases on the example") {
    const FiniteMetricSpace s = five_point_space();
    const SelfMap T = five_point_map();
    const double q = minimal_q(s, T, TermSet::generalized()).minimal_q;
    REQUIRE(q == 0.5);

    const Index xstar = find_fixed_points(s, T).front();
    for (Index x = 0; x < 5; ++x) {
        const double d0 = s.dist(x, T(x));
        const Orbit o = orbit(s, T, x, 10);
        for (Index n = 0; n <= 10; ++n) {
            const double bound = a_priori_bound(q, n, d0);
            const double actual = s.dist(o.points[static_cast<std::size_t>(n)], xstar);
            const BoundCertificate c = make_certificate(n, -1, bound, actual, 0.0);
            CHECK(c.holds);
        }
    }
    CHECK(s.dist(3, xstar) == a_priori_bound(q, 0, s.dist(3, T(3))));
    CHECK(s.dist(T(3), xstar) == a_priori_bound(q, 1, s.dist(3, T(3))));
}

TEST_CASE("certificates compare against bound plus tolerance") {
    CHECK(make_certificate(0, -1, 1.0, 1.0, 0.0).holds);
    CHECK_FALSE(make_certificate(0, -1, 1.0, 1.0 + 1e-12, 0.0).holds);
    CHECK(make_certificate(0, -1, 1.0, 1.0 + 1e-12, 1e-9).holds);
    const BoundCertificate c = make_certificate(3, 7, 2.0, 1.0, 0.0);
    CHECK(c.n == 3);
    CHECK(c.m == 7);
    CHECK(c.bound_value == 2.0);
    CHECK(c.actual_distance == 1.0);
}

TEST_CASE("power bound golden: contractive square, non-contractive base") {
    const FiniteMetricSpace s = uniform_space(3);
    const SelfMap T{{1, 2, 2}};

    const double q1 = minimal_q(s, T, TermSet::generalized(), 1).minimal_q;
    const double q2 = minimal_q(s, T, TermSet::generalized(), 2).minimal_q;
    CHECK(q1 == 1.0);
    CHECK(q2 == 0.0);

    const Orbit o = orbit(s, T, 0, 6);
    const std::vector<double> gaps{s.dist(o.points[0], o.points[2]),
                                   s.dist(o.points[1], o.points[3])};
    CHECK(gaps == std::vector<double>{1.0, 1.0});
    const Index xstar = find_fixed_points(s, T).front();
    for (Index n = 0; n <= 6; ++n) {
        const double bound = power_bound(q2, 2, n, gaps);
        const double actual = s.dist(o.points[static_cast<std::size_t>(n)], xstar);
        CHECK(make_certificate(n, -1, bound, actual, 0.0).holds);
    }
    CHECK(power_bound(q2, 2, 0, gaps) == 1.0);
    CHECK(power_bound(q2, 2, 2, gaps) == 0.0);
}

TEST_CASE("power bound reduces to the a-priori bound at power one") {
    SplitMix64 rng(707);
    for (int trial = 0; trial < 50; ++trial) {
        const double q = 0.9 * rng.next_unit();
        const double d0 = 5.0 * rng.next_unit();
        const Index n = static_cast<Index>(rng.next_below(20));
        CHECK(power_bound(q, 1, n, {d0}) == a_priori_bound(q, n, d0));
    }
    CHECK_THROWS_AS(power_bound(0.5, 2, 1, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(power_bound(0.5, 0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(power_bound(1.0, 1, 1, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(power_bound(0.5, 1, 1, {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(power_bound(0.5, 1, -1, {1.0}), std::invalid_argument);
}

TEST_CASE("orbit diameter bound and its witness on the example") {
    const FiniteMetricSpace s = five_point_space();
    const SelfMap T = five_point_map();

    const BoundCertificate c = orbit_diameter_bound_check(s, T, 3, 10, 0.5, 0.0);
    CHECK(c.holds);
    CHECK(c.bound_value == 2.0);
    CHECK(c.actual_distance == 2.0);

    const std::optional<Index> w = diameter_witness(s, T, 3, 10);
    REQUIRE(w.has_value());
    CHECK(*w == 2);
    CHECK(s.dist(3, orbit(s, T, 3, 10).points[static_cast<std::size_t>(*w)]) == 2.0);

    const std::optional<Index> at_base = diameter_witness(s, T, 0, 10);
    REQUIRE(at_base.has_value());
    CHECK(*at_base == 0);

    CHECK_THROWS_AS(orbit_diameter_bound_check(s, T, 3, 10, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("a diameter witness can be absent for arbitrary maps") {
    Matrix d(3, 3);
    d << 0, 1, 1,
         1, 0, 2,
         1, 2, 0;
    REQUIRE(validate_metric(d).valid());
    const FiniteMetricSpace s{{"a", "b", "c"}, d};
    const SelfMap T{{1, 2, 2}};
    const Orbit o = orbit(s, T, 0, 4);
    CHECK(diameter(s, o.points) == 2.0);
    CHECK(s.dist(0, 1) == 1.0);
    CHECK(s.dist(0, 2) == 1.0);
    CHECK_FALSE(diameter_witness(s, T, 0, 4).has_value());
}

TEST_CASE("cauchy estimates on the example hold with zero slack") {
    const FiniteMetricSpace s = five_point_space();
    const SelfMap T = five_point_map();
    const auto certs = cauchy_estimate_check(s, T, 3, 0.5, 8, 0.0);
    REQUIRE(certs.size() == 28);
    CHECK(certs.front().n == 1);
    CHECK(certs.front().m == 2);
    CHECK(certs.front().bound_value == 1.0);
    CHECK(certs.front().actual_distance == 1.0);
    for (const BoundCertificate& c : certs) {
        CHECK(c.holds);
        CHECK(c.n >= 1);
        CHECK(c.n < c.m);
        CHECK(c.m <= 8);
    }
    CHECK_THROWS_AS(cauchy_estimate_check(s, T, 3, 1.5, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cauchy_estimate_check(s, T, 3, 0.5, 0, 0.0), std::invalid_argument);
}

TEST_CASE("guarantees hold across seeded contractive instances") {
    SplitMix64 rng(808);
    int contractive_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 3 + static_cast<Index>(rng.next_below(6));
        const FiniteMetricSpace s = generate_space(n, 0.4, rng.next());
        const SelfMap T = hub_biased_self_map(s, rng);
        const ContractionReport r = minimal_q(s, T, TermSet::generalized());
        if (!r.contractive) continue;
        ++contractive_seen;
        const double q = r.minimal_q;

        const std::vector<Index> fps = find_fixed_points(s, T);
        REQUIRE(fps.size() == 1);
        const Index xstar = fps.front();
        const Index horizon = 2 * n;

        for (Index x = 0; x < n; ++x) {
            const IterationTrace t = iterate(s, T, x, 10 * n);
            CHECK(t.status == IterationStatus::fixed_point_found);
            CHECK(t.point == xstar);

            const double d0 = s.dist(x, T(x));
            const Orbit o = orbit(s, T, x, horizon);
            for (Index k = 0; k <= horizon; ++k) {
                const double actual = s.dist(o.points[static_cast<std::size_t>(k)], xstar);
                CHECK(actual <= a_priori_bound(q, k, d0) + kDefaultBoundTolerance);
            }
            CHECK(orbit_diameter_bound_check(s, T, x, horizon, q).holds);
            CHECK(diameter_witness(s, T, x, horizon).has_value());
            for (const BoundCertificate& c : cauchy_estimate_check(s, T, x, q, horizon))
                CHECK(c.holds);
        }
    }
    CHECK(contractive_seen >= 20);
}
