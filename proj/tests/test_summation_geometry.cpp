#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "caplab/geometry.hpp"
#include "caplab/summation.hpp"

using namespace caplab;
using std::numbers::pi;

namespace {

// Brute force: smallest disc among diametral pair circles and triple circumcircles
// that contain every point.
double brute_enclosing_radius(const std::vector<Point>& pts) {
    auto covers = [&](Point c, double r) {
        for (const auto& p : pts)
            if (distance(p, c) > r * (1 + 1e-12) + 1e-15) return false;
        return true;
    };
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point c = 0.5 * (pts[i] + pts[j]);
            const double r = distance(pts[i], c);
            if (r < best && covers(c, r)) best = r;
            for (std::size_t k = j + 1; k < n; ++k) {
                const Point a = pts[i], b = pts[j], q = pts[k];
                const double d = 2 * (a.x * (b.y - q.y) + b.x * (q.y - a.y) + q.x * (a.y - b.y));
                if (std::abs(d) < 1e-14) continue;
                const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, q2 = q.x * q.x + q.y * q.y;
                const Point cc{(a2 * (b.y - q.y) + b2 * (q.y - a.y) + q2 * (a.y - b.y)) / d,
                               (a2 * (q.x - b.x) + b2 * (a.x - q.x) + q2 * (b.x - a.x)) / d};
                const double rr = distance(a, cc);
                if (rr < best && covers(cc, rr)) best = rr;
            }
        }
    return best;
}

}  // namespace

TEST_CASE("pairwise_sum matches exact sums and is order-stable") {
    std::vector<double> v(1000);
    for (int i = 0; i < 1000; ++i) v[i] = i + 1;
    CHECK(pairwise_sum(v) == 500500.0);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{0.25}) == 0.25);
    std::vector<double> tiny(1 << 16, 0.1);
    CHECK(std::abs(pairwise_sum(tiny) - 6553.6) < 1e-9);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("splitmix64 and derive_seed are deterministic and spread") {
    std::uint64_t s1 = 42, s2 = 42;
    for (int i = 0; i < 10; ++i) CHECK(splitmix64(s1) == splitmix64(s2));
    CHECK(derive_seed(7, 0) == derive_seed(7, 0));
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
    CHECK(unit_interval(0) == 0.0);
    CHECK(unit_interval(~0ULL) < 1.0);
}

TEST_CASE("circumradius_inv_sq closed forms") {
    // equilateral triangle of side 1: R = 1/sqrt(3)
    CHECK(circumradius_inv_sq({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}) == doctest::Approx(3.0).epsilon(1e-14));
    // 3-4-5 right triangle: R = 5/2
    CHECK(circumradius_inv_sq({0, 0}, {3, 0}, {0, 4}) == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(circumradius_inv_sq({0, 0}, {1, 1}, {2, 2}) == 0.0);
    CHECK(circumradius_inv_sq({1, 2}, {1, 2}, {3, 5}) == 0.0);
    CHECK(circumradius_inv_sq({1, 2}, {1, 2}, {1, 2}) == 0.0);
}

TEST_CASE("circumradius_inv_sq is bit-identical under permutations and rigid motions scale as 1/s^2") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 200; ++t) {
        Point p[3] = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const double v = circumradius_inv_sq(p[0], p[1], p[2]);
        CHECK(circumradius_inv_sq(p[0], p[2], p[1]) == v);
        CHECK(circumradius_inv_sq(p[1], p[0], p[2]) == v);
        CHECK(circumradius_inv_sq(p[1], p[2], p[0]) == v);
        CHECK(circumradius_inv_sq(p[2], p[0], p[1]) == v);
        CHECK(circumradius_inv_sq(p[2], p[1], p[0]) == v);
        const double s = 2.5;
        const double scaled = circumradius_inv_sq(s * p[0] + Point{1, -4}, s * p[1] + Point{1, -4}, s * p[2] + Point{1, -4});
        CHECK(scaled == doctest::Approx(v / (s * s)).epsilon(1e-9));
    }
}

TEST_CASE("chord_arc_constant") {
    CHECK(chord_arc_constant(ChordArcCurve({{0, 0}, {1, 0}, {3, 0}})) == doctest::Approx(1.0));
    CHECK(chord_arc_constant(ChordArcCurve({{0, 0}, {1, 0}, {1, 1}})) == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::isinf(chord_arc_constant(ChordArcCurve({{0, 0}, {1, 0}, {0, 0}}))));
}

TEST_CASE("lambda_separated") {
    const std::vector<Disc> discs{{{0, 0}, 1}, {{3, 0}, 1}};
    CHECK(lambda_separated(discs, 1.4));
    CHECK_FALSE(lambda_separated(discs, 1.6));
    CHECK_FALSE(lambda_separated(discs, 1.5));  // strict inequality
    CHECK(lambda_separated(std::vector<Disc>{{{0, 0}, 1}}, 100.0));
}

TEST_CASE("circle_disc_intersection_length closed forms") {
    const auto unit = CircleArc::full_circle({0, 0}, 1);
    // both intersections at x = 3/4
    const double expected = 2 * std::acos(0.75);
    CHECK(circle_disc_intersection_length(unit, {{1.5, 0}, 1.0}) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(circle_disc_intersection_length(unit, {{2, 0}, std::sqrt(2.0)}) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(circle_disc_intersection_length(unit, {{0.1, 0}, 5}) == doctest::Approx(2 * pi));
    CHECK(circle_disc_intersection_length(unit, {{5, 0}, 1}) == 0.0);
    CHECK(circle_disc_intersection_length(unit, {{0, 0}, 0.5}) == 0.0);
    // upper half arc against the disc on the right: only the part with x >= 3/4 and y >= 0
    const CircleArc upper({0, 0}, 1, 0, pi);
    CHECK(circle_disc_intersection_length(upper, {{1.5, 0}, 1.0}) == doctest::Approx(std::acos(0.75)).epsilon(1e-12));
    // arc crossing angle 0
    const CircleArc wrap({0, 0}, 2, -0.5, 0.5);
    CHECK(circle_disc_intersection_length(wrap, {{0, 0}, 3}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("smallest_enclosing_disc against brute force") {
    CHECK(smallest_enclosing_disc(std::vector<Point>{{2, 3}}).radius == 0.0);
    const Disc right = smallest_enclosing_disc(std::vector<Point>{{0, 0}, {4, 0}, {0, 3}});
    CHECK(right.radius == doctest::Approx(2.5));
    CHECK(right.center.x == doctest::Approx(2.0));
    CHECK(right.center.y == doctest::Approx(1.5));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 40; ++t) {
        std::vector<Point> pts(3 + t % 17);
        for (auto& p : pts) p = {u(rng), 0.3 * u(rng) + 0.2 * t};
        const Disc d = smallest_enclosing_disc(pts);
        for (const auto& p : pts) CHECK(distance(p, d.center) <= d.radius * (1 + 1e-12));
        CHECK(d.radius == doctest::Approx(brute_enclosing_radius(pts)).epsilon(1e-9));
    }
}

TEST_CASE("ad_regularity_estimate on a circle") {
    const std::vector<CircleArc> arcs{CircleArc::full_circle({0, 0}, 1)};
    const std::vector<Point> centers{{1, 0}, {0, 1}, {-std::sqrt(0.5), std::sqrt(0.5)}};
    const std::vector<double> radii{0.01, 0.1, 0.5};
    const auto est = ad_regularity_estimate(arcs, centers, radii);
    // H^1(circle ∩ D(x, r)) = 4 asin(r/2) for x on the circle
    CHECK(est.upper == doctest::Approx(4 * std::asin(0.25) / 0.5).epsilon(1e-9));
    CHECK(est.lower == doctest::Approx(4 * std::asin(0.005) / 0.01).epsilon(1e-9));
}
