#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "caplab/capacity.hpp"
#include "caplab/cauchy.hpp"
#include "caplab/curvature.hpp"
#include "caplab/generators.hpp"

using namespace caplab;
using std::numbers::pi;

namespace {

void check_feasible(const DiscreteMeasure& witness) {
    const double g = growth_constant(witness).growth_constant;
    CHECK(g <= 1 + 1e-9);
    const double c2 = c2_exact(witness).value;
    CHECK(c2 <= total_mass(witness) * (1 + 1e-9));
}

}  // namespace

TEST_CASE("model capacities") {
    CHECK(exact_capacity_model(ModelShape::parse("disc", 2)).value == 2.0);
    CHECK_FALSE(exact_capacity_model(ModelShape::parse("disc", 2)).comparable_only);
    CHECK(exact_capacity_model(ModelShape::parse("segment", 4)).value == 1.0);
    const auto c = exact_capacity_model(ModelShape::parse("circle", 1));
    CHECK(c.value == doctest::Approx(pi / 2));
    CHECK(c.comparable_only);
    CHECK_THROWS_AS(ModelShape::parse("square", 1), std::invalid_argument);
    CHECK_THROWS_AS(exact_capacity_model(ModelShape::parse("disc", 0)), std::invalid_argument);
}

TEST_CASE("segment bounds bracket the true capacity") {
    const auto seg = arc_length_measure(Segment{{0, 0}, {4, 0}}, 64);
    const auto f61 = lower_bound_curvature(seg);
    CHECK(f61.bound >= 0.25);
    CHECK(f61.bound <= 1.0);
    check_feasible(f61.witness);
    CHECK(f61.functional == doctest::Approx(total_mass(f61.witness)));
    const auto gop = lower_bound_opnorm(seg);
    CHECK(gop.bound >= 0.15);
    CHECK(gop.bound <= 1.5);
    CHECK(upper_bound(seg) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("circle bounds") {
    const auto circle = arc_length_measure(CircleArc::full_circle({0, 0}, 1), 64);
    const auto f61 = lower_bound_curvature(circle);
    const auto gop = lower_bound_opnorm(circle);
    CHECK(f61.bound >= 0.3);
    CHECK(gop.bound >= 0.3);
    CHECK(f61.bound <= 1.0);
    CHECK(gop.bound <= 1.0);
    check_feasible(f61.witness);
    CHECK(upper_bound(circle) <= 1 + circle.resolution_h());
    CHECK(upper_bound(circle) >= 1 - 1e-12);
    // opnorm witness: growth <= 1 and every truncated norm <= 1
    const auto& w = gop.witness;
    CHECK(growth_constant(w).growth_constant <= 1 + 1e-9);
    const auto grid = decade_grid(w.resolution_h(), support_diameter(w));
    CHECK(truncation_norm_profile(w, grid).sup_norm <= 1 + 1e-6);
}

TEST_CASE("lower bounds never exceed upper bounds and the methods agree within a factor 5") {
    std::vector<DiscreteMeasure> corpus{
        arc_length_measure(Segment{{0, 0}, {1, 1}}, 40),
        arc_length_measure(CircleArc({1, 1}, 2, 0.2, 2.5), 40),
        cantor_corner(2).measure,
        cantor_corner(3).measure,
    };
    for (const auto& mu : corpus) {
        const double a = lower_bound_curvature(mu).bound;
        const double b = lower_bound_opnorm(mu).bound;
        const double up = upper_bound(mu) + mu.resolution_h() / 2;
        CHECK(a <= up);
        CHECK(b <= up);
        CHECK(a > 0);
        CHECK(b > 0);
        CHECK(std::max(a, b) / std::min(a, b) <= 5.0);
    }
}

TEST_CASE("bounds are rigid-motion invariant and scale linearly under dilation") {
    const auto mu = arc_length_measure(CircleArc({0, 0}, 1, 0.0, 4.0), 48);
    const double a = lower_bound_curvature(mu).bound;
    const double b = lower_bound_opnorm(mu).bound;
    const double u = upper_bound(mu);
    const auto moved = transform(mu, 0.7, 1.0, {3, -2});
    CHECK(lower_bound_curvature(moved).bound == doctest::Approx(a).epsilon(1e-9));
    CHECK(lower_bound_opnorm(moved).bound == doctest::Approx(b).epsilon(1e-9));
    CHECK(upper_bound(moved) == doctest::Approx(u).epsilon(1e-9));
    const auto dilated = transform(mu, 0.0, 2.5, {0, 0}, 2.5);
    CHECK(lower_bound_curvature(dilated).bound == doctest::Approx(2.5 * a).epsilon(1e-9));
    CHECK(lower_bound_opnorm(dilated).bound == doctest::Approx(2.5 * b).epsilon(1e-9));
    CHECK(upper_bound(dilated) == doctest::Approx(2.5 * u).epsilon(1e-9));
}

TEST_CASE("bounds grow with the set up to the ascent's slack") {
    // The feasible ascent is a heuristic, so a subset can come out slightly
    // above its superset; nested restrictions stay within 5%.
    const double tol = 0.05;
    const std::vector<DiscreteMeasure> sets{arc_length_measure(CircleArc::full_circle({0, 0}, 1), 64),
                                            arc_length_measure(Segment{{0, 0}, {4, 0}}, 65),
                                            cantor_corner(2).measure};
    for (const auto& full : sets) {
        const double lf = lower_bound_curvature(full).bound;
        const double uf = upper_bound(full);
        for (double r = 0.2; r <= 4.0; r += 0.3) {
            const auto sub = restrict(full, {full.atoms().front().point, r});
            CHECK(lower_bound_curvature(sub).bound <= lf * (1 + tol));
            CHECK(upper_bound(sub) <= uf * (1 + 1e-12));
        }
    }
}

TEST_CASE("single points") {
    for (double h : {1e-1, 1e-3}) {
        const DiscreteMeasure dot({{{5, 5}, 1}}, h);
        CHECK(upper_bound(dot) == 0.0);
        CHECK(lower_bound_curvature(dot).bound == doctest::Approx(kCurvatureMethodConstant * h));
        CHECK(lower_bound_opnorm(dot).bound == doctest::Approx(kOpnormMethodConstant * h));
    }
    CHECK_THROWS_AS(lower_bound_curvature(DiscreteMeasure({}, 0.1)), std::invalid_argument);
    CHECK_THROWS_AS(lower_bound_opnorm(DiscreteMeasure({}, 0.1)), std::invalid_argument);
    CHECK_THROWS_AS(upper_bound(DiscreteMeasure({}, 0.1)), std::invalid_argument);
}

TEST_CASE("the ascent never lowers the zero-iteration bound and is deterministic") {
    const auto mu = cantor_corner(2).measure;
    CurvatureBoundOptions zero;
    zero.iterations = 0;
    const double start = lower_bound_curvature(mu, zero).bound;
    const auto full = lower_bound_curvature(mu);
    CHECK(full.bound >= start);
    CHECK(lower_bound_curvature(mu).bound == full.bound);
}

TEST_CASE("capacity_profile") {
    const std::vector<DiscreteMeasure> parts{arc_length_measure(Segment{{0, 0}, {1, 0}}, 16),
                                             arc_length_measure(Segment{{5, 0}, {6, 0}}, 16)};
    const std::vector<Disc> discs{{{100, 100}, 1}, {{3, 0}, 10}, {{0.5, 0}, 1}};
    const auto prof = capacity_profile(parts, discs);
    REQUIRE(prof.summaries.size() == 3);
    REQUIRE(prof.rows.size() == 9);
    // empty disc: zero rows and ratios
    CHECK(prof.rows[0].atoms == 0);
    CHECK(prof.summaries[0].mainc_certified == 0.0);
    CHECK(prof.summaries[0].almadd_estimate == 0.0);
    // the large disc sees both parts; the union row mass is the sum
    CHECK(prof.rows[3].part == -1);
    CHECK(prof.rows[3].mass == doctest::Approx(2.0));
    CHECK(prof.rows[4].mass + prof.rows[5].mass == doctest::Approx(2.0));
    CHECK(prof.rows[3].upper == doctest::Approx(3.0));
    // the small disc sees only the first part
    CHECK(prof.rows[6].atoms == 16);
    CHECK(prof.rows[8].atoms == 0);
    for (const auto& s : prof.summaries) {
        CHECK(s.mainc_certified <= s.mainc_estimate * (1 + 1e-12));
        CHECK(s.almadd_certified <= s.almadd_estimate * (1 + 1e-12));
    }
    std::ostringstream csv;
    write_profile_csv(csv, prof);
    CHECK(csv.str().rfind("disc,part,atoms,mass,lower_curvature_f61,upper_enclosing_disc\n", 0) == 0);
    CHECK_THROWS(capacity_profile(std::vector<DiscreteMeasure>{}, discs));
}
