#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "caplab/curvature.hpp"
#include "caplab/verifier.hpp"

using namespace caplab;

namespace {

bool has_check(const ExperimentResult& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c.passed;
    FAIL("missing check " << name);
    return false;
}

ExperimentResult run(const std::string& name, Json gen = Json::object(), Json est = Json::object(),
                     std::uint64_t seed = 5) {
    RunRequest req;
    req.experiment = name;
    req.seed = seed;
    req.generator = std::move(gen);
    req.estimator = std::move(est);
    return run_experiment(req);
}

}  // namespace

TEST_CASE("Marcinkiewicz sums: two discs and equal chains in closed form") {
    const std::vector<double> r2{1.0, 3.0}, m2{0.5, 2.0};
    const auto s2 = marcinkiewicz_sums(r2, m2);
    CHECK(s2.s1 == doctest::Approx(0.5 * 4.0 / 16.0));
    CHECK(s2.s2 == doctest::Approx(2.0 * 0.25 / 16.0));
    CHECK(s2.total_mass == 2.5);
    for (int n : {2, 10, 100}) {
        const std::vector<double> ones(n, 1.0);
        const auto s = marcinkiewicz_sums(ones, ones);
        double expected = 0;
        for (int d = 1; d < n; ++d) expected += double(n - d) / ((d + 1.0) * (d + 1.0));
        CHECK(s.s1 == doctest::Approx(expected).epsilon(1e-12));
        CHECK(s.s2 == doctest::Approx(expected).epsilon(1e-12));
        CHECK(s.s1 <= s.total_mass);
    }
    CHECK_THROWS(marcinkiewicz_sums(std::vector<double>{1, 2}, std::vector<double>{1}));
}

TEST_CASE("Marcinkiewicz bound holds on random chains with mass <= radius") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1), lr(std::log(0.1), std::log(10.0));
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 60;
        std::vector<double> r(n), m(n);
        for (int i = 0; i < n; ++i) {
            r[i] = std::exp(lr(rng));
            m[i] = r[i] * u(rng);
        }
        const auto s = marcinkiewicz_sums(r, m);
        CHECK(s.s1 <= s.total_mass);
        CHECK(s.s2 <= s.total_mass);
    }
    const auto chain = bead_chain_on_line(std::vector<double>{1, 2, 0.5}, 2.0, PartShape::segment, 1);
    CHECK(marcinkiewicz_check(chain).passed());
}

TEST_CASE("cross ratio") {
    // one part: no cross triples
    const auto single = bead_chain_on_line(std::vector<double>{1.0}, 2.0, PartShape::circle_arc, 3);
    CHECK(cross_ratio(single).rho == 0.0);
    // collinear parts: zero curvature everywhere
    const auto line = bead_chain_on_line(std::vector<double>{1.0, 2.0, 0.7}, 2.0, PartShape::segment, 3);
    CHECK(cross_ratio(line).rho == doctest::Approx(0.0).epsilon(1e-12));
    // arcs moved apart: rho decays
    const std::vector<double> radii{1.0, 1.0};
    BeadChainOptions o;
    o.jitter_min = o.jitter_max = 0.0;
    double prev = 1e300;
    for (double lambda : {2.0, 8.0, 32.0}) {
        const auto chain = bead_chain_on_line(radii, lambda, PartShape::circle_arc, 9, o);
        const auto cr = cross_ratio(chain);
        CHECK(cr.rho >= 0);
        CHECK(cr.rho < prev);
        prev = cr.rho;
        // exact value: c2 of the union minus the parts
        double parts = 0;
        for (const auto& p : chain.parts) parts += c2_exact(p).value;
        CHECK(cr.cross == doctest::Approx(c2_exact(chain.measure()).value - parts).epsilon(1e-9));
    }
    auto heavy = bead_chain_on_line(radii, 2.0, PartShape::segment, 1);
    heavy.parts[0] = scale(heavy.parts[0], 10.0);
    CHECK_THROWS_AS(cross_ratio(heavy), std::invalid_argument);
    const auto check = main_lemma_check(bead_chain_on_line(radii, 2.0, PartShape::circle_arc, 1));
    CHECK(has_check(check, "rho_nonnegative"));
}

TEST_CASE("good indices: two discs by hand") {
    const std::vector<Disc> discs{{{0, 0}, 1}, {{10, 0}, 2}};
    const std::vector<double> gamma{0.25, 0.5};
    const double lambda = 3.0;  // lambda' = 2, gap = 10 - 2*3 = 4
    const auto rep = good_index_values(discs, lambda, gamma);
    CHECK(rep.g[0] == doctest::Approx(2 * 0.5 / 16));
    CHECK(rep.g[1] == doctest::Approx(1 * 0.25 / 16));
    CHECK(rep.fitted_a0 == doctest::Approx((rep.g[0] * 0.25 + rep.g[1] * 0.5) / 0.75));
    CHECK(rep.geometric_a0 == doctest::Approx(std::max(1 * 2.0 / 16, 2 * 1.0 / 16)));
    const auto idx = good_indices(rep, rep.fitted_a0);
    CHECK(idx.size() == 2);
    CHECK(retention(gamma, idx) == doctest::Approx(1.0));
    CHECK(retention(gamma, std::vector<std::size_t>{1}) == doctest::Approx(2.0 / 3));
    CHECK(good_indices(rep, 0.0).empty());
    CHECK_THROWS(good_index_values(discs, 9.0, gamma));
    // a single disc keeps everything
    const std::vector<Disc> one{{{0, 0}, 1}};
    const std::vector<double> g1{0.25};
    const auto r1 = good_index_values(one, 2.0, g1);
    CHECK(r1.g[0] == 0.0);
    CHECK(retention(g1, good_indices(r1, r1.fitted_a0)) == 1.0);
}

TEST_CASE("good indices: the geometric A0 dominates the fitted one on random chains") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> lr(std::log(0.1), std::log(10.0)), ll(1.1, 4.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> radii(2 + t % 40);
        for (auto& r : radii) r = std::exp(lr(rng));
        const auto chain = bead_chain_on_line(radii, ll(rng), PartShape::segment, t, BeadChainOptions{2});
        const auto rep = good_index_values(chain.discs, chain.lambda, chain.part_gamma);
        CHECK(rep.fitted_a0 <= rep.geometric_a0 * (1 + 1e-12));
        CHECK(good_index_selection(chain).passed());
    }
    const auto cloud = bead_chain_on_line(std::vector<double>{1, 1}, 2.0, PartShape::point_cloud, 1);
    CHECK_THROWS(good_index_selection(cloud));
}

TEST_CASE("disc sampling") {
    const auto mu = arc_length_measure(Segment{{0, 0}, {4, 0}}, 32);
    DiscSamplerOptions o;
    o.max_centers = 40;
    o.radii_per_decade = 4;
    const auto discs = sample_discs(mu, o);
    CHECK(!discs.empty());
    for (const auto& d : discs) {
        CHECK(d.radius >= mu.resolution_h() * (1 - 1e-12));
        CHECK(d.radius <= 4.0 * (1 + 1e-12));
    }
    CHECK(discs.front().center == mu.atoms().front().point);
    const auto again = sample_discs(mu, o);
    CHECK(again.size() == discs.size());
    CHECK(again.back().center == discs.back().center);
}

TEST_CASE("mainc on a small segment") {
    DiscSamplerOptions o;
    o.max_centers = 64;
    o.radii_per_decade = 6;
    const auto r = mainc_check(arc_length_measure(Segment{{0, 0}, {4, 0}}, 32), o);
    CHECK(r.passed());
}

TEST_CASE("almost additivity on a short chain") {
    const auto chain = bead_chain_on_line(std::vector<double>{1.0, 0.5, 1.5}, 2.0, PartShape::segment, 2,
                                          BeadChainOptions{12});
    AlmostAdditivityOptions o;
    o.iterations = 10;
    const auto r = almost_additivity_check(chain, o);
    CHECK(r.rows.size() >= 1);
    CHECK(r.passed());
}

TEST_CASE("stage energies on the first corner family") {
    const std::vector<int> nk{0, 1, 3, 6};
    const auto fam = david_semmes_ex1(nk);
    const auto st = stage_energies(fam, 1);
    REQUIRE(st.size() == 2);
    CHECK(st[0].gap == 2);
    CHECK(st[1].gap == 3);
    for (const auto& s : st) {
        CHECK(s.energy > 0);
        CHECK(s.norm_bound == doctest::Approx(std::sqrt(s.energy / s.mass)));
    }
    // divergence with the default stages
    CHECK(opnorm_divergence_ex1(std::vector<int>{0, 1, 3, 6, 10}, std::vector<int>{0, 1, 3, 5, 7}).passed());
}

TEST_CASE("independence constant of separated parts") {
    const std::vector<DiscreteMeasure> parts{arc_length_measure(Segment{{0, 0}, {1, 0}}, 16),
                                             arc_length_measure(Segment{{50, 0}, {50, 1}}, 16)};
    const auto rep = independence_constant(parts);
    REQUIRE(rep.part_norms.size() == 2);
    CHECK(rep.ratio >= 1 - 1e-6);
    CHECK(rep.ratio <= 1.05);
    CHECK(rep.max_part_norm == doctest::Approx(std::max(rep.part_norms[0], rep.part_norms[1])));
}

TEST_CASE("catalog") {
    const char* names[] = {"marcinkiewicz_check",  "main_lemma_check",   "good_index_selection", "mainc_check",
                           "almost_additivity_check", "opnorm_divergence_ex1", "cauchy_independence_check",
                           "cantor_scaling",       "energy_identity",    "capacity_sanity"};
    CHECK(experiment_catalog().size() == 10);
    for (const char* n : names) {
        const auto* e = find_experiment(n);
        REQUIRE(e != nullptr);
        CHECK(!e->anchor.empty());
        CHECK(!e->description.empty());
    }
    CHECK(find_experiment("nope") == nullptr);
    CHECK(find_experiment("main_lemma_check")->anchor == "c^2(mu) <= sum_j c^2(mu_j) + C ||mu||");
}

TEST_CASE("run_experiment: resolved config and determinism") {
    const Json gen = {{"trials", 30}, {"n_max", 20}};
    const auto a = run("marcinkiewicz_check", gen);
    CHECK(a.passed());
    CHECK(a.config["schema_version"] == 1);
    CHECK(a.config["experiment"] == "marcinkiewicz_check");
    CHECK(a.config["seed"] == 5);
    CHECK(a.config["generator"]["trials"] == 30);
    CHECK(a.config["generator"]["radius_min"] == 0.1);  // defaults are recorded
    const auto b = run("marcinkiewicz_check", gen);
    CHECK(content_hash(a) == content_hash(b));
    const auto c = run("marcinkiewicz_check", gen, Json::object(), 6);
    CHECK(content_hash(a) != content_hash(c));
}

TEST_CASE("run_experiment: configuration errors name the field") {
    auto key_of = [](auto&& f) {
        try {
            f();
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("<no error>");
    };
    CHECK(key_of([] { run("marcinkiewicz_check", {{"trails", 3}}); }) == "trails");
    CHECK(key_of([] { run("marcinkiewicz_check", {{"trials", "many"}}); }) == "trials");
    CHECK(key_of([] { run("marcinkiewicz_check", {{"trials", 0}}); }) == "trials");
    CHECK(key_of([] { run("marcinkiewicz_check", Json::object(), {{"extra", 1}}); }) == "extra");
    CHECK(key_of([] { run("cantor_scaling", {{"n_max", 9}}); }) == "n_max");
    CHECK(key_of([] { run("cantor_scaling", Json::object(), {{"curvature", "guess"}}); }) == "curvature");
    CHECK(key_of([] { run("opnorm_divergence_ex1", {{"nk", {1, 2, 3}}}); }) == "nk");
    CHECK(key_of([] { run("mainc_check", {{"family", "torus"}}); }) == "family");
    CHECK(key_of([] { run("no_such_experiment"); }) == "experiment");
}

TEST_CASE("run_experiment: small cantor run has the documented columns") {
    const auto r = run("cantor_scaling", {{"n_min", 2}, {"n_max", 3}}, {{"lower_bound_iterations", 2}});
    const std::vector<std::string> cols{"n", "c2", "c2_over_n", "lower_bound", "bound_times_sqrt_n"};
    CHECK(r.columns == cols);
    CHECK(r.rows.size() == 2);
    // c2 of generation 2 is exact and reproducible
    CHECK(r.rows[0][1].get<double>() == doctest::Approx(c2_exact(cantor_corner(2).measure).value));
}
