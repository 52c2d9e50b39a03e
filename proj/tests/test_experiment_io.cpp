#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "caplab/experiment_io.hpp"

using namespace caplab;

namespace {

ExperimentResult sample_result() {
    ExperimentResult r;
    r.name = "demo";
    r.seed = 42;
    r.config = {{"schema_version", 1}, {"experiment", "demo"}};
    r.columns = {"n", "value", "label"};
    r.add_row(Json::array({1, 0.1, "a,b"}));
    r.add_row(Json::array({2, 1.0 / 3, "plain"}));
    r.summary["max"] = 0.5;
    r.check("bounded", true, "0.5 <= 1");
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("measure JSON round trip") {
    const DiscreteMeasure mu({{{0.1, -2}, 0.5}, {{3, 4}, 1.0 / 3}}, 0.01, "pair");
    const Json j = measure_to_json(mu);
    CHECK(j.begin().key() == "label");
    const auto back = measure_from_json(j);
    CHECK(back.label() == "pair");
    CHECK(back.resolution_h() == 0.01);
    REQUIRE(back.size() == 2);
    CHECK(back.atoms()[1].point == mu.atoms()[1].point);
    CHECK(back.atoms()[1].weight == mu.atoms()[1].weight);
    CHECK_THROWS(measure_from_json(Json::array()));
    CHECK_THROWS(measure_from_json({{"resolution_h", 1}, {"atoms", {{1, 2}}}}));
}

TEST_CASE("curvature report JSON") {
    CurvatureReport r{2.5, Estimator::monte_carlo, 0.1, 1000, 0.01};
    const Json j = curvature_report_to_json(r);
    CHECK(j["estimator"] == "monte_carlo");
    CHECK(j["samples"] == 1000);
}

TEST_CASE("result rendering") {
    auto r = sample_result();
    CHECK(r.passed());
    const std::string csv = result_csv_text(r);
    CHECK(csv.rfind("# resolved_config: {\"schema_version\":1,\"experiment\":\"demo\"}\n", 0) == 0);
    CHECK(csv.find("n,value,label\n1,0.10000000000000001,\"a,b\"\n2,0.33333333333333331,plain\n") !=
          std::string::npos);
    const Json j = Json::parse(result_json_text(r));
    CHECK(j["passed"] == true);
    CHECK(j["checks"][0]["name"] == "bounded");
    CHECK_THROWS_AS(r.add_row(Json::array({1})), std::logic_error);
    r.check("broken", false);
    CHECK_FALSE(r.passed());
    r.exploratory = true;
    CHECK(r.passed());
}

TEST_CASE("content hash and written files") {
    const auto r = sample_result();
    const std::string h = content_hash(r);
    CHECK(h.size() == 16);
    CHECK(content_hash(sample_result()) == h);
    auto other = sample_result();
    other.summary["max"] = 0.25;
    CHECK(content_hash(other) != h);
    const auto dir = std::filesystem::temp_directory_path() / "caplab_io_test";
    std::filesystem::remove_all(dir);
    const auto files = write_result(r, dir.string());
    CHECK(files.hash == h);
    CHECK(files.json_path == (dir / ("demo_seed42_" + h + ".json")).string());
    CHECK(slurp(files.json_path) == result_json_text(r));
    CHECK(slurp(files.csv_path) == result_csv_text(r));
    std::filesystem::remove_all(dir);
}

TEST_CASE("ParamReader") {
    const Json src = {{"a", 1.5}, {"n", 3}, {"flag", true}, {"s", "x"}, {"v", {1, 2}}, {"iv", {4, 5}}};
    ParamReader p(src, "generator");
    CHECK(p.number("a", 0) == 1.5);
    CHECK(p.integer("n", 0) == 3);
    CHECK(p.flag("flag", false));
    CHECK(p.text("s", "") == "x");
    CHECK(p.numbers("v", {}) == std::vector<double>{1, 2});
    CHECK(p.integers("iv", {}) == std::vector<int>{4, 5});
    CHECK(p.number("missing", 7.0) == 7.0);
    CHECK_NOTHROW(p.finish());
    CHECK(p.resolved()["missing"] == 7.0);

    ParamReader q(src, "generator");
    q.number("a", 0);
    try {
        q.finish();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "n");
        CHECK(std::string(e.what()).find("generator.n") != std::string::npos);
    }
    ParamReader t(src, "estimator");
    CHECK_THROWS_AS(t.integer("a", 0), ConfigError);
    CHECK_THROWS_AS(t.number("s", 0), ConfigError);
    CHECK(t.integers("v", {}) == std::vector<int>{1, 2});
    CHECK_THROWS_AS(ParamReader(Json{{"fv", {1.5}}}, "g").integers("fv", {}), ConfigError);
    CHECK_THROWS_AS(ParamReader(Json::array(), "generator"), ConfigError);
    CHECK_NOTHROW(ParamReader(Json(), "generator"));
}
