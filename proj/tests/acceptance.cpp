// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "caplab/curvature.hpp"
#include "caplab/experiment_io.hpp"
#include "caplab/verifier.hpp"

using namespace caplab;

namespace {

struct Verdict {
    bool ok = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ExperimentResult run(const std::string& name, Json gen = Json::object(), Json est = Json::object(),
                     std::uint64_t seed = 20240601, int threads = 1) {
    RunRequest req;
    req.experiment = name;
    req.seed = seed;
    req.threads = threads;
    req.generator = std::move(gen);
    req.estimator = std::move(est);
    return run_experiment(req);
}

std::string failed_checks(const ExperimentResult& r) {
    std::string s;
    for (const auto& c : r.checks)
        if (!c.passed) s += (s.empty() ? "" : "; ") + c.name + " (" + c.detail + ")";
    return s;
}

std::string check_detail(const ExperimentResult& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c.detail;
    return "?";
}

Verdict experiment_verdict(const ExperimentResult& r, double secs, double limit, const std::string& shown) {
    Verdict v;
    v.ok = r.passed() && secs < limit;
    v.detail = shown + ", " + fmt(secs) + " s";
    if (!r.passed()) v.detail += "; failed: " + failed_checks(r);
    if (secs >= limit) v.detail += "; over the " + fmt(limit) + " s limit";
    return v;
}

// 1 ------------------------------------------------------------------------
Verdict curvature_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto circle = arc_length_measure(CircleArc::full_circle({0, 0}, 1), 64);
    const double expected = std::pow(2 * std::numbers::pi, 3) * (64.0 * 63 * 62) / (64.0 * 64 * 64);
    const double got = c2_exact(circle).value;
    const double rel = std::abs(got - expected) / expected;
    // exactly collinear: dyadic parameters on a line with dyadic slope
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> u(-512, 512);
    std::vector<Atom> atoms;
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng) / 128.0;
        atoms.push_back({{0.5 + t, -1.0 + 0.75 * t}, 1.0 / 200});
    }
    const double line = c2_exact(DiscreteMeasure(atoms, 1.0 / 128)).value;
    const double secs = seconds_since(t0);
    return {rel <= 1e-9 && line == 0.0 && secs < 1.0,
            "circle rel. error " + fmt(rel) + ", collinear c2 = " + fmt(line) + ", " + fmt(secs) + " s"};
}

// 2 ------------------------------------------------------------------------
Verdict melnikov_identity() {
    using C = std::complex<double>;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    int triples = 0;
    double worst = 0, worst_lib = 0;
    while (triples < 10000) {
        const C z[3] = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const double a = std::abs(z[1] - z[2]), b = std::abs(z[0] - z[2]), c = std::abs(z[0] - z[1]);
        const double area = 0.5 * std::abs(((z[1] - z[0]) * std::conj(z[2] - z[0])).imag());
        // non-degenerate: every angle at least 0.01 rad
        const double sines[3] = {2 * area / (b * c), 2 * area / (a * c), 2 * area / (a * b)};
        if (std::min({sines[0], sines[1], sines[2]}) < std::sin(0.01)) continue;
        ++triples;
        C perm = 0;
        const int p[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& s : p) perm += 1.0 / ((z[s[0]] - z[s[2]]) * std::conj(z[s[1]] - z[s[2]]));
        const double heron = 16 * area * area / (a * a * b * b * c * c);
        worst = std::max(worst, std::abs(perm.real() - heron) / heron + std::abs(perm.imag()) / heron);
        const double lib = circumradius_inv_sq({z[0].real(), z[0].imag()}, {z[1].real(), z[1].imag()},
                                               {z[2].real(), z[2].imag()});
        worst_lib = std::max(worst_lib, std::abs(lib - heron) / heron);
    }
    return {worst <= 1e-9 && worst_lib <= 1e-9,
            fmt(triples) + " triples, max rel. gap " + fmt(worst) + ", library vs area form " + fmt(worst_lib)};
}

// 10 -----------------------------------------------------------------------
Verdict determinism() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "caplab_acceptance";
    fs::remove_all(dir);
    struct Case {
        std::string name;
        Json gen, est;
        int threads;
    };
    const std::vector<Case> cases{
        {"main_lemma_check", {{"trials", 2}, {"sizes", {10, 20}}}, {{"exact_triple_budget", 1000}, {"mc_samples", 200000}}, 1},
        {"main_lemma_check", {{"trials", 2}, {"sizes", {10, 20}}}, {{"exact_triple_budget", 1000}, {"mc_samples", 200000}}, 2},
        {"cantor_scaling", {{"n_min", 2}, {"n_max", 3}}, {{"curvature", "monte_carlo"}, {"mc_samples", 100000}, {"lower_bound_iterations", 2}}, 2},
        {"marcinkiewicz_check", {{"trials", 50}}, Json::object(), 1},
    };
    int matched = 0;
    std::string detail;
    std::vector<std::vector<Json>> rows;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        std::string bytes[2], hashes[2];
        for (int rep = 0; rep < 2; ++rep) {
#ifdef _OPENMP
            omp_set_num_threads(c.threads);
#endif
            const auto r = run(c.name, c.gen, c.est, 99, c.threads);
            if (rep == 0) rows.push_back(r.rows);
            const auto files = write_result(r, (dir / ("rep" + std::to_string(rep))).string());
            std::ifstream j(files.json_path, std::ios::binary), v(files.csv_path, std::ios::binary);
            std::stringstream ss;
            ss << j.rdbuf() << v.rdbuf();
            bytes[rep] = ss.str();
            hashes[rep] = files.hash;
        }
        const bool same = hashes[0] == hashes[1] && bytes[0] == bytes[1];
        matched += same;
        detail += (detail.empty() ? "" : ", ") + c.name + "/t" + std::to_string(c.threads) + " " + hashes[0] +
                  (same ? "" : " != " + hashes[1]);
    }
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    fs::remove_all(dir);
    // the thread count is recorded in the configuration but must not change the data
    const bool thread_free = rows[0] == rows[1];
    detail += thread_free ? "; rows identical for 1 and 2 threads" : "; rows differ between 1 and 2 threads";
    return {matched == static_cast<int>(cases.size()) && thread_free, detail};
}

}  // namespace

int main() {
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    struct Criterion {
        const char* title;
        std::function<Verdict()> body;
    };
    const std::vector<Criterion> criteria{
        {"curvature exactness", curvature_exactness},
        {"Melnikov identity", melnikov_identity},
        {"Marcinkiewicz bound",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("marcinkiewicz_check");
             return experiment_verdict(r, seconds_since(t0), 10.0,
                                       "1000 chains, " + check_detail(r, "zero_violations"));
         }},
        {"main lemma stability",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("main_lemma_check");
             return experiment_verdict(r, seconds_since(t0), 300.0,
                                       check_detail(r, "rho_nonnegative") + "; " + check_detail(r, "bounded_band"));
         }},
        {"Cantor scaling",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("cantor_scaling");
             return experiment_verdict(r, seconds_since(t0), 300.0,
                                       "c2/n " + check_detail(r, "c2_over_n_band") + ", bound*sqrt(n) " +
                                           check_detail(r, "bound_times_sqrt_n_band"));
         }},
        {"energy identity",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("energy_identity");
             return experiment_verdict(r, seconds_since(t0), 600.0,
                                       "kappa " + fmt(kEnergyKappa) + ", evaluation " +
                                           check_detail(r, "evaluation_within_frozen"));
         }},
        {"good-index selection",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("good_index_selection");
             return experiment_verdict(r, seconds_since(t0), 600.0, check_detail(r, "retention_fitted"));
         }},
        {"capacity sanity",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("capacity_sanity");
             return experiment_verdict(r, seconds_since(t0), 600.0, std::to_string(r.checks.size()) + " checks");
         }},
        {"operator divergence",
         [] {
             const auto t0 = std::chrono::steady_clock::now();
             const auto r = run("opnorm_divergence_ex1");
             return experiment_verdict(r, seconds_since(t0), 600.0,
                                       check_detail(r, "norm_bound_increasing") + "; " +
                                           check_detail(r, "control_bounded"));
         }},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].body();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.ok;
        std::printf("%s %zu %s: %s\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].title, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}
