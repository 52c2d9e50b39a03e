#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "caplab/experiment_io.hpp"
#include "caplab/verifier.hpp"

namespace caplab::cli {

int line_of_offset(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
    if (key.empty()) return 0;
    const auto at = text.find("\"" + key + "\"");
    return at == std::string::npos ? 0 : line_of_offset(text, at);
}

namespace {

struct ConfigFailure {
    std::string key;
    std::string message;
};

const char* const kTopLevel[] = {"schema_version", "experiment", "seed",     "threads",
                                 "output_dir",     "generator",  "estimator"};

struct Overrides {
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 0;
};

struct Plan {
    RunRequest request;
    std::string output_dir;
};

Plan parse_config(const Json& j, const Overrides& ov) {
    if (!j.is_object()) throw ConfigFailure{"", "configuration must be a JSON object"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(std::begin(kTopLevel), std::end(kTopLevel), key) == std::end(kTopLevel))
            throw ConfigFailure{key, "unknown field '" + key + "'"};
    }
    if (!j.contains("schema_version")) throw ConfigFailure{"", "missing required field 'schema_version'"};
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != 1)
        throw ConfigFailure{"schema_version", "unsupported schema_version (expected 1)"};
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigFailure{"experiment", "missing or non-string field 'experiment'"};

    Plan plan;
    plan.request.experiment = j["experiment"].get<std::string>();
    if (!find_experiment(plan.request.experiment))
        throw ConfigFailure{"experiment", "unknown experiment '" + plan.request.experiment + "'"};

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigFailure{"seed", "field 'seed' must be a nonnegative integer"};
        plan.request.seed = j["seed"].get<std::uint64_t>();
    } else if (!ov.has_seed) {
        throw ConfigFailure{"", "missing required field 'seed'"};
    }
    if (ov.has_seed) plan.request.seed = ov.seed;

    plan.request.threads = 1;
    if (j.contains("threads")) {
        if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 1)
            throw ConfigFailure{"threads", "field 'threads' must be a positive integer"};
        plan.request.threads = j["threads"].get<int>();
    }
    if (ov.threads > 0) plan.request.threads = ov.threads;

    plan.output_dir = "results";
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigFailure{"output_dir", "field 'output_dir' must be a string"};
        plan.output_dir = j["output_dir"].get<std::string>();
    }
    if (!ov.out_dir.empty()) plan.output_dir = ov.out_dir;

    for (const char* section : {"generator", "estimator"}) {
        if (!j.contains(section)) continue;
        if (!j[section].is_object()) throw ConfigFailure{section, std::string("field '") + section + "' must be an object"};
    }
    if (j.contains("generator")) plan.request.generator = j["generator"];
    if (j.contains("estimator")) plan.request.estimator = j["estimator"];
    return plan;
}

int run_config(const std::string& path, const Overrides& ov, std::ostream& out, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << path << ": cannot read configuration\n";
        return kUsageError;
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        err << path << ":" << line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1) << ": malformed JSON: " << e.what()
            << "\n";
        return kUsageError;
    }
    auto anchored = [&](const std::string& key, const std::string& message) {
        err << path << ":" << std::max(1, line_of_key(text, key)) << ": " << message << "\n";
        return kUsageError;
    };

    Plan plan;
    try {
        plan = parse_config(j, ov);
    } catch (const ConfigFailure& f) {
        return anchored(f.key, f.message);
    }
#ifdef _OPENMP
    omp_set_num_threads(plan.request.threads);
#endif
    ExperimentResult result;
    try {
        result = run_experiment(plan.request);
    } catch (const ConfigError& e) {
        return anchored(e.key(), e.what());
    } catch (const std::invalid_argument& e) {
        return anchored("", e.what());
    }

    const WrittenFiles files = write_result(result, plan.output_dir);
    out << "experiment " << result.name << " seed " << result.seed << " threads " << plan.request.threads << "\n";
    out << "hash " << files.hash << "\n";
    out << "json " << files.json_path << "\n";
    out << "csv  " << files.csv_path << "\n";
    for (const auto& c : result.checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (result.exploratory) out << "exploratory run: checks are informational\n";
    out << "result " << (result.passed() ? "PASS" : "FAIL") << "\n";
    return result.passed() ? kPass : kBandFailure;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical experiments on analytic capacity, curvature and Cauchy operator bounds", "caplab"};
    std::string config, describe;
    bool list = false;
    Overrides ov;
    auto* seed_opt = app.add_option("--seed", ov.seed, "Seed (overrides the configuration)");
    app.add_option("--config", config, "Run the experiment described by a JSON configuration")->check(CLI::ExistingFile);
    app.add_option("--out", ov.out_dir, "Output directory (overrides the configuration)");
    app.add_option("--threads", ov.threads, "Worker threads (overrides the configuration)")->check(CLI::PositiveNumber);
    app.add_flag("--list", list, "List the registered experiments");
    app.add_option("--describe", describe, "Describe one experiment");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsageError;
    }
    ov.has_seed = seed_opt->count() > 0;

    if (list) {
        for (const auto& e : experiment_catalog()) out << e.name << "\t" << e.anchor << "\n";
        return kPass;
    }
    if (!describe.empty()) {
        const ExperimentInfo* e = find_experiment(describe);
        if (!e) {
            err << "unknown experiment '" << describe << "'; see --list\n";
            return kUsageError;
        }
        out << e->name << "\n  tests: " << e->anchor << "\n  " << e->description << "\n";
        return kPass;
    }
    if (config.empty()) {
        err << app.help();
        return kUsageError;
    }
    return run_config(config, ov, out, err);
}

}  // namespace caplab::cli
