#include "caplab/experiment_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "caplab/summation.hpp"

namespace caplab {

Json measure_to_json(const DiscreteMeasure& mu) {
    Json atoms = Json::array();
    for (const auto& a : mu.atoms()) atoms.push_back(Json::array({a.point.x, a.point.y, a.weight}));
    Json j = Json::object();
    j["label"] = mu.label();
    j["resolution_h"] = mu.resolution_h();
    j["atoms"] = std::move(atoms);
    return j;
}

DiscreteMeasure measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("resolution_h") || !j.contains("atoms"))
        throw std::invalid_argument("measure_from_json: expected {label, resolution_h, atoms}");
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 3) throw std::invalid_argument("measure_from_json: atoms must be [x, y, w]");
        atoms.push_back({{a[0].get<double>(), a[1].get<double>()}, a[2].get<double>()});
    }
    return DiscreteMeasure(std::move(atoms), j.at("resolution_h").get<double>(), j.value("label", std::string{}));
}

Json curvature_report_to_json(const CurvatureReport& r) {
    Json j = Json::object();
    j["value"] = r.value;
    j["estimator"] = to_string(r.estimator);
    j["epsilon"] = r.epsilon;
    j["samples"] = r.samples;
    j["std_error"] = r.std_error;
    return j;
}

bool ExperimentResult::passed() const {
    if (exploratory) return true;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void ExperimentResult::check(std::string check_name, bool ok, std::string detail) {
    checks.push_back({std::move(check_name), ok, std::move(detail)});
}

void ExperimentResult::add_row(Json row) {
    if (row.size() != columns.size()) throw std::logic_error("ExperimentResult: row width does not match columns");
    rows.push_back(std::move(row));
}

Json result_to_json(const ExperimentResult& r) {
    Json j = Json::object();
    j["name"] = r.name;
    j["seed"] = r.seed;
    j["config"] = r.config;
    j["exploratory"] = r.exploratory;
    j["passed"] = r.passed();
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json cj = Json::object();
        cj["name"] = c.name;
        cj["passed"] = c.passed;
        cj["detail"] = c.detail;
        checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    j["summary"] = r.summary;
    j["records"] = r.records;
    return j;
}

std::string result_json_text(const ExperimentResult& r) { return result_to_json(r).dump(2) + "\n"; }

namespace {

std::string cell(const Json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

}  // namespace

std::string result_csv_text(const ExperimentResult& r) {
    std::ostringstream out;
    out << "# resolved_config: " << r.config.dump() << "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
    out << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
        out << "\n";
    }
    return out.str();
}

std::string content_hash(const ExperimentResult& r) {
    const std::uint64_t h = fnv1a64(result_json_text(r) + result_csv_text(r));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

WrittenFiles write_result(const ExperimentResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string hash = content_hash(r);
    const std::string stem = r.name + "_seed" + std::to_string(r.seed) + "_" + hash;
    WrittenFiles files{(fs::path(dir) / (stem + ".json")).string(), (fs::path(dir) / (stem + ".csv")).string(), hash};
    std::ofstream(files.json_path, std::ios::binary) << result_json_text(r);
    std::ofstream(files.csv_path, std::ios::binary) << result_csv_text(r);
    return files;
}

// ---------------------------------------------------------------------------

ParamReader::ParamReader(const Json& object, std::string section)
    : source_(object.is_null() ? Json::object() : object), section_(std::move(section)) {
    if (!source_.is_object()) throw ConfigError(section_, "'" + section_ + "' must be a JSON object");
}

const Json* ParamReader::find(const std::string& key) {
    read_.push_back(key);
    return source_.contains(key) ? &source_.at(key) : nullptr;
}

void ParamReader::fail(const std::string& key, const std::string& what) const {
    throw ConfigError(key, "field '" + section_ + "." + key + "' " + what);
}

double ParamReader::number(const std::string& key, double fallback) {
    const Json* v = find(key);
    if (v && !v->is_number()) fail(key, "must be a number");
    const double out = v ? v->get<double>() : fallback;
    resolved_[key] = out;
    return out;
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback) {
    const Json* v = find(key);
    if (v && !v->is_number_integer()) fail(key, "must be an integer");
    const std::int64_t out = v ? v->get<std::int64_t>() : fallback;
    resolved_[key] = out;
    return out;
}

bool ParamReader::flag(const std::string& key, bool fallback) {
    const Json* v = find(key);
    if (v && !v->is_boolean()) fail(key, "must be true or false");
    const bool out = v ? v->get<bool>() : fallback;
    resolved_[key] = out;
    return out;
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) {
    const Json* v = find(key);
    if (v && !v->is_string()) fail(key, "must be a string");
    std::string out = v ? v->get<std::string>() : fallback;
    resolved_[key] = out;
    return out;
}

std::vector<double> ParamReader::numbers(const std::string& key, const std::vector<double>& fallback) {
    const Json* v = find(key);
    std::vector<double> out = fallback;
    if (v) {
        if (!v->is_array()) fail(key, "must be an array of numbers");
        out.clear();
        for (const auto& x : *v) {
            if (!x.is_number()) fail(key, "must be an array of numbers");
            out.push_back(x.get<double>());
        }
    }
    resolved_[key] = out;
    return out;
}

std::vector<int> ParamReader::integers(const std::string& key, const std::vector<int>& fallback) {
    const Json* v = find(key);
    std::vector<int> out = fallback;
    if (v) {
        if (!v->is_array()) fail(key, "must be an array of integers");
        out.clear();
        for (const auto& x : *v) {
            if (!x.is_number_integer()) fail(key, "must be an array of integers");
            out.push_back(x.get<int>());
        }
    }
    resolved_[key] = out;
    return out;
}

void ParamReader::finish() const {
    for (const auto& [key, value] : source_.items()) {
        (void)value;
        if (std::find(read_.begin(), read_.end(), key) == read_.end())
            throw ConfigError(key, "unknown field '" + section_ + "." + key + "'");
    }
}

}  // namespace caplab
