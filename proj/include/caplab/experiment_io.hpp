#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "caplab/curvature.hpp"
#include "caplab/measures.hpp"

namespace caplab {

using Json = nlohmann::ordered_json;

/// {label, resolution_h, atoms: [[x, y, w], ...]} in that field order.
Json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

/// {value, estimator, epsilon, samples, std_error}.
Json curvature_report_to_json(const CurvatureReport& r);

struct Check {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    std::uint64_t seed = 0;
    Json config = Json::object();      ///< resolved configuration
    std::vector<std::string> columns;  ///< CSV summary header
    std::vector<Json> rows;            ///< one JSON array per CSV row
    Json records = Json::array();      ///< full per-instance records
    Json summary = Json::object();     ///< fitted constants, band ratios
    std::vector<Check> checks;
    bool exploratory = false;          ///< data only, never fails

    bool passed() const;
    void check(std::string check_name, bool ok, std::string detail = {});
    void add_row(Json row);
};

Json result_to_json(const ExperimentResult& r);
std::string result_json_text(const ExperimentResult& r);
std::string result_csv_text(const ExperimentResult& r);
/// FNV-1a 64 over the JSON text followed by the CSV text, as 16 hex digits.
std::string content_hash(const ExperimentResult& r);

struct WrittenFiles {
    std::string json_path;
    std::string csv_path;
    std::string hash;
};

/// Writes <dir>/<name>_seed<seed>_<hash>.json and .csv (creating dir).
WrittenFiles write_result(const ExperimentResult& r, const std::string& dir);

/// Configuration error tied to a field; `key` is empty when not attributable.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Reads typed fields from a JSON object with defaults, records the resolved
/// values, and rejects fields that were never read.
class ParamReader {
public:
    ParamReader(const Json& object, std::string section);

    double number(const std::string& key, double fallback);
    std::int64_t integer(const std::string& key, std::int64_t fallback);
    bool flag(const std::string& key, bool fallback);
    std::string text(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
    std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);

    /// Throws ConfigError for the first unread field.
    void finish() const;
    const Json& resolved() const { return resolved_; }

private:
    const Json* find(const std::string& key);
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    Json source_;
    std::string section_;
    Json resolved_ = Json::object();
    std::vector<std::string> read_;
};

}  // namespace caplab
