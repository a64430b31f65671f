#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treestab/experiments.hpp"
#include "treestab/stability.hpp"

namespace treestab {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a digest of a file's bytes, formatted as "fnv1a64:<hex>".
std::string file_digest(const std::string& path);
std::string bytes_digest(const std::string& bytes);

struct Aggregate {
    double mean = 0;
    double stddev = 0;  // sample standard deviation, 0 when n < 2
    int n = 0;
};

Aggregate aggregate(const std::vector<double>& values);

// One method's numbers for a single repetition.
struct MethodSample {
    double auc = 0;
    double distance = 0;
    bool has_distance = true;
    long nodes = 0;
    int depth = 0;
    int grid_depth = 0;
    int grid_min_leaf = 0;
    std::vector<double> importance;
};

// (method name, per-repetition samples), in fixed presentation order.
using SampleTable = std::vector<std::pair<std::string, std::vector<MethodSample>>>;

SampleTable samples_from_pipeline(const PipelineResult& result);
SampleTable samples_from_report_json(const nlohmann::json& report);

struct MethodAggregate {
    std::string method;
    Aggregate auc, distance, nodes, depth;
    bool has_distance = true;
    double importance_std_mean = 0;  // per-feature std across reps, averaged over features
    int top3_distinct = 0;           // distinct features in any repetition's top 3
};

// Indices of the (up to) three largest importances, ties toward lower index.
std::vector<int> top3_indices(const std::vector<double>& importance);

std::vector<MethodAggregate> aggregate_samples(const SampleTable& table);

// Six-column aggregate table with "mean (std)" cells.
std::string summary_table_csv(const std::vector<MethodAggregate>& rows);

// One row per repetition and method; plain columns for recomputation.
std::string details_csv(const SampleTable& table);

std::string curve_csv(const SensitivityCurve& curve);

nlohmann::json pipeline_report_json(const PipelineResult& result, const FeatureSpace& space);

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    uint64_t seed = 0;
    nlohmann::json config;
    std::vector<std::pair<std::string, std::string>> inputs;   // path -> digest
    std::vector<std::pair<std::string, std::string>> outputs;  // path -> digest
};

nlohmann::json manifest_json(const RunManifest& m);

// Writes `content` to `path` and a sidecar `<path>.manifest.json` recording the
// output digest alongside the run description.
void write_output_with_manifest(const std::string& path, const std::string& content,
                                RunManifest manifest);

// Loads a file previously written with a manifest sidecar and refuses to
// proceed when the recorded digest no longer matches the bytes on disk.
std::string read_verified_output(const std::string& path);

}  // namespace treestab
