#include "treestab/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "treestab/errors.hpp"
#include "treestab/util.hpp"

namespace treestab {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

std::string bytes_digest(const std::string& bytes) {
    return "fnv1a64:" + hex64(fnv1a64(bytes));
}

std::string file_digest(const std::string& path) { return bytes_digest(read_file(path)); }

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    a.n = static_cast<int>(values.size());
    if (a.n == 0) return a;
    for (double v : values) a.mean += v;
    a.mean /= a.n;
    if (a.n > 1) {
        double ss = 0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.stddev = std::sqrt(ss / (a.n - 1));
    }
    return a;
}

namespace {

MethodSample sample_from_metrics(const MethodMetrics& m) {
    MethodSample s;
    s.auc = m.auc;
    s.distance = m.distance;
    s.has_distance = m.has_distance;
    s.nodes = m.nodes;
    s.depth = m.depth;
    s.grid_depth = m.grid_depth;
    s.grid_min_leaf = m.grid_min_leaf;
    s.importance = m.importance;
    return s;
}

const std::vector<std::pair<std::string, MethodMetrics RepetitionResult::*>> kMethods = {
    {"pareto_auc", &RepetitionResult::pareto_auc},
    {"pareto_distance", &RepetitionResult::pareto_distance},
    {"selected", &RepetitionResult::selected_tree},
    {"cv", &RepetitionResult::cv},
    {"forest", &RepetitionResult::forest},
};

}  // namespace

SampleTable samples_from_pipeline(const PipelineResult& result) {
    SampleTable table;
    for (const auto& [name, member] : kMethods) {
        std::vector<MethodSample> samples;
        for (const RepetitionResult& rep : result.reps) {
            if (rep.failed) continue;
            samples.push_back(sample_from_metrics(rep.*member));
        }
        table.emplace_back(name, std::move(samples));
    }
    return table;
}

SampleTable samples_from_report_json(const nlohmann::json& report) {
    require_data(report.is_object() && report.contains("repetitions"),
                 "report document lacks 'repetitions'");
    SampleTable table;
    for (const auto& [name, unused] : kMethods) {
        (void)unused;
        table.emplace_back(name, std::vector<MethodSample>{});
    }
    for (const nlohmann::json& rep : report["repetitions"]) {
        if (rep.value("failed", false)) continue;
        require_data(rep.contains("methods"), "repetition lacks 'methods'");
        for (auto& [name, samples] : table) {
            require_data(rep["methods"].contains(name),
                         "repetition lacks method '" + name + "'");
            const nlohmann::json& jm = rep["methods"][name];
            MethodSample s;
            s.auc = jm.at("auc").get<double>();
            s.has_distance = jm.at("has_distance").get<bool>();
            s.distance = s.has_distance ? jm.at("distance").get<double>() : 0.0;
            s.nodes = jm.at("nodes").get<long>();
            s.depth = jm.at("depth").get<int>();
            s.grid_depth = jm.value("grid_depth", 0);
            s.grid_min_leaf = jm.value("grid_min_leaf", 0);
            s.importance = jm.at("importance").get<std::vector<double>>();
            samples.push_back(std::move(s));
        }
    }
    return table;
}

std::vector<int> top3_indices(const std::vector<double>& importance) {
    std::vector<int> order(importance.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (importance[static_cast<size_t>(a)] != importance[static_cast<size_t>(b)])
            return importance[static_cast<size_t>(a)] > importance[static_cast<size_t>(b)];
        return a < b;
    });
    if (order.size() > 3) order.resize(3);
    return order;
}

std::vector<MethodAggregate> aggregate_samples(const SampleTable& table) {
    std::vector<MethodAggregate> rows;
    for (const auto& [name, samples] : table) {
        require_data(!samples.empty(), "no successful repetitions for method '" + name + "'");
        MethodAggregate row;
        row.method = name;
        std::vector<double> auc, dist, nodes, depth;
        for (const MethodSample& s : samples) {
            auc.push_back(s.auc);
            dist.push_back(s.distance);
            nodes.push_back(static_cast<double>(s.nodes));
            depth.push_back(static_cast<double>(s.depth));
        }
        row.auc = aggregate(auc);
        row.distance = aggregate(dist);
        row.nodes = aggregate(nodes);
        row.depth = aggregate(depth);
        row.has_distance = samples.front().has_distance;

        const size_t p = samples.front().importance.size();
        double std_sum = 0;
        for (size_t j = 0; j < p; ++j) {
            std::vector<double> imp;
            for (const MethodSample& s : samples) {
                require_data(s.importance.size() == p, "inconsistent importance vector sizes");
                imp.push_back(s.importance[j]);
            }
            std_sum += aggregate(imp).stddev;
        }
        row.importance_std_mean = p > 0 ? std_sum / static_cast<double>(p) : 0.0;

        std::set<int> distinct;
        for (const MethodSample& s : samples)
            for (int j : top3_indices(s.importance)) distinct.insert(j);
        row.top3_distinct = static_cast<int>(distinct.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string mean_std_cell(const Aggregate& a) {
    return fmt_g6(a.mean) + " (" + fmt_g6(a.stddev) + ")";
}

}  // namespace

std::string summary_table_csv(const std::vector<MethodAggregate>& rows) {
    std::string out = "method,auc,distance,feat_import_std,feat_in_top3,nodes,tree_depth\n";
    for (const MethodAggregate& r : rows) {
        out += r.method;
        out += "," + mean_std_cell(r.auc);
        out += "," + (r.has_distance ? mean_std_cell(r.distance) : std::string("n/a"));
        out += "," + fmt_g6(r.importance_std_mean);
        out += "," + std::to_string(r.top3_distinct);
        out += "," + mean_std_cell(r.nodes);
        out += "," + mean_std_cell(r.depth);
        out += "\n";
    }
    return out;
}

std::string details_csv(const SampleTable& table) {
    std::string out = "rep,method,auc,distance,nodes,depth,grid_depth,grid_min_leaf\n";
    size_t reps = 0;
    for (const auto& [name, samples] : table) reps = std::max(reps, samples.size());
    for (size_t r = 0; r < reps; ++r) {
        for (const auto& [name, samples] : table) {
            if (r >= samples.size()) continue;
            const MethodSample& s = samples[r];
            out += std::to_string(r) + "," + name;
            out += "," + fmt_g6(s.auc);
            out += "," + (s.has_distance ? fmt_g6(s.distance) : std::string("n/a"));
            out += "," + std::to_string(s.nodes);
            out += "," + std::to_string(s.depth);
            out += "," + std::to_string(s.grid_depth);
            out += "," + std::to_string(s.grid_min_leaf);
            out += "\n";
        }
    }
    return out;
}

std::string curve_csv(const SensitivityCurve& curve) {
    std::string out = "theta,mean_scaled_distance,std_scaled_distance,n\n";
    for (const CurvePoint& p : curve.points) {
        out += fmt_g6(p.theta);
        out += "," + fmt_g6(p.mean);
        out += "," + fmt_g6(p.stddev);
        out += "," + std::to_string(p.n);
        out += "\n";
    }
    return out;
}

namespace {

nlohmann::json metrics_json(const MethodMetrics& m) {
    nlohmann::json j;
    j["auc"] = m.auc;
    j["has_distance"] = m.has_distance;
    if (m.has_distance) j["distance"] = m.distance;
    j["nodes"] = m.nodes;
    j["depth"] = m.depth;
    j["grid_depth"] = m.grid_depth;
    j["grid_min_leaf"] = m.grid_min_leaf;
    j["importance"] = m.importance;
    return j;
}

std::string selection_name(SelectionRule rule) {
    switch (rule) {
        case SelectionRule::MaxAuc: return "max_auc";
        case SelectionRule::MinDistance: return "min_distance";
        case SelectionRule::EpsilonConstrained: return "epsilon_constrained";
        case SelectionRule::Balanced: return "balanced";
    }
    return "unknown";
}

}  // namespace

nlohmann::json pipeline_report_json(const PipelineResult& result, const FeatureSpace& space) {
    nlohmann::json j;
    j["tool"] = "treestab";
    j["version"] = kToolVersion;
    j["kind"] = "stability_report";

    nlohmann::json cfg;
    cfg["depth_grid"] = result.cfg.grid.depth_grid;
    cfg["min_leaf_grid"] = result.cfg.grid.min_leaf_grid;
    cfg["bootstraps_per_cell"] = result.cfg.grid.bootstraps_per_cell;
    cfg["repetitions"] = result.cfg.repetitions;
    cfg["holdout_fraction"] = result.cfg.holdout_fraction;
    cfg["batch_fraction"] = result.cfg.batch_fraction;
    cfg["selection"] = selection_name(result.cfg.selection);
    cfg["epsilon"] = result.cfg.epsilon;
    cfg["three_objectives"] = result.cfg.three_objectives;
    cfg["three_way_split"] = result.cfg.three_way_split;
    cfg["validation_fraction"] = result.cfg.validation_fraction;
    cfg["cv_folds"] = result.cfg.cv_folds;
    cfg["forest_trees"] = result.cfg.forest_trees;
    cfg["seed"] = result.cfg.seed;
    j["config"] = cfg;
    j["distance_config"] = {{"scale_depth", result.dcfg.scale_depth},
                            {"lambda", result.dcfg.lambda}};
    j["feature_names"] = [&] {
        std::vector<std::string> names;
        for (const Feature& f : space.features) names.push_back(f.name);
        return names;
    }();

    nlohmann::json reps = nlohmann::json::array();
    for (const RepetitionResult& rep : result.reps) {
        nlohmann::json jr;
        jr["rep"] = rep.rep;
        jr["failed"] = rep.failed;
        if (rep.failed) {
            jr["failure"] = rep.failure;
            reps.push_back(std::move(jr));
            continue;
        }
        nlohmann::json scored = nlohmann::json::array();
        for (const ScoredTree& s : rep.scored) {
            scored.push_back({{"index", s.index},
                              {"distance", s.distance},
                              {"auc", s.auc},
                              {"nodes", s.nodes},
                              {"depth", s.depth}});
        }
        jr["scored"] = std::move(scored);
        jr["frontier"] = rep.frontier;
        jr["selected"] = {{"scored_index", rep.selected.scored_index},
                          {"fallback", rep.selected.fallback}};
        nlohmann::json methods;
        methods["pareto_auc"] = metrics_json(rep.pareto_auc);
        methods["pareto_distance"] = metrics_json(rep.pareto_distance);
        methods["selected"] = metrics_json(rep.selected_tree);
        methods["cv"] = metrics_json(rep.cv);
        methods["forest"] = metrics_json(rep.forest);
        jr["methods"] = std::move(methods);
        reps.push_back(std::move(jr));
    }
    j["repetitions"] = std::move(reps);

    nlohmann::json aggs = nlohmann::json::array();
    for (const MethodAggregate& row : aggregate_samples(samples_from_pipeline(result))) {
        nlohmann::json ja;
        ja["method"] = row.method;
        ja["auc_mean"] = row.auc.mean;
        ja["auc_std"] = row.auc.stddev;
        ja["has_distance"] = row.has_distance;
        if (row.has_distance) {
            ja["distance_mean"] = row.distance.mean;
            ja["distance_std"] = row.distance.stddev;
        }
        ja["importance_std_mean"] = row.importance_std_mean;
        ja["top3_distinct"] = row.top3_distinct;
        ja["nodes_mean"] = row.nodes.mean;
        ja["nodes_std"] = row.nodes.stddev;
        ja["depth_mean"] = row.depth.mean;
        ja["depth_std"] = row.depth.stddev;
        ja["n"] = row.auc.n;
        aggs.push_back(std::move(ja));
    }
    j["aggregates"] = std::move(aggs);
    return j;
}

nlohmann::json manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = "treestab";
    j["version"] = kToolVersion;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["seed"] = m.seed;
    j["config"] = m.config;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [path, digest] : m.inputs) inputs[path] = digest;
    j["inputs"] = std::move(inputs);
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& [path, digest] : m.outputs) outputs[path] = digest;
    j["outputs"] = std::move(outputs);
    return j;
}

void write_output_with_manifest(const std::string& path, const std::string& content,
                                RunManifest manifest) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        require_data(f.good(), "cannot write output file: " + path);
        f << content;
        require_data(f.good(), "failed writing output file: " + path);
    }
    manifest.outputs.emplace_back(path, bytes_digest(content));
    const std::string mpath = path + ".manifest.json";
    std::ofstream mf(mpath, std::ios::binary | std::ios::trunc);
    require_data(mf.good(), "cannot write manifest file: " + mpath);
    mf << manifest_json(manifest).dump(2) << "\n";
    require_data(mf.good(), "failed writing manifest file: " + mpath);
}

std::string read_verified_output(const std::string& path) {
    const std::string content = read_file(path);
    const std::string mpath = path + ".manifest.json";
    nlohmann::json manifest;
    {
        std::ifstream mf(mpath, std::ios::binary);
        require_data(mf.good(), "missing manifest sidecar: " + mpath);
        try {
            mf >> manifest;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(mpath + ": invalid JSON: " + e.what());
        }
    }
    require_data(manifest.contains("outputs") && manifest["outputs"].is_object() &&
                     !manifest["outputs"].empty(),
                 mpath + ": no output digests recorded");
    std::string recorded;
    if (manifest["outputs"].contains(path)) {
        recorded = manifest["outputs"][path].get<std::string>();
    } else {
        // the file may have been written under a different working directory;
        // fall back to matching by file name
        const std::string base = std::filesystem::path(path).filename().string();
        int hits = 0;
        for (const auto& [key, digest] : manifest["outputs"].items()) {
            if (std::filesystem::path(key).filename().string() == base) {
                recorded = digest.get<std::string>();
                ++hits;
            }
        }
        require_data(hits == 1, mpath + ": no digest recorded for " + path);
    }
    const std::string actual = bytes_digest(content);
    if (recorded != actual)
        throw DataError("manifest digest mismatch for " + path + ": recorded " + recorded +
                        ", file is " + actual + "; refusing stale or edited inputs");
    return content;
}

}  // namespace treestab
