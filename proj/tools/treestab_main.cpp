#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treestab/cart.hpp"
#include "treestab/dataset.hpp"
#include "treestab/errors.hpp"
#include "treestab/experiments.hpp"
#include "treestab/report.hpp"
#include "treestab/stability.hpp"
#include "treestab/tree_io.hpp"
#include "treestab/util.hpp"

using namespace treestab;
using nlohmann::json;

namespace {

struct GlobalOpts {
    uint64_t seed = 0;
    int threads = 1;
    std::string out_dir;
    std::vector<std::string> argv;
};

std::string resolve_out(const GlobalOpts& g, const std::string& path) {
    if (g.out_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(g.out_dir) / path).string();
}

RunManifest base_manifest(const GlobalOpts& g, const std::string& command, json config) {
    RunManifest m;
    m.command = command;
    m.argv = g.argv;
    m.seed = g.seed;
    config["seed"] = g.seed;
    config["threads"] = g.threads;
    m.config = std::move(config);
    return m;
}

// "a:b:step" (inclusive, step > 0) or a comma-separated list
std::vector<double> parse_real_grid(const std::string& s) {
    std::vector<double> out;
    auto parse_one = [](const std::string& tok) {
        try {
            size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw UsageError("cannot parse grid value '" + tok + "'");
        }
    };
    const size_t c1 = s.find(':');
    if (c1 != std::string::npos) {
        const size_t c2 = s.find(':', c1 + 1);
        if (c2 == std::string::npos) throw UsageError("grid ranges use start:stop:step");
        const double start = parse_one(s.substr(0, c1));
        const double stop = parse_one(s.substr(c1 + 1, c2 - c1 - 1));
        const double step = parse_one(s.substr(c2 + 1));
        if (!(step > 0)) throw UsageError("grid step must be positive");
        for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
        // snap values that land within rounding noise of a clean multiple
        for (double& v : out) v = std::round(v * 1e9) / 1e9;
        return out;
    }
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(parse_one(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (out.empty()) throw UsageError("empty grid");
    return out;
}

// "lo:hi" (inclusive, step 1) or a comma-separated list
std::vector<int> parse_int_grid(const std::string& s) {
    std::vector<int> out;
    auto parse_one = [](const std::string& tok) {
        try {
            size_t pos = 0;
            const int v = std::stoi(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw UsageError("cannot parse grid value '" + tok + "'");
        }
    };
    const size_t c1 = s.find(':');
    if (c1 != std::string::npos) {
        const int lo = parse_one(s.substr(0, c1));
        const int hi = parse_one(s.substr(c1 + 1));
        if (hi < lo) throw UsageError("grid range must be ascending");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(parse_one(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (out.empty()) throw UsageError("empty grid");
    return out;
}

SelectionRule parse_selection(const std::string& s, double& epsilon) {
    if (s == "max_auc") return SelectionRule::MaxAuc;
    if (s == "min_distance") return SelectionRule::MinDistance;
    if (s == "balanced") return SelectionRule::Balanced;
    const std::string prefix = "epsilon";
    if (s.rfind(prefix, 0) == 0) {
        if (s.size() > prefix.size()) {
            if (s[prefix.size()] != ':')
                throw UsageError("selection rule syntax: epsilon:<value>");
            const std::string num = s.substr(prefix.size() + 1);
            try {
                size_t pos = 0;
                epsilon = std::stod(num, &pos);
                if (pos != num.size()) throw std::invalid_argument(num);
            } catch (const std::exception&) {
                throw UsageError("cannot parse epsilon value '" + num + "'");
            }
        }
        return SelectionRule::EpsilonConstrained;
    }
    throw UsageError("unknown selection rule '" + s +
                     "' (use max_auc | min_distance | epsilon[:x] | balanced)");
}

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path,
                     RunManifest& manifest, long* clamped = nullptr) {
    Schema schema = load_schema_file(schema_path);
    IngestResult r = load_csv_file(csv_path, schema);
    manifest.inputs.emplace_back(csv_path, file_digest(csv_path));
    manifest.inputs.emplace_back(schema_path, file_digest(schema_path));
    if (r.clamped > 0)
        std::cerr << "warning: " << r.clamped << " numeric cell(s) clamped to schema bounds\n";
    if (clamped) *clamped = r.clamped;
    return std::move(r.data);
}

int cmd_train(const GlobalOpts& g, const std::string& data_path, const std::string& schema_path,
              int max_depth, int min_leaf, const std::string& out) {
    json cfg{{"max_depth", max_depth}, {"min_samples_leaf", min_leaf}};
    RunManifest manifest = base_manifest(g, "train", cfg);
    Dataset data = load_dataset(data_path, schema_path, manifest);

    TrainConfig tc;
    tc.max_depth = max_depth;
    tc.min_samples_leaf = min_leaf;
    tc.seed = g.seed;
    DecisionTree tree = train_tree(data, tc);

    const std::string path = resolve_out(g, out);
    write_output_with_manifest(path, serialize_tree(tree, data.space).dump(2) + "\n", manifest);
    std::cerr << "trained tree: depth " << tree.depth() << ", " << tree.node_count()
              << " nodes -> " << path << "\n";
    return 0;
}

int cmd_distance(const GlobalOpts& g, const std::string& tree1_path,
                 const std::string& tree2_path, double lambda, int scale_depth,
                 bool emit_matching, const std::string& out) {
    TreeDocument t1 = read_tree_file(tree1_path);
    TreeDocument t2 = read_tree_file(tree2_path);
    require_data(t1.space_digest == t2.space_digest,
                 "the two trees live in different feature spaces (digest mismatch)");

    DistanceConfig dc;
    dc.lambda = lambda;  // negative keeps the 2d policy
    dc.scale_depth = scale_depth;
    MatchResult r = tree_distance(t1.tree, t2.tree, t1.space, dc);

    json cfg{{"lambda", r.lambda},
             {"lambda_policy", lambda >= 0 ? "explicit" : "2d"},
             {"scale_depth", r.scale_depth},
             {"emit_matching", emit_matching}};
    RunManifest manifest = base_manifest(g, "distance", cfg);
    manifest.inputs.emplace_back(tree1_path, file_digest(tree1_path));
    manifest.inputs.emplace_back(tree2_path, file_digest(tree2_path));

    json doc;
    doc["tool"] = "treestab";
    doc["version"] = kToolVersion;
    doc["kind"] = "distance_report";
    doc["raw"] = r.raw;
    doc["scaled"] = r.scaled;
    doc["lambda"] = r.lambda;
    doc["scale_depth"] = r.scale_depth;
    doc["bound"] = r.bound;
    doc["tree1"] = {{"path", tree1_path}, {"depth", t1.tree.depth()},
                    {"nodes", t1.tree.node_count()}};
    doc["tree2"] = {{"path", tree2_path}, {"depth", t2.tree.depth()},
                    {"nodes", t2.tree.node_count()}};
    if (emit_matching) {
        json matched = json::array();
        for (const MatchedPair& mp : r.matched)
            matched.push_back({{"first", mp.first}, {"second", mp.second},
                               {"distance", mp.distance}});
        json unmatched = json::array();
        for (const UnmatchedPath& up : r.unmatched)
            unmatched.push_back({{"index", up.index}, {"weight", up.weight}});
        doc["matching"] = {{"larger_is_first", r.larger_is_first},
                           {"matched", std::move(matched)},
                           {"unmatched", std::move(unmatched)}};
    }

    const std::string body = doc.dump(2) + "\n";
    if (out.empty()) {
        std::cout << body;
    } else {
        write_output_with_manifest(resolve_out(g, out), body, manifest);
    }
    std::cerr << "raw " << fmt_g6(r.raw) << ", scaled " << fmt_g6(r.scaled) << "\n";
    return 0;
}

json grid_json(const GridConfig& grid) {
    return json{{"depth_grid", grid.depth_grid},
                {"min_leaf_grid", grid.min_leaf_grid},
                {"bootstraps_per_cell", grid.bootstraps_per_cell}};
}

int cmd_stabilize(const GlobalOpts& g, const std::string& data_path,
                  const std::string& schema_path, const PipelineConfig& cfg_in,
                  const std::string& selection_raw, const std::string& out) {
    PipelineConfig cfg = cfg_in;
    cfg.seed = g.seed;
    cfg.threads = g.threads;

    json jc = grid_json(cfg.grid);
    jc["repetitions"] = cfg.repetitions;
    jc["holdout_fraction"] = cfg.holdout_fraction;
    jc["batch_fraction"] = cfg.batch_fraction;
    jc["selection"] = selection_raw;
    jc["epsilon"] = cfg.epsilon;
    jc["objectives"] = cfg.three_objectives ? 3 : 2;
    jc["three_way_split"] = cfg.three_way_split;
    jc["cv_folds"] = cfg.cv_folds;
    jc["forest_trees"] = cfg.forest_trees;
    RunManifest manifest = base_manifest(g, "stabilize", jc);
    Dataset data = load_dataset(data_path, schema_path, manifest);

    PipelineResult result = run_pipeline(data, cfg);
    int failed = 0;
    for (const RepetitionResult& rep : result.reps)
        if (rep.failed) ++failed;
    if (failed > 0)
        std::cerr << "warning: " << failed << " repetition(s) failed degenerately and were "
                  << "recorded but skipped\n";

    const std::string path = resolve_out(g, out);
    write_output_with_manifest(path, pipeline_report_json(result, data.space).dump(2) + "\n",
                               manifest);
    std::cerr << "stability report (" << result.reps.size() << " repetitions) -> " << path
              << "\n";
    return 0;
}

int cmd_cv_baseline(const GlobalOpts& g, const std::string& data_path,
                    const std::string& schema_path, const GridConfig& grid, int folds,
                    const std::string& out) {
    json jc = grid_json(grid);
    jc["folds"] = folds;
    RunManifest manifest = base_manifest(g, "cv-baseline", jc);
    Dataset data = load_dataset(data_path, schema_path, manifest);

    CvResult cv = cv_baseline(data, grid, folds, g.seed);
    const std::string path = resolve_out(g, out);
    write_output_with_manifest(path, serialize_tree(cv.tree, data.space).dump(2) + "\n",
                               manifest);
    double best = -1;
    for (double m : cv.mean_auc) best = std::max(best, m);
    std::cerr << "cross-validation winner: depth " << cv.best_depth << ", min-leaf "
              << cv.best_min_leaf << ", mean fold AUC " << fmt_g6(best) << " -> " << path << "\n";
    return 0;
}

int cmd_perturb(const GlobalOpts& g, bool direct, const std::string& data_path,
                const std::string& schema_path, const PerturbationConfig& cfg_in,
                const std::string& grid_raw, const std::string& mode_raw,
                const std::string& out) {
    PerturbationConfig cfg = cfg_in;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    cfg.theta_grid = parse_real_grid(grid_raw);
    if (mode_raw == "symmetric") {
        cfg.mode = PerturbMode::Symmetric;
    } else if (mode_raw == "literal") {
        cfg.mode = PerturbMode::Literal;
    } else {
        throw UsageError("unknown perturbation mode '" + mode_raw +
                         "' (use symmetric | literal)");
    }

    json jc;
    jc["experiment"] = direct ? "direct" : "indirect";
    jc["theta_grid"] = cfg.theta_grid;
    jc["repetitions"] = cfg.repetitions;
    jc["mode"] = mode_raw;
    jc["cv_grid"] = grid_json(cfg.cv_grid);
    jc["cv_folds"] = cfg.cv_folds;
    jc["lambda"] = cfg.dcfg.lambda;
    jc["scale_depth"] = cfg.dcfg.scale_depth;
    RunManifest manifest = base_manifest(g, direct ? "perturb-direct" : "perturb-indirect", jc);
    Dataset data = load_dataset(data_path, schema_path, manifest);

    SensitivityCurve curve =
        direct ? direct_sensitivity(data, cfg) : indirect_sensitivity(data, cfg);
    const std::string path = resolve_out(g, out);
    write_output_with_manifest(path, curve_csv(curve), manifest);
    std::cerr << (direct ? "direct" : "indirect") << " sensitivity curve ("
              << curve.points.size() << " points x " << cfg.repetitions << " reps) -> " << path
              << "\n";
    return 0;
}

int cmd_report(const GlobalOpts& g, const std::string& report_path, const std::string& summary_out,
               const std::string& details_out) {
    RunManifest manifest = base_manifest(g, "report", json{{"input", report_path}});
    const std::string content = read_verified_output(report_path);
    manifest.inputs.emplace_back(report_path, bytes_digest(content));

    json report;
    try {
        report = json::parse(content);
    } catch (const json::exception& e) {
        throw DataError(report_path + ": invalid JSON: " + std::string(e.what()));
    }
    require_data(report.value("kind", "") == "stability_report",
                 report_path + ": not a stability report");

    SampleTable table = samples_from_report_json(report);
    std::vector<MethodAggregate> rows = aggregate_samples(table);

    // the stored aggregates must match a recomputation from the repetition details
    require_data(report.contains("aggregates") && report["aggregates"].is_array() &&
                     report["aggregates"].size() == rows.size(),
                 report_path + ": aggregate section is missing or malformed");
    for (size_t i = 0; i < rows.size(); ++i) {
        const json& ja = report["aggregates"][i];
        require_data(ja.value("method", "") == rows[i].method,
                     report_path + ": aggregate methods out of order");
        const double stored = ja.value("auc_mean", -1.0);
        require_data(std::abs(stored - rows[i].auc.mean) < 1e-9,
                     report_path + ": stored aggregates do not match repetition details");
    }

    RunManifest m2 = manifest;
    write_output_with_manifest(resolve_out(g, summary_out), summary_table_csv(rows), manifest);
    write_output_with_manifest(resolve_out(g, details_out), details_csv(table), m2);
    std::cerr << "aggregate table -> " << resolve_out(g, summary_out) << ", details -> "
              << resolve_out(g, details_out) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    GlobalOpts g;
    for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);

    CLI::App app{"decision-tree stability toolkit"};
    app.require_subcommand(1);
    app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker count (results are thread-count invariant)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "directory prefix for relative output paths");

    // train
    std::string tr_data, tr_schema, tr_out = "tree.json";
    int tr_depth = 5, tr_minleaf = 1;
    CLI::App* train = app.add_subcommand("train", "fit a single tree");
    train->add_option("data", tr_data, "training CSV")->required();
    train->add_option("--schema", tr_schema, "schema JSON")->required();
    train->add_option("--max-depth", tr_depth, "depth cap")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    train->add_option("--min-leaf", tr_minleaf, "minimum samples per leaf")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    train->add_option("--out", tr_out, "tree document path")->capture_default_str();

    // distance
    std::string d_t1, d_t2, d_policy = "2d", d_emit, d_out;
    double d_lambda = -1.0;
    int d_scale = 0;
    CLI::App* dist = app.add_subcommand("distance", "structural distance between two trees");
    dist->add_option("tree1", d_t1, "first tree document")->required();
    dist->add_option("tree2", d_t2, "second tree document")->required();
    dist->add_option("--lambda", d_lambda, "explicit label-mismatch weight (>= 0)");
    dist->add_option("--lambda-policy", d_policy, "lambda policy when not explicit (2d)")
        ->capture_default_str();
    dist->add_option("--scale-depth", d_scale,
                     "depth used for the scaling bound (0: max of the two depths)")
        ->capture_default_str();
    dist->add_option("--emit", d_emit, "extra sections to include (matching)");
    dist->add_option("--out", d_out, "write the report here instead of stdout");

    // stabilize
    std::string st_data, st_schema, st_out = "report.json", st_selection = "epsilon:0.05";
    std::string st_depth_grid = "3:12", st_minleaf_grid = "3,5,10,30,50";
    PipelineConfig st_cfg;
    int st_objectives = 2;
    CLI::App* stab = app.add_subcommand("stabilize", "two-batch Pareto stability pipeline");
    stab->add_option("data", st_data, "training CSV")->required();
    stab->add_option("--schema", st_schema, "schema JSON")->required();
    stab->add_option("--reps", st_cfg.repetitions, "repetitions")->capture_default_str();
    stab->add_option("--bootstraps", st_cfg.grid.bootstraps_per_cell,
                     "bootstraps per grid cell")
        ->capture_default_str();
    stab->add_option("--selection", st_selection,
                     "max_auc | min_distance | epsilon[:x] | balanced")
        ->capture_default_str();
    stab->add_option("--objectives", st_objectives, "2 or 3 (adds node count)")
        ->capture_default_str()
        ->check(CLI::Range(2, 3));
    stab->add_option("--depth-grid", st_depth_grid, "depth grid (lo:hi or list)")
        ->capture_default_str();
    stab->add_option("--min-leaf-grid", st_minleaf_grid, "min-leaf grid (lo:hi or list)")
        ->capture_default_str();
    stab->add_option("--holdout", st_cfg.holdout_fraction, "holdout fraction")
        ->capture_default_str();
    stab->add_option("--batch", st_cfg.batch_fraction, "first-batch fraction")
        ->capture_default_str();
    stab->add_option("--cv-folds", st_cfg.cv_folds, "folds for the CV baseline")
        ->capture_default_str();
    stab->add_option("--forest-trees", st_cfg.forest_trees, "bagging baseline size")
        ->capture_default_str();
    stab->add_flag("--three-way", st_cfg.three_way_split,
                   "score candidates on a validation slice instead of the holdout");
    stab->add_option("--out", st_out, "report JSON path")->capture_default_str();

    // cv-baseline
    std::string cv_data, cv_schema, cv_out = "cv_tree.json";
    std::string cv_depth_grid = "3:12", cv_minleaf_grid = "3,5,10,30,50";
    int cv_folds = 5;
    CLI::App* cvb = app.add_subcommand("cv-baseline", "grid-search a tree by cross-validation");
    cvb->add_option("data", cv_data, "training CSV")->required();
    cvb->add_option("--schema", cv_schema, "schema JSON")->required();
    cvb->add_option("--folds", cv_folds, "fold count")->capture_default_str();
    cvb->add_option("--depth-grid", cv_depth_grid, "depth grid (lo:hi or list)")
        ->capture_default_str();
    cvb->add_option("--min-leaf-grid", cv_minleaf_grid, "min-leaf grid (lo:hi or list)")
        ->capture_default_str();
    cvb->add_option("--out", cv_out, "tree document path")->capture_default_str();

    // perturb-direct / perturb-indirect
    struct PerturbCli {
        std::string data, schema, out, grid, mode = "symmetric";
        std::string depth_grid = "3:12", minleaf_grid = "3,5,10,30,50";
        PerturbationConfig cfg;
    };
    PerturbCli pd, pi;
    pd.out = "direct_curve.csv";
    pd.grid = "0.1:1.0:0.1";
    pd.cfg.repetitions = 100;
    pi.out = "indirect_curve.csv";
    pi.grid = "0.2:1.0:0.2";
    pi.cfg.repetitions = 10;

    auto add_perturb = [&](const char* name, const char* help, PerturbCli& p) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("data", p.data, "training CSV")->required();
        sub->add_option("--schema", p.schema, "schema JSON")->required();
        sub->add_option("--grid", p.grid, "theta grid (start:stop:step or list)")
            ->capture_default_str();
        sub->add_option("--reps", p.cfg.repetitions, "repetitions")->capture_default_str();
        sub->add_option("--mode", p.mode, "noise reading: symmetric | literal")
            ->capture_default_str();
        sub->add_option("--cv-folds", p.cfg.cv_folds, "folds for the base tree")
            ->capture_default_str();
        sub->add_option("--depth-grid", p.depth_grid, "base-tree depth grid")
            ->capture_default_str();
        sub->add_option("--min-leaf-grid", p.minleaf_grid, "base-tree min-leaf grid")
            ->capture_default_str();
        sub->add_option("--lambda", p.cfg.dcfg.lambda,
                        "explicit label-mismatch weight (negative: 2 * scale depth)");
        sub->add_option("--scale-depth", p.cfg.dcfg.scale_depth,
                        "distance scale depth (0: experiment default)");
        sub->add_option("--out", p.out, "curve CSV path")->capture_default_str();
        return sub;
    };
    CLI::App* pdirect =
        add_perturb("perturb-direct", "threshold-noise sensitivity curve", pd);
    CLI::App* pindirect =
        add_perturb("perturb-indirect", "training-data replacement sensitivity curve", pi);

    // report
    std::string rp_in, rp_summary = "summary.csv", rp_details = "details.csv";
    CLI::App* rep = app.add_subcommand("report", "render tables from a stability report");
    rep->add_option("report", rp_in, "report JSON produced by stabilize")->required();
    rep->add_option("--summary", rp_summary, "aggregate table CSV path")->capture_default_str();
    rep->add_option("--details", rp_details, "per-repetition CSV path")->capture_default_str();

    int rc = 0;
    try {
        app.parse(argc, argv);

        if (*train) {
            rc = cmd_train(g, tr_data, tr_schema, tr_depth, tr_minleaf, tr_out);
        } else if (*dist) {
            if (dist->count("--lambda") && dist->count("--lambda-policy"))
                throw UsageError("--lambda and --lambda-policy are mutually exclusive");
            if (d_policy != "2d")
                throw UsageError("unknown lambda policy '" + d_policy + "' (only '2d')");
            if (dist->count("--lambda") && d_lambda < 0)
                throw UsageError("--lambda must be non-negative");
            bool emit_matching = false;
            if (!d_emit.empty()) {
                if (d_emit != "matching")
                    throw UsageError("unknown --emit section '" + d_emit + "' (only 'matching')");
                emit_matching = true;
            }
            rc = cmd_distance(g, d_t1, d_t2, dist->count("--lambda") ? d_lambda : -1.0, d_scale,
                              emit_matching, d_out);
        } else if (*stab) {
            st_cfg.grid.depth_grid = parse_int_grid(st_depth_grid);
            st_cfg.grid.min_leaf_grid = parse_int_grid(st_minleaf_grid);
            st_cfg.three_objectives = st_objectives == 3;
            st_cfg.selection = parse_selection(st_selection, st_cfg.epsilon);
            rc = cmd_stabilize(g, st_data, st_schema, st_cfg, st_selection, st_out);
        } else if (*cvb) {
            GridConfig grid;
            grid.depth_grid = parse_int_grid(cv_depth_grid);
            grid.min_leaf_grid = parse_int_grid(cv_minleaf_grid);
            rc = cmd_cv_baseline(g, cv_data, cv_schema, grid, cv_folds, cv_out);
        } else if (*pdirect || *pindirect) {
            PerturbCli& p = *pdirect ? pd : pi;
            p.cfg.cv_grid.depth_grid = parse_int_grid(p.depth_grid);
            p.cfg.cv_grid.min_leaf_grid = parse_int_grid(p.minleaf_grid);
            rc = cmd_perturb(g, static_cast<bool>(*pdirect), p.data, p.schema, p.cfg, p.grid,
                             p.mode, p.out);
        } else if (*rep) {
            rc = cmd_report(g, rp_in, rp_summary, rp_details);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help exits 0; every parse failure is a usage error
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }

    const auto dt = std::chrono::steady_clock::now() - t0;
    std::cerr << "elapsed_ms="
              << std::chrono::duration_cast<std::chrono::milliseconds>(dt).count() << "\n";
    return rc;
}
