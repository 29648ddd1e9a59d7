// domset command-line tool: dataset generation, exact solving, surrogate
// training, evaluation, ablations, runtime benchmarks and label verification.
//
// Exit codes: 0 success, 2 usage error, 3 data/integrity error,
// 4 resource/budget error. DOMSET_LOG=debug|info|warn|error controls logging.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "domset/domset.hpp"

namespace {

using namespace domset;

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

LogLevel log_threshold() {
    const char* env = std::getenv("DOMSET_LOG");
    if (!env) return LogLevel::Info;
    const std::string v = env;
    if (v == "debug") return LogLevel::Debug;
    if (v == "warn") return LogLevel::Warn;
    if (v == "error") return LogLevel::Error;
    return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg) {
    static const LogLevel threshold = log_threshold();
    if (level < threshold) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

std::string witness_str(const VertexSet& witness) {
    std::string out;
    for (std::size_t i = 0; i < witness.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(witness[i]);
    }
    return out;
}

// --- shared option bundles --------------------------------------------------

struct SplitFlags {
    std::string which = "all";  // all | train | val | test
    double test_frac = 0.2;
    double val_frac = 0.1;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--split", which, "Evaluate this part of the dataset")
            ->check(CLI::IsMember({"all", "train", "val", "test"}))
            ->capture_default_str();
        cmd->add_option("--test-frac", test_frac, "Test fraction used when splitting")
            ->capture_default_str();
        cmd->add_option("--val-frac", val_frac, "Validation fraction used when splitting")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Split seed")->capture_default_str();
    }

    std::vector<LabeledInstance> select(const Dataset& ds) const {
        if (which == "all") return ds.instances;
        DatasetSplit split = split_dataset(ds, test_frac, val_frac, seed);
        if (which == "train") return split.train;
        if (which == "val") return split.val;
        return split.test;
    }
};

// --- subcommand implementations ----------------------------------------------

int run_generate(const std::string& family, int count, std::uint64_t seed, int n_min, int n_max,
                 int jobs, std::uint64_t budget, const std::string& out) {
    GenerateOptions opt;
    opt.family = family_from_name(family);
    opt.count = count;
    opt.n_min = n_min;
    opt.n_max = n_max;
    opt.seed = seed;
    opt.jobs = jobs;
    opt.solver_budget = budget;
    opt.log = [](const std::string& msg) { log(LogLevel::Warn, msg); };

    const Dataset ds = generate_dataset(opt);
    save_dataset(ds, out);
    std::cout << "wrote " << ds.size() << " " << family << " instances to " << out << "\n";
    return 0;
}

int run_solve(const std::string& graph_file, const std::string& edge_list, int n_override,
              bool brute, std::uint64_t budget) {
    Graph g;
    if (!graph_file.empty()) {
        std::ifstream in(graph_file);
        if (!in) throw DataError("cannot open graph file " + graph_file);
        std::string line;
        while (std::getline(in, line) && line.empty()) {
        }
        if (line.empty()) throw DataError("graph file " + graph_file + " is empty");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed graph JSON: " + std::string(e.what()), 1);
        }
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        g = Graph::from_edges(j.at("n").get<int>(), edges);
    } else if (!edge_list.empty()) {
        std::vector<std::pair<int, int>> edges;
        int max_vertex = -1;
        std::size_t at = 0;
        while (at < edge_list.size()) {
            auto next = edge_list.find(',', at);
            if (next == std::string::npos) next = edge_list.size();
            const std::string token = edge_list.substr(at, next - at);
            const auto dash = token.find('-');
            if (dash == std::string::npos)
                throw ParamError("bad edge token \"" + token + "\" (expected u-v)");
            try {
                const int u = std::stoi(token.substr(0, dash));
                const int v = std::stoi(token.substr(dash + 1));
                edges.emplace_back(u, v);
                max_vertex = std::max({max_vertex, u, v});
            } catch (const std::exception&) {
                throw ParamError("bad edge token \"" + token + "\" (expected u-v)");
            }
            at = next + 1;
        }
        const int n = n_override > 0 ? n_override : max_vertex + 1;
        g = Graph::from_edges(n, edges);
    } else {
        throw ParamError("solve needs --graph or --edges");
    }

    const SolveResult r = brute ? domination_number_bruteforce(g)
                                : domination_number(g, budget ? std::optional(budget)
                                                              : std::nullopt);
    std::cout << "gamma=" << r.gamma << " witness=" << witness_str(r.witness)
              << " nodes=" << r.nodes_explored << "\n";
    log(LogLevel::Info, "solved n=" + std::to_string(g.vertex_count()) + " in " +
                            std::to_string(r.elapsed.count()) + " ms");
    return 0;
}

int run_train(const std::string& config_path, const std::string& out,
              const std::string& history_path) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    log(LogLevel::Info, "training " + cfg.train.model_kind + " on " + cfg.data);
    const Dataset ds = load_dataset(cfg.data);
    const DatasetSplit split =
        split_dataset(ds, cfg.train.test_frac, cfg.train.val_frac, cfg.train.seed);
    log(LogLevel::Info, "split: train=" + std::to_string(split.train.size()) +
                            " val=" + std::to_string(split.val.size()) +
                            " test=" + std::to_string(split.test.size()));

    TrainHistory history;
    if (cfg.train.model_kind == "cnn") {
        CnnModel model = train_cnn(split, cfg.train, &history);
        save_checkpoint(model, out);
    } else {
        GnnModel model = train_gnn(split, cfg.train, &history);
        save_checkpoint(model, out);
    }
    const std::string hist_file = history_path.empty() ? out + ".history.csv" : history_path;
    atomic_write(hist_file, history.to_csv());

    char buf[160];
    std::snprintf(buf, sizeof(buf), "trained %zu epochs, best epoch %d, best val MAE %.6f\n",
                  history.epochs.size(), history.best_epoch, history.best_val_mae);
    std::cout << buf << "checkpoint: " << out << "\nhistory: " << hist_file << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             const std::string& config_path, SplitFlags& split_flags, bool buckets,
             const std::string& json_out) {
    if (!config_path.empty()) {
        const ExperimentConfig cfg = ExperimentConfig::load(config_path);
        split_flags.test_frac = cfg.train.test_frac;
        split_flags.val_frac = cfg.train.val_frac;
        split_flags.seed = cfg.train.seed;
    }
    SurrogateModel model = SurrogateModel::load(model_path);
    const Dataset ds = load_dataset(data_path);
    const auto instances = split_flags.select(ds);
    if (instances.empty()) throw DataError("selected split is empty");
    const EvalReport report = evaluate(model, instances);

    std::cout << eval_report_table(report, model.kind() + std::string(" on ") + data_path +
                                               " [" + split_flags.which + "]");
    if (!buckets) log(LogLevel::Debug, "bucket breakdown always included in JSON output");
    if (!json_out.empty()) {
        atomic_write(json_out, eval_report_to_json(report).dump(2) + "\n");
        log(LogLevel::Info, "report written to " + json_out);
    }
    return 0;
}

int run_ablate(const std::string& config_path, const std::string& json_out) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (cfg.train.model_kind != "gin")
        throw ParamError("ablate runs on gin configs, got model " + cfg.train.model_kind);
    const Dataset ds = load_dataset(cfg.data);
    const DatasetSplit split =
        split_dataset(ds, cfg.train.test_frac, cfg.train.val_frac, cfg.train.seed);
    const AblationResult result = pooling_ablation(split, cfg.train);

    char buf[128];
    std::cout << "Pooling strategies (test MAE, " << result.mean_add.n_eval << " graphs)\n";
    std::snprintf(buf, sizeof(buf), "  mean + add pooling  %7.3f\n",
                  result.mean_add.overall.mae);
    std::cout << buf;
    std::snprintf(buf, sizeof(buf), "  mean pooling only   %7.3f\n",
                  result.mean_only.overall.mae);
    std::cout << buf;

    if (!json_out.empty()) {
        nlohmann::ordered_json j;
        j["mean_add"] = eval_report_to_json(result.mean_add);
        j["mean_only"] = eval_report_to_json(result.mean_only);
        atomic_write(json_out, j.dump(2) + "\n");
    }
    return 0;
}

int run_bench(const std::string& data_path, int trials, const std::string& cnn_path,
              const std::string& gin_path, const std::string& json_out) {
    const Dataset ds = load_dataset(data_path);
    std::vector<Graph> graphs;
    for (const auto& inst : ds.instances) {
        if (inst.graph.vertex_count() != 64)
            throw ParamError("bench expects 64-vertex graphs, found n=" +
                             std::to_string(inst.graph.vertex_count()) + " (" + inst.id + ")");
        graphs.push_back(inst.graph);
    }
    // Latency does not depend on the weights, so fresh models are fine when
    // no checkpoints are supplied.
    CnnModel cnn = cnn_path.empty() ? CnnModel(0) : load_cnn(cnn_path);
    GnnModel gnn = gin_path.empty() ? GnnModel(64, Pooling::MeanAdd, 0) : load_gnn(gin_path);

    const RuntimeReport report = benchmark_runtime(graphs, trials, cnn, gnn);
    std::cout << runtime_report_table(report);
    if (!json_out.empty()) atomic_write(json_out, runtime_report_to_json(report).dump(2) + "\n");
    return 0;
}

int run_crossdomain(const std::string& model_er_path, const std::string& model_ba_path,
                    const std::string& data_er_path, const std::string& data_ba_path,
                    SplitFlags& split_flags, const std::string& json_out) {
    SurrogateModel model_er = SurrogateModel::load(model_er_path);
    SurrogateModel model_ba = SurrogateModel::load(model_ba_path);
    const auto test_er = split_flags.select(load_dataset(data_er_path));
    const auto test_ba = split_flags.select(load_dataset(data_ba_path));
    if (test_er.empty() || test_ba.empty()) throw DataError("selected split is empty");

    const CrossDomainGrid grid = cross_domain_eval(model_er, model_ba, test_er, test_ba);
    auto cell = [](const EvalReport& r) {
        char buf[64];
        if (r.overall.r2_defined)
            std::snprintf(buf, sizeof(buf), "mae %.3f / r2 %.3f", r.overall.mae, r.overall.r2);
        else
            std::snprintf(buf, sizeof(buf), "mae %.3f / r2 n/a", r.overall.mae);
        return std::string(buf);
    };
    std::cout << "Cross-domain grid [" << split_flags.which << " split]\n";
    std::cout << "  er-trained on er:  " << cell(grid.er_model_on_er) << "\n";
    std::cout << "  er-trained on ba:  " << cell(grid.er_model_on_ba) << "\n";
    std::cout << "  ba-trained on er:  " << cell(grid.ba_model_on_er) << "\n";
    std::cout << "  ba-trained on ba:  " << cell(grid.ba_model_on_ba) << "\n";
    if (!json_out.empty()) atomic_write(json_out, cross_domain_to_json(grid).dump(2) + "\n");
    return 0;
}

int run_verify(const std::string& data_path, int max_n, bool full) {
    const Dataset ds = load_dataset(data_path);
    const VerifyReport report = verify_dataset(ds, max_n, full);
    std::cout << "verified " << report.checked << " labels, skipped " << report.skipped << "\n";
    for (const auto& m : report.mismatches) std::cout << "mismatch: " << m << "\n";
    if (!report.mismatches.empty())
        throw DataError(std::to_string(report.mismatches.size()) + " label mismatches in " +
                        data_path);
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& json_out) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const Dataset ds = load_dataset(cfg.data);
    const DatasetSplit split =
        split_dataset(ds, cfg.train.test_frac, cfg.train.val_frac, cfg.train.seed);
    const SweepResult result = grid_sweep(split, cfg.train);

    std::cout << "Grid search (validation MAE)\n";
    for (const auto& e : result.entries) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "  width %3d  %-9s  %7.4f\n", e.hidden_width,
                      pooling_name(e.pooling).c_str(), e.val_mae);
        std::cout << buf;
    }
    std::cout << "best: width " << result.best_config.hidden_width << ", "
              << pooling_name(result.best_config.pooling) << "\n";
    std::cout << eval_report_table(result.best_test_report, "best configuration on test");

    if (!json_out.empty()) {
        nlohmann::ordered_json j;
        j["entries"] = nlohmann::ordered_json::array();
        for (const auto& e : result.entries)
            j["entries"].push_back({{"hidden_width", e.hidden_width},
                                    {"pooling", pooling_name(e.pooling)},
                                    {"val_mae", e.val_mae}});
        j["best"] = {{"hidden_width", result.best_config.hidden_width},
                     {"pooling", pooling_name(result.best_config.pooling)}};
        j["best_test"] = eval_report_to_json(result.best_test_report);
        atomic_write(json_out, j.dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"domination-number toolkit: exact solver and neural surrogates"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Generate and label a dataset");
    std::string gen_family = "er", gen_out;
    int gen_count = 2000, gen_n_min = 5, gen_n_max = 64, gen_jobs = 1;
    std::uint64_t gen_seed = 0, gen_budget = 50'000'000;
    generate->add_option("--family", gen_family, "Graph family")
        ->check(CLI::IsMember({"er", "ba"}))->capture_default_str();
    generate->add_option("--count", gen_count, "Number of instances")->capture_default_str();
    generate->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
    generate->add_option("--n-min", gen_n_min, "Smallest vertex count")->capture_default_str();
    generate->add_option("--n-max", gen_n_max, "Largest vertex count")->capture_default_str();
    generate->add_option("--jobs", gen_jobs, "Parallel labeling threads")->capture_default_str();
    generate->add_option("--budget", gen_budget, "Solver node budget per instance")
        ->capture_default_str();
    generate->add_option("--out", gen_out, "Output JSON-Lines path")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "Compute the domination number of one graph");
    std::string solve_graph, solve_edges;
    int solve_n = 0;
    bool solve_brute = false;
    std::uint64_t solve_budget = 0;
    solve->add_option("--graph", solve_graph, "JSON file with {\"n\":..., \"edges\":[[u,v],...]}");
    solve->add_option("--edges", solve_edges, "Inline edge list, e.g. \"0-1,1-2\"");
    solve->add_option("--n", solve_n, "Vertex count override (else max endpoint + 1)");
    solve->add_flag("--brute-force", solve_brute, "Use the exhaustive oracle (n <= 16)");
    solve->add_option("--budget", solve_budget, "Node budget (0 = unlimited)");

    // train
    auto* train = app.add_subcommand("train", "Train a surrogate from a config file");
    std::string train_config, train_out, train_history;
    train->add_option("--config", train_config, "Experiment config JSON")->required();
    train->add_option("--out", train_out, "Checkpoint output path")->required();
    train->add_option("--history", train_history, "History CSV path (default <out>.history.csv)");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    std::string eval_model, eval_data, eval_config, eval_json;
    bool eval_buckets = false;
    SplitFlags eval_split;
    eval->add_option("--model", eval_model, "Checkpoint path")->required();
    eval->add_option("--data", eval_data, "Dataset JSON-Lines path")->required();
    eval->add_option("--config", eval_config, "Config whose split settings to reuse");
    eval->add_flag("--buckets", eval_buckets, "Show the per-size breakdown (always in JSON)");
    eval->add_option("--json", eval_json, "Write the report JSON here");
    eval_split.attach(eval);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Compare MeanAdd vs MeanOnly pooling");
    std::string ablate_config, ablate_json;
    ablate->add_option("--config", ablate_config, "Experiment config JSON")->required();
    ablate->add_option("--json", ablate_json, "Write the comparison JSON here");

    // bench
    auto* bench = app.add_subcommand("bench", "Runtime comparison on 64-vertex graphs");
    std::string bench_data, bench_cnn, bench_gin, bench_json;
    int bench_trials = 20;
    bench->add_option("--data", bench_data, "Dataset of 64-vertex graphs")->required();
    bench->add_option("--trials", bench_trials, "Timed passes per method")->capture_default_str();
    bench->add_option("--model-cnn", bench_cnn, "CNN checkpoint (optional)");
    bench->add_option("--model-gin", bench_gin, "GIN checkpoint (optional)");
    bench->add_option("--json", bench_json, "Write the runtime report JSON here");

    // crossdomain
    auto* cross = app.add_subcommand("crossdomain", "2x2 in-domain vs cross-domain grid");
    std::string cross_model_er, cross_model_ba, cross_data_er, cross_data_ba, cross_json;
    SplitFlags cross_split;
    cross_split.which = "test";
    cross->add_option("--model-er", cross_model_er, "Checkpoint trained on ER")->required();
    cross->add_option("--model-ba", cross_model_ba, "Checkpoint trained on BA")->required();
    cross->add_option("--data-er", cross_data_er, "ER dataset")->required();
    cross->add_option("--data-ba", cross_data_ba, "BA dataset")->required();
    cross->add_option("--json", cross_json, "Write the grid JSON here");
    cross_split.attach(cross);

    // verify
    auto* verify = app.add_subcommand("verify", "Re-check stored labels against the solver");
    std::string verify_data;
    int verify_max_n = 14;
    bool verify_full = false;
    verify->add_option("--data", verify_data, "Dataset JSON-Lines path")->required();
    verify->add_option("--max-n", verify_max_n, "Brute-force re-check up to this size")
        ->capture_default_str();
    verify->add_flag("--full", verify_full, "Also re-check larger instances by branch and bound");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Grid search over width and pooling");
    std::string sweep_config, sweep_json;
    sweep->add_option("--config", sweep_config, "Experiment config JSON")->required();
    sweep->add_option("--json", sweep_json, "Write sweep results JSON here");

    try {
        app.parse(argc, argv);

        if (*generate)
            return run_generate(gen_family, gen_count, gen_seed, gen_n_min, gen_n_max, gen_jobs,
                                gen_budget, gen_out);
        if (*solve) return run_solve(solve_graph, solve_edges, solve_n, solve_brute, solve_budget);
        if (*train) return run_train(train_config, train_out, train_history);
        if (*eval)
            return run_eval(eval_model, eval_data, eval_config, eval_split, eval_buckets,
                            eval_json);
        if (*ablate) return run_ablate(ablate_config, ablate_json);
        if (*bench) return run_bench(bench_data, bench_trials, bench_cnn, bench_gin, bench_json);
        if (*cross)
            return run_crossdomain(cross_model_er, cross_model_ba, cross_data_er, cross_data_ba,
                                   cross_split, cross_json);
        if (*verify) return run_verify(verify_data, verify_max_n, verify_full);
        if (*sweep) return run_sweep(sweep_config, sweep_json);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: kind=usage message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const domset::BudgetError& e) {
        std::cerr << "error: kind=resource message=\"" << e.what() << "\"\n";
        return 4;
    } catch (const domset::DivergenceError& e) {
        std::cerr << "error: kind=resource message=\"" << e.what() << "\"\n";
        return 4;
    } catch (const domset::DataError& e) {
        std::cerr << "error: kind=data message=\"" << e.what() << "\"\n";
        return 3;
    } catch (const std::exception& e) {
        // ParamError, IndexError, ShapeError, ContractError: caller misuse.
        std::cerr << "error: kind=usage message=\"" << e.what() << "\"\n";
        return 2;
    }
}
