#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "domset/train.hpp"

namespace domset {

struct AblationResult {
    EvalReport mean_add;
    EvalReport mean_only;
};

// Trains two GINs that differ only in readout pooling (same seed, same data)
// and scores both on the same test set.
inline AblationResult pooling_ablation(const DatasetSplit& split, const TrainConfig& cfg,
                                       TrainHistory* hist_mean_add = nullptr,
                                       TrainHistory* hist_mean_only = nullptr) {
    TrainConfig a = cfg;
    a.pooling = Pooling::MeanAdd;
    TrainConfig b = cfg;
    b.pooling = Pooling::MeanOnly;
    GnnModel model_a = train_gnn(split, a, hist_mean_add);
    GnnModel model_b = train_gnn(split, b, hist_mean_only);
    return {evaluate(model_a, split.test), evaluate(model_b, split.test)};
}

// 2x2 grid: each model scored on each domain's test instances.
struct CrossDomainGrid {
    EvalReport er_model_on_er;
    EvalReport er_model_on_ba;
    EvalReport ba_model_on_er;
    EvalReport ba_model_on_ba;
};

inline CrossDomainGrid cross_domain_eval(SurrogateModel& model_er, SurrogateModel& model_ba,
                                         const std::vector<LabeledInstance>& test_er,
                                         const std::vector<LabeledInstance>& test_ba) {
    return {evaluate(model_er, test_er), evaluate(model_er, test_ba),
            evaluate(model_ba, test_er), evaluate(model_ba, test_ba)};
}

inline nlohmann::ordered_json cross_domain_to_json(const CrossDomainGrid& grid) {
    nlohmann::ordered_json j;
    j["er_model"]["on_er"] = eval_report_to_json(grid.er_model_on_er);
    j["er_model"]["on_ba"] = eval_report_to_json(grid.er_model_on_ba);
    j["ba_model"]["on_er"] = eval_report_to_json(grid.ba_model_on_er);
    j["ba_model"]["on_ba"] = eval_report_to_json(grid.ba_model_on_ba);
    return j;
}

struct RuntimeReport {
    int trials = 0;
    std::size_t graphs = 0;
    double exact_ms = 0.0;  // per-instance means
    double cnn_ms = 0.0;
    double gnn_ms = 0.0;

    double cnn_speedup() const { return exact_ms / cnn_ms; }
    double gnn_speedup() const { return exact_ms / gnn_ms; }
};

// Wall-clock per-instance latency over `trials` passes, one warmup pass
// excluded. CNN timing includes image encoding; GIN timing includes feature
// construction. Strictly single-threaded so the numbers are comparable.
inline RuntimeReport benchmark_runtime(const std::vector<Graph>& graphs, int trials,
                                       const CnnModel& cnn, GnnModel& gnn) {
    if (graphs.empty()) throw ParamError("benchmark: no graphs");
    if (trials < 1) throw ParamError("benchmark: trials must be >= 1");

    using clock = std::chrono::steady_clock;
    const auto per_instance_ms = [&](auto&& fn) {
        for (const auto& g : graphs) fn(g);  // warmup
        const auto start = clock::now();
        for (int t = 0; t < trials; ++t)
            for (const auto& g : graphs) fn(g);
        const std::chrono::duration<double, std::milli> total = clock::now() - start;
        return total.count() / (static_cast<double>(trials) * static_cast<double>(graphs.size()));
    };

    RuntimeReport report;
    report.trials = trials;
    report.graphs = graphs.size();
    report.exact_ms = per_instance_ms([](const Graph& g) { (void)domination_number(g); });
    report.cnn_ms = per_instance_ms([&](const Graph& g) { (void)cnn.predict(g); });
    report.gnn_ms = per_instance_ms([&](const Graph& g) { (void)gnn.predict(g); });
    return report;
}

inline nlohmann::ordered_json runtime_report_to_json(const RuntimeReport& r) {
    nlohmann::ordered_json j;
    j["trials"] = r.trials;
    j["graphs"] = r.graphs;
    j["exact_ms"] = r.exact_ms;
    j["cnn_ms"] = r.cnn_ms;
    j["gnn_ms"] = r.gnn_ms;
    j["cnn_speedup"] = r.cnn_speedup();
    j["gnn_speedup"] = r.gnn_speedup();
    return j;
}

inline std::string runtime_report_table(const RuntimeReport& r) {
    char buf[256];
    std::string out = "Average runtime over " + std::to_string(r.graphs) + " graphs (" +
                      std::to_string(r.trials) + " trials)\n";
    out += "  method        time (ms)   speedup\n";
    std::snprintf(buf, sizeof(buf), "  exact        %10.3f   %7.1fx\n", r.exact_ms, 1.0);
    out += buf;
    std::snprintf(buf, sizeof(buf), "  cnn          %10.3f   %7.1fx\n", r.cnn_ms, r.cnn_speedup());
    out += buf;
    std::snprintf(buf, sizeof(buf), "  gnn          %10.3f   %7.1fx\n", r.gnn_ms, r.gnn_speedup());
    out += buf;
    return out;
}

struct SweepEntry {
    int hidden_width;
    Pooling pooling;
    double val_mae;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    TrainConfig best_config;
    EvalReport best_test_report;
};

// Small grid search over hidden width and pooling. Selection happens on
// validation MAE; the winning configuration is rescored on the test set.
inline SweepResult grid_sweep(const DatasetSplit& split, const TrainConfig& base,
                              const std::vector<int>& widths = {32, 64, 128}) {
    SweepResult result;
    double best_val = std::numeric_limits<double>::infinity();
    for (int width : widths) {
        for (Pooling pooling : {Pooling::MeanAdd, Pooling::MeanOnly}) {
            TrainConfig cfg = base;
            cfg.hidden_width = width;
            cfg.pooling = pooling;
            TrainHistory history;
            (void)train_gnn(split, cfg, &history);
            result.entries.push_back({width, pooling, history.best_val_mae});
            if (history.best_val_mae < best_val) {
                best_val = history.best_val_mae;
                result.best_config = cfg;
            }
        }
    }
    GnnModel best_model = train_gnn(split, result.best_config);
    result.best_test_report = evaluate(best_model, split.test);
    return result;
}

}  // namespace domset
