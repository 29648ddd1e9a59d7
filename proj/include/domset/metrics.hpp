#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "domset/error.hpp"

namespace domset {

struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    bool r2_defined = true;  // false when the targets are constant (SST = 0)
    std::size_t count = 0;
};

// MAE = mean |e|, RMSE = sqrt(mean e^2), R^2 = 1 - SSE/SST.
inline Metrics compute_metrics(const std::vector<double>& preds,
                               const std::vector<double>& targets) {
    if (preds.size() != targets.size())
        throw ParamError("metrics: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(targets.size()) + " targets");
    if (preds.empty()) throw ParamError("metrics: empty inputs");

    Metrics m;
    m.count = preds.size();
    double abs_sum = 0.0, sq_sum = 0.0, target_sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double e = preds[i] - targets[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        target_sum += targets[i];
    }
    const double n = static_cast<double>(preds.size());
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);

    const double mean_target = target_sum / n;
    double sst = 0.0;
    for (double t : targets) sst += (t - mean_target) * (t - mean_target);
    if (sst > 0.0) {
        m.r2 = 1.0 - sq_sum / sst;
    } else {
        m.r2 = 0.0;
        m.r2_defined = false;
    }
    return m;
}

// Size buckets follow the reporting convention 5-20 / 21-40 / 41-64;
// anything smaller falls into the first bucket, anything larger into the last.
struct SizeBucket {
    int lo, hi;
    std::string label() const { return std::to_string(lo) + "-" + std::to_string(hi); }
};

inline const std::vector<SizeBucket>& size_buckets() {
    static const std::vector<SizeBucket> buckets{{5, 20}, {21, 40}, {41, 64}};
    return buckets;
}

inline std::string bucket_label_for(int n) {
    const auto& buckets = size_buckets();
    if (n <= buckets.front().hi) return buckets.front().label();
    for (const auto& b : buckets)
        if (n >= b.lo && n <= b.hi) return b.label();
    return buckets.back().label();
}

struct EvalReport {
    Metrics overall;
    std::map<std::string, Metrics> per_bucket;  // keyed by bucket label; absent if empty
    std::size_t n_eval = 0;
};

inline EvalReport make_eval_report(const std::vector<double>& preds,
                                   const std::vector<double>& targets,
                                   const std::vector<int>& vertex_counts) {
    if (preds.size() != vertex_counts.size())
        throw ParamError("eval report: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(vertex_counts.size()) + " vertex counts");
    EvalReport report;
    report.overall = compute_metrics(preds, targets);
    report.n_eval = preds.size();

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> grouped;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        auto& g = grouped[bucket_label_for(vertex_counts[i])];
        g.first.push_back(preds[i]);
        g.second.push_back(targets[i]);
    }
    for (const auto& [label, pt] : grouped)
        report.per_bucket[label] = compute_metrics(pt.first, pt.second);
    return report;
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["count"] = m.count;
    j["mae"] = m.mae;
    j["rmse"] = m.rmse;
    if (m.r2_defined)
        j["r2"] = m.r2;
    else
        j["r2"] = nullptr;
    return j;
}

inline nlohmann::ordered_json eval_report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["n_eval"] = r.n_eval;
    j["overall"] = metrics_to_json(r.overall);
    j["buckets"] = nlohmann::ordered_json::object();
    for (const auto& [label, m] : r.per_bucket) j["buckets"][label] = metrics_to_json(m);
    return j;
}

namespace detail {

inline std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace detail

// Aligned text rendering in the style of the accuracy tables.
inline std::string eval_report_table(const EvalReport& r, const std::string& title) {
    std::string out = title + " (" + std::to_string(r.n_eval) + " graphs)\n";
    out += "  scope        MAE     RMSE    R^2\n";
    auto row = [&](const std::string& scope, const Metrics& m) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "  %-10s %7.3f %8.3f %6s\n", scope.c_str(), m.mae, m.rmse,
                      m.r2_defined ? detail::fixed3(m.r2).c_str() : "n/a");
        out += buf;
    };
    row("all", r.overall);
    for (const auto& [label, m] : r.per_bucket) row(label, m);
    return out;
}

}  // namespace domset
