#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "domset/checkpoint.hpp"  // atomic_write
#include "domset/generators.hpp"
#include "domset/solver.hpp"

namespace domset {

struct LabeledInstance {
    std::string id;
    Graph graph;
    int gamma = 0;
    GenParams gen;

    bool operator==(const LabeledInstance&) const = default;
};

struct Dataset {
    std::vector<LabeledInstance> instances;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }
};

struct DatasetSplit {
    std::vector<LabeledInstance> train;
    std::vector<LabeledInstance> val;
    std::vector<LabeledInstance> test;
};

struct GenerateOptions {
    GraphFamily family = GraphFamily::ER;
    int count = 2000;
    int n_min = 5;
    int n_max = 64;
    int ba_m = 2;
    std::uint64_t seed = 0;
    std::uint64_t solver_budget = 50'000'000;  // nodes per instance before regeneration
    int jobs = 1;
    std::function<void(const std::string&)> log;  // regeneration events
};

namespace detail {

inline LabeledInstance make_instance(const GenerateOptions& opt, std::size_t index) {
    const std::uint64_t base = derive_seed(opt.seed, index);
    for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t inst_seed = derive_seed(base, attempt);
        Xoshiro256 rng(inst_seed);
        GenParams params;
        params.family = opt.family;
        params.n = rng.next_int(opt.n_min, opt.n_max);
        params.seed = rng.next();
        if (opt.family == GraphFamily::ER)
            params.p = rng.next_double();
        else
            params.m = opt.ba_m;

        LabeledInstance inst;
        inst.id = family_name(opt.family) + "-" + std::to_string(index);
        inst.gen = params;
        inst.graph = generate(params);
        try {
            inst.gamma = domination_number(inst.graph, opt.solver_budget).gamma;
        } catch (const BudgetError&) {
            if (opt.log)
                opt.log("instance " + inst.id + ": solver budget exhausted (attempt " +
                        std::to_string(attempt) + "), regenerating with a fresh sub-seed");
            continue;
        }
        return inst;
    }
}

}  // namespace detail

// Samples `count` graphs (n uniform in [n_min, n_max]; ER draws p uniform in
// [0,1), BA uses the fixed attachment count) and labels each with its exact
// domination number. Deterministic in opt.seed, independent of job count.
inline Dataset generate_dataset(const GenerateOptions& opt) {
    if (opt.count < 1) throw ParamError("count must be >= 1, got " + std::to_string(opt.count));
    if (opt.n_min < 1 || opt.n_min > opt.n_max)
        throw ParamError("invalid vertex range [" + std::to_string(opt.n_min) + "," +
                         std::to_string(opt.n_max) + "]");
    if (opt.family == GraphFamily::BA && opt.ba_m >= opt.n_min)
        throw ParamError("BA attachment m=" + std::to_string(opt.ba_m) +
                         " requires n_min > m, got n_min=" + std::to_string(opt.n_min));

    Dataset ds;
    ds.instances.resize(static_cast<std::size_t>(opt.count));
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < ds.instances.size(); ++i)
            ds.instances[i] = detail::make_instance(opt, i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= ds.instances.size()) return;
                ds.instances[i] = detail::make_instance(opt, i);
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return ds;
}

// Stratified split by exact vertex count: every n-bucket is shuffled with a
// seeded PRNG, a test share is taken first, then a validation share from the
// remaining training instances.
inline DatasetSplit split_dataset(const Dataset& ds, double test_frac, double val_frac,
                                  std::uint64_t seed) {
    if (ds.empty()) throw ParamError("cannot split an empty dataset");
    if (!(test_frac > 0.0 && test_frac < 1.0) || !(val_frac >= 0.0 && val_frac < 1.0) ||
        test_frac + val_frac >= 1.0)
        throw ParamError("invalid split fractions test=" + std::to_string(test_frac) +
                         " val=" + std::to_string(val_frac));

    std::vector<int> sizes;
    for (const auto& inst : ds.instances) sizes.push_back(inst.graph.vertex_count());
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

    DatasetSplit out;
    for (int n : sizes) {
        std::vector<std::size_t> bucket;
        for (std::size_t i = 0; i < ds.instances.size(); ++i)
            if (ds.instances[i].graph.vertex_count() == n) bucket.push_back(i);

        Xoshiro256 rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
        for (std::size_t i = bucket.size(); i > 1; --i)
            std::swap(bucket[i - 1], bucket[rng.next_below(i)]);

        const auto total = bucket.size();
        const auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(total) * test_frac));
        const auto n_val = static_cast<std::size_t>(
            std::llround(static_cast<double>(total - n_test) * val_frac));
        for (std::size_t i = 0; i < total; ++i) {
            const auto& inst = ds.instances[bucket[i]];
            if (i < n_test)
                out.test.push_back(inst);
            else if (i < n_test + n_val)
                out.val.push_back(inst);
            else
                out.train.push_back(inst);
        }
    }
    return out;
}

// --- JSON-Lines persistence -------------------------------------------------
//
// One instance per line:
//   {"id": "...", "family": "er"|"ba", "n": int, "p": double | "m": int,
//    "seed": uint64, "edges": [[u,v],...], "gamma": int}
// with edges sorted lexicographically and u < v, so files are byte-stable.

inline nlohmann::ordered_json instance_to_json(const LabeledInstance& inst) {
    nlohmann::ordered_json j;
    j["id"] = inst.id;
    j["family"] = family_name(inst.gen.family);
    j["n"] = inst.graph.vertex_count();
    if (inst.gen.family == GraphFamily::ER)
        j["p"] = inst.gen.p;
    else
        j["m"] = inst.gen.m;
    j["seed"] = inst.gen.seed;
    j["edges"] = nlohmann::ordered_json::array();
    for (auto [u, v] : inst.graph.edges()) j["edges"].push_back({u, v});
    j["gamma"] = inst.gamma;
    return j;
}

inline LabeledInstance instance_from_json(const nlohmann::json& j, long line = -1) {
    try {
        LabeledInstance inst;
        inst.id = j.at("id").get<std::string>();
        inst.gen.family = family_from_name(j.at("family").get<std::string>());
        inst.gen.n = j.at("n").get<int>();
        if (inst.gen.family == GraphFamily::ER)
            inst.gen.p = j.at("p").get<double>();
        else
            inst.gen.m = j.at("m").get<int>();
        inst.gen.seed = j.at("seed").get<std::uint64_t>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw DataError("edge entries must be [u,v] pairs", line);
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        inst.graph = Graph::from_edges(inst.gen.n, edges);
        inst.gamma = j.at("gamma").get<int>();
        if (inst.gamma < 1 || inst.gamma > inst.gen.n)
            throw DataError("gamma " + std::to_string(inst.gamma) + " outside [1, n]", line);
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad instance record: ") + e.what(), line);
    }
}

inline std::string dataset_to_jsonl(const Dataset& ds) {
    std::string out;
    for (const auto& inst : ds.instances) {
        out += instance_to_json(inst).dump();
        out += '\n';
    }
    return out;
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
    atomic_write(path, dataset_to_jsonl(ds));
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset " + path);
    Dataset ds;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed JSON: ") + e.what(), line_number);
        }
        ds.instances.push_back(instance_from_json(j, line_number));
    }
    return ds;
}

struct VerifyReport {
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::vector<std::string> mismatches;
};

// Re-derives labels with an exact solver. Instances with n <= max_n go
// through the brute-force oracle; with `full`, the rest are re-checked by
// branch and bound instead of being skipped.
inline VerifyReport verify_dataset(const Dataset& ds, int max_n = 14, bool full = false) {
    VerifyReport report;
    for (const auto& inst : ds.instances) {
        int expected;
        if (inst.graph.vertex_count() <= max_n)
            expected = domination_number_bruteforce(inst.graph, max_n).gamma;
        else if (full)
            expected = domination_number(inst.graph).gamma;
        else {
            ++report.skipped;
            continue;
        }
        ++report.checked;
        if (expected != inst.gamma)
            report.mismatches.push_back(inst.id + ": stored gamma " + std::to_string(inst.gamma) +
                                        ", solver says " + std::to_string(expected));
    }
    return report;
}

}  // namespace domset
