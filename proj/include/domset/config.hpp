#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "domset/error.hpp"
#include "domset/train.hpp"

namespace domset {

// Experiment configuration file: JSON object with a dataset path and training
// hyperparameters. Unknown keys are rejected so typos fail loudly.
struct ExperimentConfig {
    std::string data;
    TrainConfig train;

    static ExperimentConfig from_json(const nlohmann::json& j,
                                      const std::string& origin = "<config>") {
        static const std::set<std::string> allowed{
            "data",       "model",    "lr",       "max_epochs",  "batch_size", "clip_norm",
            "patience",   "val_frac", "test_frac", "pooling",    "hidden_width", "seed"};
        if (!j.is_object()) throw DataError(origin + ": config must be a JSON object");
        for (const auto& [key, value] : j.items())
            if (!allowed.count(key)) throw DataError(origin + ": unknown config key \"" + key + "\"");

        ExperimentConfig cfg;
        try {
            const std::string kind = j.value("model", std::string("gin"));
            cfg.train = kind == "cnn" ? TrainConfig::cnn_defaults() : TrainConfig{};
            cfg.train.model_kind = kind;
            cfg.data = j.value("data", std::string());
            if (j.contains("lr")) cfg.train.lr = j.at("lr").get<double>();
            if (j.contains("max_epochs")) cfg.train.max_epochs = j.at("max_epochs").get<int>();
            if (j.contains("batch_size")) cfg.train.batch_size = j.at("batch_size").get<int>();
            if (j.contains("clip_norm")) cfg.train.clip_norm = j.at("clip_norm").get<double>();
            if (j.contains("patience")) cfg.train.patience = j.at("patience").get<int>();
            if (j.contains("val_frac")) cfg.train.val_frac = j.at("val_frac").get<double>();
            if (j.contains("test_frac")) cfg.train.test_frac = j.at("test_frac").get<double>();
            if (j.contains("pooling"))
                cfg.train.pooling = pooling_from_name(j.at("pooling").get<std::string>());
            if (j.contains("hidden_width"))
                cfg.train.hidden_width = j.at("hidden_width").get<int>();
            if (j.contains("seed")) cfg.train.seed = j.at("seed").get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(origin + ": " + e.what());
        }
        cfg.train.validate();
        return cfg;
    }

    static ExperimentConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open config " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("malformed config " + path + ": " + e.what());
        }
        ExperimentConfig cfg = from_json(j, path);
        if (cfg.data.empty()) throw DataError(path + ": config key \"data\" is required");
        if (!std::filesystem::exists(cfg.data))
            throw DataError(path + ": dataset path does not resolve: " + cfg.data);
        return cfg;
    }
};

}  // namespace domset
