#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "domset/cnn.hpp"
#include "domset/error.hpp"
#include "domset/gin.hpp"

namespace domset {

// Checkpoints are a single JSON document:
//   { "format": "domset-checkpoint-v1",
//     "kind": "cnn-v1" | "gin-v1",
//     "meta": { ... model hyperparameters ... },
//     "params":  [ {"name", "shape", "data"}, ... ],
//     "buffers": [ {"name", "shape", "data"}, ... ] }
// Doubles round-trip exactly through the JSON layer, so load(save(m)) is
// value-identical.

namespace detail {

inline nlohmann::ordered_json tensor_entry(const NamedTensor& nt) {
    nlohmann::ordered_json e;
    e["name"] = nt.name;
    e["shape"] = nt.tensor.shape();
    e["data"] = nt.tensor.data();
    return e;
}

inline void fill_from_entries(const nlohmann::json& entries, std::vector<NamedTensor> targets,
                              const std::string& what) {
    if (entries.size() != targets.size())
        throw DataError("checkpoint lists " + std::to_string(entries.size()) + " " + what +
                        ", model expects " + std::to_string(targets.size()));
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& e = entries[i];
        if (e.at("name").get<std::string>() != targets[i].name)
            throw DataError("checkpoint " + what + " " + std::to_string(i) + " is named \"" +
                            e.at("name").get<std::string>() + "\", model expects \"" +
                            targets[i].name + "\"");
        const auto shape = e.at("shape").get<Shape>();
        if (shape != targets[i].tensor.shape())
            throw DataError("checkpoint tensor \"" + targets[i].name + "\" has shape " +
                            shape_str(shape) + ", model expects " +
                            shape_str(targets[i].tensor.shape()));
        auto data = e.at("data").get<std::vector<double>>();
        if (static_cast<std::int64_t>(data.size()) != targets[i].tensor.size())
            throw DataError("checkpoint tensor \"" + targets[i].name + "\" data length mismatch");
        targets[i].tensor.data() = std::move(data);
    }
}

}  // namespace detail

// Writes content to path via a temporary file and an atomic rename.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp + " for writing");
        out << content;
        if (!out.good()) throw DataError("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline nlohmann::ordered_json checkpoint_json(const std::string& kind,
                                              nlohmann::ordered_json meta,
                                              const std::vector<NamedTensor>& params,
                                              const std::vector<NamedTensor>& buffers) {
    nlohmann::ordered_json doc;
    doc["format"] = "domset-checkpoint-v1";
    doc["kind"] = kind;
    doc["meta"] = std::move(meta);
    doc["params"] = nlohmann::ordered_json::array();
    for (const auto& nt : params) doc["params"].push_back(detail::tensor_entry(nt));
    doc["buffers"] = nlohmann::ordered_json::array();
    for (const auto& nt : buffers) doc["buffers"].push_back(detail::tensor_entry(nt));
    return doc;
}

inline void save_checkpoint(const CnnModel& model, const std::string& path) {
    nlohmann::ordered_json meta;
    meta["image_side"] = AdjacencyImage::kSide;
    atomic_write(path, checkpoint_json(CnnModel::kKind, std::move(meta),
                                       model.named_parameters(), model.named_buffers())
                           .dump());
}

inline void save_checkpoint(GnnModel& model, const std::string& path) {
    nlohmann::ordered_json meta;
    meta["width"] = model.width();
    meta["pooling"] = pooling_name(model.pooling());
    atomic_write(path, checkpoint_json(GnnModel::kKind, std::move(meta),
                                       model.named_parameters(), model.named_buffers())
                           .dump());
}

inline nlohmann::json read_checkpoint_doc(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed checkpoint " + path + ": " + e.what());
    }
    if (doc.value("format", "") != "domset-checkpoint-v1")
        throw DataError("not a domset checkpoint: " + path);
    return doc;
}

inline std::string checkpoint_kind(const std::string& path) {
    return read_checkpoint_doc(path).at("kind").get<std::string>();
}

inline CnnModel load_cnn(const std::string& path) {
    const auto doc = read_checkpoint_doc(path);
    if (doc.at("kind") != CnnModel::kKind)
        throw DataError("checkpoint kind " + doc.at("kind").get<std::string>() +
                        " is not " + CnnModel::kKind);
    CnnModel model(0);
    detail::fill_from_entries(doc.at("params"), model.named_parameters(), "params");
    return model;
}

inline GnnModel load_gnn(const std::string& path) {
    const auto doc = read_checkpoint_doc(path);
    if (doc.at("kind") != GnnModel::kKind)
        throw DataError("checkpoint kind " + doc.at("kind").get<std::string>() +
                        " is not " + GnnModel::kKind);
    const auto& meta = doc.at("meta");
    GnnModel model(meta.at("width").get<int>(),
                   pooling_from_name(meta.at("pooling").get<std::string>()), 0);
    detail::fill_from_entries(doc.at("params"), model.named_parameters(), "params");

    const auto& buffers = doc.at("buffers");
    auto targets = model.named_buffers();
    if (buffers.size() != targets.size())
        throw DataError("checkpoint lists " + std::to_string(buffers.size()) +
                        " buffers, model expects " + std::to_string(targets.size()));
    for (std::size_t i = 0; i < targets.size(); ++i) {
        auto data = buffers[i].at("data").get<std::vector<double>>();
        auto& layer = model.layers()[i / 2];
        auto& dst = (i % 2 == 0) ? layer.bn.stats.running_mean : layer.bn.stats.running_var;
        if (data.size() != dst.size())
            throw DataError("checkpoint buffer \"" + targets[i].name + "\" length mismatch");
        dst = std::move(data);
    }
    return model;
}

// Kind-dispatched wrapper so the CLI can evaluate either architecture.
class SurrogateModel {
public:
    explicit SurrogateModel(CnnModel m) : impl_(std::move(m)) {}
    explicit SurrogateModel(GnnModel m) : impl_(std::move(m)) {}

    static SurrogateModel load(const std::string& path) {
        if (checkpoint_kind(path) == CnnModel::kKind) return SurrogateModel(load_cnn(path));
        return SurrogateModel(load_gnn(path));
    }

    std::string kind() const {
        return std::holds_alternative<CnnModel>(impl_) ? CnnModel::kKind : GnnModel::kKind;
    }

    double predict(const Graph& g) {
        if (auto* cnn = std::get_if<CnnModel>(&impl_)) return cnn->predict(g);
        return std::get<GnnModel>(impl_).predict(g);
    }

    CnnModel* as_cnn() { return std::get_if<CnnModel>(&impl_); }
    GnnModel* as_gnn() { return std::get_if<GnnModel>(&impl_); }

private:
    std::variant<CnnModel, GnnModel> impl_;
};

}  // namespace domset
