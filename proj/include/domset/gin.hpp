#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "domset/graph.hpp"
#include "domset/nn.hpp"

namespace domset {

enum class Pooling { MeanAdd, MeanOnly };

inline std::string pooling_name(Pooling p) {
    return p == Pooling::MeanAdd ? "mean_add" : "mean_only";
}

inline Pooling pooling_from_name(const std::string& s) {
    if (s == "mean_add") return Pooling::MeanAdd;
    if (s == "mean_only") return Pooling::MeanOnly;
    throw ParamError("unknown pooling \"" + s + "\" (expected mean_add or mean_only)");
}

// Row v = [1, degree(v)/max(1, n-1), 0, ..., 0], zero-padded to width d.
inline Tensor initial_features(const Graph& g, int width) {
    if (width < 2)
        throw ParamError("initial features need width >= 2, got " + std::to_string(width));
    const int n = g.vertex_count();
    Tensor h = Tensor::zeros({n, width});
    const double inv = 1.0 / std::max(1, n - 1);
    for (int v = 0; v < n; ++v) {
        h.data()[static_cast<std::size_t>(v) * width] = 1.0;
        h.data()[static_cast<std::size_t>(v) * width + 1] = g.degree(v) * inv;
    }
    return h;
}

// Batch-global node indexing for a list of graphs: node k of graph g maps to
// row offsets[g] + k. Neighbor lists stay ascending within each graph.
struct GraphBatch {
    std::shared_ptr<const CsrAdjacency> adjacency;
    std::shared_ptr<const std::vector<int>> offsets;  // size G+1
    int total_nodes = 0;
};

inline GraphBatch make_graph_batch(const std::vector<const Graph*>& graphs) {
    auto offsets = std::make_shared<std::vector<int>>();
    offsets->push_back(0);
    int total = 0;
    for (const Graph* g : graphs) {
        if (g->vertex_count() < 1) throw ContractError("graph batch contains an empty graph");
        total += g->vertex_count();
        offsets->push_back(total);
    }
    auto adj = std::make_shared<CsrAdjacency>();
    adj->offsets.reserve(static_cast<std::size_t>(total) + 1);
    adj->offsets.push_back(0);
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const int base = (*offsets)[gi];
        for (int v = 0; v < graphs[gi]->vertex_count(); ++v) {
            for (int u : graphs[gi]->neighbors(v)) adj->neighbors.push_back(base + u);
            adj->offsets.push_back(static_cast<int>(adj->neighbors.size()));
        }
    }
    return {adj, offsets, total};
}

inline Tensor batch_initial_features(const std::vector<const Graph*>& graphs, int width) {
    int total = 0;
    for (const Graph* g : graphs) total += g->vertex_count();
    Tensor h = Tensor::zeros({total, width});
    int row = 0;
    for (const Graph* g : graphs) {
        Tensor one = initial_features(*g, width);
        std::copy(one.data().begin(), one.data().end(),
                  h.data().begin() + static_cast<std::size_t>(row) * width);
        row += g->vertex_count();
    }
    return h;
}

// One GIN round: h_v <- MLP((1 + eps) * h_v + sum of neighbor rows), with
// MLP = Linear -> BatchNorm -> ReLU -> Linear and eps a learnable scalar.
struct GinLayer {
    Tensor epsilon;  // [1], initialized to 0
    LinearLayer lin1;
    BatchNormLayer bn;
    LinearLayer lin2;

    GinLayer() = default;
    GinLayer(int d_in, int d_hidden, int d_out, Xoshiro256& rng)
        : epsilon(Tensor::zeros({1}, true)),
          lin1(d_in, d_hidden, rng),
          bn(d_hidden),
          lin2(d_hidden, d_out, rng) {}

    Tensor forward(const Tensor& h, const std::shared_ptr<const CsrAdjacency>& adj, Mode mode) {
        Tensor agg = add(add(h, mul_scalar(h, epsilon)), neighbor_sum(h, adj));
        return lin2.forward(relu(bn.forward(lin1.forward(agg), mode)));
    }

    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
        out.push_back({prefix + ".epsilon", epsilon});
        lin1.collect(prefix + ".lin1", out);
        bn.collect(prefix + ".bn", out);
        lin2.collect(prefix + ".lin2", out);
    }
};

// Three GIN rounds followed by a pooled readout: MeanAdd concatenates mean
// and sum pooling before the final linear layer, MeanOnly (the ablation arm)
// keeps only the mean.
class GnnModel {
public:
    static constexpr const char* kKind = "gin-v1";
    static constexpr int kLayers = 3;

    GnnModel(int width, Pooling pooling, std::uint64_t seed)
        : width_(width), pooling_(pooling) {
        Xoshiro256 rng(derive_seed(seed, 0x919));
        layers_.reserve(kLayers);
        for (int l = 0; l < kLayers; ++l) layers_.emplace_back(width, width, width, rng);
        readout_ = LinearLayer(pooling == Pooling::MeanAdd ? 2 * width : width, 1, rng);
    }

    int width() const { return width_; }
    Pooling pooling() const { return pooling_; }

    // Returns [G, 1] predictions for a batch of graphs.
    Tensor forward_batch(const std::vector<const Graph*>& graphs, Mode mode) {
        if (graphs.empty()) throw ContractError("gnn forward: empty batch");
        GraphBatch batch = make_graph_batch(graphs);
        Tensor h = batch_initial_features(graphs, width_);
        for (auto& layer : layers_) h = layer.forward(h, batch.adjacency, mode);
        return readout_batch(h, batch.offsets);
    }

    Tensor forward(const Graph& g, Mode mode) { return forward_batch({&g}, mode); }

    // Pooled readout over final node embeddings grouped by batch.offsets.
    Tensor readout_batch(const Tensor& h, const std::shared_ptr<const std::vector<int>>& offsets) {
        Tensor pooled = segment_reduce_rows(h, offsets, SegmentReduce::Mean);
        if (pooling_ == Pooling::MeanAdd)
            pooled = concat_cols(pooled, segment_reduce_rows(h, offsets, SegmentReduce::Sum));
        return readout_.forward(pooled);
    }

    // Single-graph readout of an [n, d] embedding matrix.
    double readout(const Tensor& h) {
        if (h.shape().empty() || h.shape()[0] == 0)
            throw ContractError("readout: empty node features");
        auto offsets = std::make_shared<const std::vector<int>>(
            std::vector<int>{0, h.shape()[0]});
        return readout_batch(h, offsets).data()[0];
    }

    double predict(const Graph& g) {
        NoGradGuard ng;
        return forward(g, Mode::Eval).data()[0];
    }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> out;
        for (const auto& nt : named_parameters()) out.push_back(nt.tensor);
        return out;
    }

    std::vector<NamedTensor> named_parameters() const {
        std::vector<NamedTensor> out;
        for (int l = 0; l < kLayers; ++l)
            layers_[static_cast<std::size_t>(l)].collect("layers." + std::to_string(l), out);
        readout_.collect("readout", out);
        return out;
    }

    std::vector<NamedTensor> named_buffers() const {
        std::vector<NamedTensor> out;
        for (int l = 0; l < kLayers; ++l)
            layers_[static_cast<std::size_t>(l)].bn.collect_buffers(
                "layers." + std::to_string(l) + ".bn", out);
        return out;
    }

    std::vector<GinLayer>& layers() { return layers_; }
    LinearLayer& readout_layer() { return readout_; }

private:
    int width_;
    Pooling pooling_;
    std::vector<GinLayer> layers_;
    LinearLayer readout_;
};

}  // namespace domset
