#include <gtest/gtest.h>

#include <cmath>

#include "domset/generators.hpp"
#include "domset/gin.hpp"
#include "gradcheck.hpp"

using namespace domset;

namespace {

std::vector<int> random_perm(int n, Xoshiro256& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.next_below(i)]);
    return perm;
}

// MLP that passes values through untouched (for nonnegative inputs): identity
// weights, zero biases, batchnorm with unit stats and eps 0 in eval mode.
GinLayer identity_layer(int d) {
    Xoshiro256 rng(0);
    GinLayer layer(d, d, d, rng);
    auto set_identity = [d](Tensor& w) {
        std::fill(w.data().begin(), w.data().end(), 0.0);
        for (int i = 0; i < d; ++i) w.data()[static_cast<std::size_t>(i) * d + i] = 1.0;
    };
    set_identity(layer.lin1.weight);
    set_identity(layer.lin2.weight);
    std::fill(layer.lin1.bias.data().begin(), layer.lin1.bias.data().end(), 0.0);
    std::fill(layer.lin2.bias.data().begin(), layer.lin2.bias.data().end(), 0.0);
    layer.bn.stats.eps = 0.0;  // unit running stats make eval batchnorm exact identity
    return layer;
}

}  // namespace

TEST(InitialFeatures, EdgelessRowsAreConstantChannel) {
    const Tensor h = initial_features(Graph::edgeless(3), 4);
    EXPECT_EQ(h.shape(), (Shape{3, 4}));
    for (int v = 0; v < 3; ++v) {
        EXPECT_EQ(h.data()[v * 4 + 0], 1.0);
        EXPECT_EQ(h.data()[v * 4 + 1], 0.0);
        EXPECT_EQ(h.data()[v * 4 + 2], 0.0);
        EXPECT_EQ(h.data()[v * 4 + 3], 0.0);
    }
}

TEST(InitialFeatures, CompleteGraphNormalizedDegreeIsOne) {
    const Tensor h = initial_features(complete_graph(3), 5);
    for (int v = 0; v < 3; ++v) {
        EXPECT_EQ(h.data()[v * 5 + 0], 1.0);
        EXPECT_EQ(h.data()[v * 5 + 1], 1.0);
    }
}

TEST(InitialFeatures, PermutationPermutesRows) {
    Xoshiro256 rng(9);
    const Graph g = erdos_renyi(10, 0.5, 77);
    const auto perm = random_perm(10, rng);
    const Tensor h = initial_features(g, 6);
    const Tensor hp = initial_features(permute(g, perm), 6);
    for (int v = 0; v < 10; ++v)
        for (int j = 0; j < 6; ++j)
            ASSERT_EQ(hp.data()[perm[v] * 6 + j], h.data()[v * 6 + j]);
}

TEST(InitialFeatures, RejectsNarrowWidth) {
    EXPECT_THROW(initial_features(Graph::edgeless(2), 1), ParamError);
}

TEST(GinLayerForward, AggregationBeforeMlpOnTriangle) {
    // (1 + eps) e_v + e_u + e_w with H = I_3.
    Tensor h = Tensor::from_data({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    Tensor eps = Tensor::from_data({1}, {0.25});
    const auto batch = make_graph_batch({[] {
        static Graph g = complete_graph(3);
        return &g;
    }()});
    const Tensor agg = add(add(h, mul_scalar(h, eps)), neighbor_sum(h, batch.adjacency));
    for (int v = 0; v < 3; ++v)
        for (int j = 0; j < 3; ++j)
            EXPECT_DOUBLE_EQ(agg.data()[v * 3 + j], v == j ? 1.25 : 1.0);
}

TEST(GinLayerForward, IdentityMlpCollapsesToClosedForm) {
    GinLayer layer = identity_layer(3);
    const Graph g = complete_graph(3);
    const auto batch = make_graph_batch({&g});
    Tensor h = Tensor::from_data({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    const Tensor out = layer.forward(h, batch.adjacency, Mode::Eval);
    // h_v + sum of neighbors = row of all ones on the triangle.
    for (double v : out.data()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(GinLayerForward, EdgelessIdentityMlpKeepsFeatures) {
    GinLayer layer = identity_layer(4);
    const Graph g = Graph::edgeless(5);
    const auto batch = make_graph_batch({&g});
    const Tensor h = initial_features(g, 4);
    const Tensor out = layer.forward(h, batch.adjacency, Mode::Eval);
    EXPECT_EQ(out.data(), h.data());
}

TEST(Readout, SingleVertexMeanEqualsSum) {
    GnnModel model(8, Pooling::MeanAdd, 3);
    const Graph g = Graph::edgeless(1);
    Xoshiro256 rng(13);
    Tensor h = gradcheck::random_tensor({1, 8}, rng, false);
    auto offsets = std::make_shared<const std::vector<int>>(std::vector<int>{0, 1});
    NoGradGuard ng;
    const Tensor pooled_mean = segment_reduce_rows(h, offsets, SegmentReduce::Mean);
    const Tensor pooled_sum = segment_reduce_rows(h, offsets, SegmentReduce::Sum);
    EXPECT_EQ(pooled_mean.data(), pooled_sum.data());
    EXPECT_EQ(pooled_mean.data(), h.data());
}

TEST(Readout, ZeroWeightsYieldBias) {
    GnnModel model(8, Pooling::MeanAdd, 3);
    std::fill(model.readout_layer().weight.data().begin(),
              model.readout_layer().weight.data().end(), 0.0);
    model.readout_layer().bias.data()[0] = -2.5;
    Xoshiro256 rng(14);
    Tensor h = gradcheck::random_tensor({4, 8}, rng, false);
    EXPECT_DOUBLE_EQ(model.readout(h), -2.5);
}

TEST(Readout, RejectsEmptyFeatures) {
    GnnModel model(4, Pooling::MeanOnly, 3);
    Tensor h = Tensor::zeros({0, 4});
    EXPECT_THROW(model.readout(h), ContractError);
}

TEST(GnnForward, RejectsEmptyGraph) {
    GnnModel model(4, Pooling::MeanAdd, 1);
    const Graph g;
    EXPECT_THROW(model.forward(g, Mode::Eval), ContractError);
}

TEST(GnnForward, DeterministicPredictions) {
    GnnModel model(16, Pooling::MeanAdd, 5);
    const Graph g = erdos_renyi(24, 0.3, 44);
    EXPECT_EQ(model.predict(g), model.predict(g));
}

TEST(GnnForward, BatchMatchesSingleInEval) {
    GnnModel model(16, Pooling::MeanAdd, 6);
    const Graph a = erdos_renyi(7, 0.5, 1);
    const Graph b = erdos_renyi(23, 0.2, 2);
    NoGradGuard ng;
    const Tensor batch = model.forward_batch({&a, &b}, Mode::Eval);
    EXPECT_DOUBLE_EQ(batch.data()[0], model.predict(a));
    EXPECT_DOUBLE_EQ(batch.data()[1], model.predict(b));
}

TEST(GnnForward, PermutationInvariantWithinTolerance) {
    Xoshiro256 rng(71);
    for (int trial = 0; trial < 40; ++trial) {
        GnnModel model(32, trial % 2 ? Pooling::MeanAdd : Pooling::MeanOnly, rng.next());
        const int n = rng.next_int(2, 40);
        const Graph g = erdos_renyi(n, rng.next_double(), rng.next());
        const auto perm = random_perm(n, rng);
        const double direct = model.predict(g);
        const double relabeled = model.predict(permute(g, perm));
        ASSERT_LT(std::abs(direct - relabeled), 1e-9)
            << "n=" << n << " trial=" << trial;
    }
}

TEST(GnnForward, IsomorphicGraphsAgree) {
    Xoshiro256 rng(72);
    GnnModel model(64, Pooling::MeanAdd, 123);
    const Graph g = barabasi_albert(30, 2, 9);
    const auto perm = random_perm(30, rng);
    EXPECT_NEAR(model.predict(g), model.predict(permute(g, perm)), 1e-9);
}

// Exhaustive finite differences over every parameter of a narrow model.
TEST(GnnModel, FullGradientCheckOnNarrowModel) {
    GnnModel model(8, Pooling::MeanAdd, 17);
    const Graph g = erdos_renyi(6, 0.5, 55);
    auto params = model.parameters();
    gradcheck::expect_gradients_match(
        [&] { return model.forward(g, Mode::Train); }, params, 101);
}

TEST(GnnModel, SampledGradientCheckAtFullWidth) {
    GnnModel model(64, Pooling::MeanAdd, 18);
    const Graph g = erdos_renyi(6, 0.5, 56);
    auto params = model.parameters();
    gradcheck::expect_gradients_match_sampled(
        [&] { return model.forward(g, Mode::Train); }, params, 4, 102);
}

TEST(GnnModel, MeanOnlyGradientCheck) {
    GnnModel model(8, Pooling::MeanOnly, 19);
    const Graph g = erdos_renyi(5, 0.6, 57);
    auto params = model.parameters();
    gradcheck::expect_gradients_match(
        [&] { return model.forward(g, Mode::Train); }, params, 103);
}

TEST(GnnModel, EpsilonIsLearnable) {
    GnnModel model(8, Pooling::MeanAdd, 20);
    // Needs degree variety: on a vertex-transitive graph the train-mode
    // batchnorm zeroes all cross-node variation and the epsilon gradient
    // vanishes by symmetry.
    const Graph g = path_graph(6);
    Tensor out = model.forward(g, Mode::Train);
    backward(mse_loss(out, Tensor::from_data({1, 1}, {1.0})));
    bool nonzero = false;
    for (auto& layer : model.layers()) {
        ASSERT_TRUE(layer.epsilon.has_grad());
        if (layer.epsilon.grad()[0] != 0.0) nonzero = true;
    }
    EXPECT_TRUE(nonzero);
}

TEST(GnnModel, ReadoutWidthTracksPooling) {
    GnnModel mean_add(16, Pooling::MeanAdd, 1);
    GnnModel mean_only(16, Pooling::MeanOnly, 1);
    EXPECT_EQ(mean_add.named_parameters().back().name, "readout.bias");
    EXPECT_EQ(mean_add.readout_layer().weight.shape(), (Shape{32, 1}));
    EXPECT_EQ(mean_only.readout_layer().weight.shape(), (Shape{16, 1}));
}
