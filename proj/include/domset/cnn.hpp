#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "domset/graph.hpp"
#include "domset/nn.hpp"

namespace domset {

// 64x64 grayscale encoding of a graph: 255 marks an edge, the diagonal holds
// degree(v) / max(1, n-1) rescaled to [0, 255], and everything outside the
// top-left n x n block stays zero.
struct AdjacencyImage {
    static constexpr int kSide = 64;
    std::vector<double> pixels;  // row-major, kSide * kSide

    double at(int i, int j) const { return pixels[static_cast<std::size_t>(i) * kSide + j]; }
};

inline AdjacencyImage encode_adjacency_image(const Graph& g) {
    const int n = g.vertex_count();
    if (n > AdjacencyImage::kSide)
        throw ParamError("adjacency image fits at most " +
                         std::to_string(AdjacencyImage::kSide) + " vertices, got n=" +
                         std::to_string(n));
    AdjacencyImage img;
    img.pixels.assign(AdjacencyImage::kSide * AdjacencyImage::kSide, 0.0);
    const double degree_scale = 255.0 / std::max(1, n - 1);
    for (int v = 0; v < n; ++v) {
        img.pixels[static_cast<std::size_t>(v) * AdjacencyImage::kSide + v] =
            degree_scale * g.degree(v);
        for (int u : g.neighbors(v))
            img.pixels[static_cast<std::size_t>(v) * AdjacencyImage::kSide + u] = 255.0;
    }
    return img;
}

// Stacks images into a [N, 1, 64, 64] batch, still in [0, 255].
inline Tensor image_batch(const std::vector<AdjacencyImage>& images) {
    const int side = AdjacencyImage::kSide;
    Tensor batch = Tensor::zeros({static_cast<int>(images.size()), 1, side, side});
    double* out = batch.data().data();
    for (const auto& img : images) {
        std::copy(img.pixels.begin(), img.pixels.end(), out);
        out += img.pixels.size();
    }
    return batch;
}

// Convolutional regressor over adjacency images:
//   conv(32,3x3) relu pool -> conv(64,3x3) relu pool -> conv(64,3x3) relu
//   -> flatten -> dense(64) relu -> dense(1)
// Spatial trace 64 -> 62 -> 31 -> 29 -> 14 -> 12, so flatten is 12*12*64.
class CnnModel {
public:
    static constexpr const char* kKind = "cnn-v1";
    static constexpr int kFlatten = 12 * 12 * 64;
    static_assert(((64 - 2) / 2 - 2) / 2 - 2 == 12);

    explicit CnnModel(std::uint64_t seed) {
        Xoshiro256 rng(derive_seed(seed, 0xC44));
        conv1 = Conv2dLayer(1, 32, 3, rng);
        conv2 = Conv2dLayer(32, 64, 3, rng);
        conv3 = Conv2dLayer(64, 64, 3, rng);
        dense1 = LinearLayer(kFlatten, 64, rng);
        dense2 = LinearLayer(64, 1, rng);
    }

    // images: [N, 1, 64, 64] with raw [0, 255] pixels; scaled by 1/255
    // before the first convolution. Returns [N, 1] predictions.
    Tensor forward(const Tensor& images, Mode = Mode::Eval) const {
        Tensor x = scale(images, 1.0 / 255.0);
        x = maxpool2d(relu(conv1.forward(x)));
        x = maxpool2d(relu(conv2.forward(x)));
        x = relu(conv3.forward(x));
        x = flatten(x);
        if (x.shape()[1] != kFlatten)
            throw ShapeError("cnn flatten: got " + shape_str(x.shape()) + " vs expected [N," +
                             std::to_string(kFlatten) + "]");
        x = relu(dense1.forward(x));
        return dense2.forward(x);
    }

    double predict(const Graph& g) const {
        NoGradGuard ng;
        Tensor batch = image_batch({encode_adjacency_image(g)});
        return forward(batch, Mode::Eval).data()[0];
    }

    std::vector<Tensor> parameters() const {
        std::vector<Tensor> out;
        for (const auto& nt : named_parameters()) out.push_back(nt.tensor);
        return out;
    }

    std::vector<NamedTensor> named_parameters() const {
        std::vector<NamedTensor> out;
        conv1.collect("conv1", out);
        conv2.collect("conv2", out);
        conv3.collect("conv3", out);
        dense1.collect("dense1", out);
        dense2.collect("dense2", out);
        return out;
    }

    std::vector<NamedTensor> named_buffers() const { return {}; }

    Conv2dLayer conv1, conv2, conv3;
    LinearLayer dense1, dense2;
};

}  // namespace domset
