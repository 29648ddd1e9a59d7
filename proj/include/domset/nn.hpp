#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "domset/nn_ops.hpp"
#include "domset/rng.hpp"
#include "domset/tensor.hpp"

namespace domset {

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

// Uniform fan-in initialization: every entry drawn from
// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) using the pinned PRNG.
inline void init_uniform_fan_in(Tensor& t, int fan_in, Xoshiro256& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : t.data()) v = (2.0 * rng.next_double() - 1.0) * bound;
}

struct LinearLayer {
    Tensor weight;  // [d_in, d_out]
    Tensor bias;    // [d_out]

    LinearLayer() = default;
    LinearLayer(int d_in, int d_out, Xoshiro256& rng)
        : weight(Tensor::zeros({d_in, d_out}, true)), bias(Tensor::zeros({d_out}, true)) {
        init_uniform_fan_in(weight, d_in, rng);
        init_uniform_fan_in(bias, d_in, rng);
    }

    Tensor forward(const Tensor& x) const { return linear(x, weight, bias); }

    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
        out.push_back({prefix + ".weight", weight});
        out.push_back({prefix + ".bias", bias});
    }
};

struct Conv2dLayer {
    Tensor kernels;  // [out_c, in_c, k, k]
    Tensor bias;     // [out_c]

    Conv2dLayer() = default;
    Conv2dLayer(int in_c, int out_c, int k, Xoshiro256& rng)
        : kernels(Tensor::zeros({out_c, in_c, k, k}, true)), bias(Tensor::zeros({out_c}, true)) {
        const int fan_in = in_c * k * k;
        init_uniform_fan_in(kernels, fan_in, rng);
        init_uniform_fan_in(bias, fan_in, rng);
    }

    Tensor forward(const Tensor& x) const { return conv2d(x, kernels, bias); }

    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
        out.push_back({prefix + ".kernels", kernels});
        out.push_back({prefix + ".bias", bias});
    }
};

struct BatchNormLayer {
    Tensor gamma;  // scale, init 1
    Tensor beta;   // shift, init 0
    BatchNormStats stats;

    BatchNormLayer() = default;
    explicit BatchNormLayer(int features)
        : gamma(Tensor::from_data({features},
                                  std::vector<double>(static_cast<std::size_t>(features), 1.0),
                                  true)),
          beta(Tensor::zeros({features}, true)),
          stats(features) {}

    Tensor forward(const Tensor& x, Mode mode) { return batchnorm(x, gamma, beta, stats, mode); }

    void collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
        out.push_back({prefix + ".gamma", gamma});
        out.push_back({prefix + ".beta", beta});
    }

    void collect_buffers(const std::string& prefix, std::vector<NamedTensor>& out) const {
        out.push_back({prefix + ".running_mean",
                       Tensor::from_data({static_cast<int>(stats.running_mean.size())},
                                         stats.running_mean)});
        out.push_back({prefix + ".running_var",
                       Tensor::from_data({static_cast<int>(stats.running_var.size())},
                                         stats.running_var)});
    }
};

}  // namespace domset
