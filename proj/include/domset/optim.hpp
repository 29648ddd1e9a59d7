#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "domset/error.hpp"
#include "domset/tensor.hpp"

namespace domset {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. Moment buffers m, v mirror the parameter shapes.
class Adam {
public:
    Adam(std::vector<Tensor> params, AdamConfig cfg = {})
        : params_(std::move(params)), cfg_(cfg) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (const auto& p : params_) {
            m_.emplace_back(p.size(), 0.0);
            v_.emplace_back(p.size(), 0.0);
        }
    }

    std::int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

    void zero_grad() {
        for (auto& p : params_) p.zero_grad();
    }

    void step() {
        ++step_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            Tensor& p = params_[k];
            if (!p.has_grad())
                throw ContractError("adam step " + std::to_string(step_) + ": parameter " +
                                    std::to_string(k) + " has no gradient");
            auto& value = p.data();
            const auto& grad = p.grad();
            auto& m = m_[k];
            auto& v = v_[k];
            for (std::size_t i = 0; i < value.size(); ++i) {
                m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad[i];
                v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

private:
    std::vector<Tensor> params_;
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    std::int64_t step_ = 0;
};

// Scales all gradients by max_norm / ||g||_2 when the global norm exceeds
// max_norm. Returns the factor that was applied.
inline double clip_grad_norm(std::vector<Tensor>& params, double max_norm) {
    if (!(max_norm > 0.0))
        throw ParamError("clip_grad_norm: max_norm must be positive, got " +
                         std::to_string(max_norm));
    double sq = 0.0;
    for (auto& p : params) {
        if (!p.has_grad())
            throw ContractError("clip_grad_norm: parameter has no gradient");
        for (double g : p.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return 1.0;
    const double factor = max_norm / norm;
    for (auto& p : params)
        for (double& g : p.grad()) g *= factor;
    return factor;
}

}  // namespace domset
