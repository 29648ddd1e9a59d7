#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "domset/checkpoint.hpp"
#include "domset/cnn.hpp"
#include "domset/dataset.hpp"
#include "domset/gin.hpp"
#include "domset/metrics.hpp"
#include "domset/optim.hpp"

namespace domset {

// Training diverged (non-finite loss); carries the context of the bad step.
struct DivergenceError : std::runtime_error {
    DivergenceError(double lr, int epoch, int batch)
        : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch) + ", lr " + std::to_string(lr)),
          lr(lr), epoch(epoch), batch(batch) {}
    double lr;
    int epoch;
    int batch;
};

struct TrainConfig {
    std::string model_kind = "gin";  // "gin" | "cnn"
    double lr = 1e-3;
    int max_epochs = 200;
    int batch_size = 32;
    double clip_norm = 1.0;
    // Validation MAE is heavy-tailed on this task (a single near-edgeless
    // graph moves it by whole units), so the stopper needs a long horizon to
    // see through the noise.
    int patience = 60;
    double val_frac = 0.1;
    double test_frac = 0.2;
    Pooling pooling = Pooling::MeanAdd;
    int hidden_width = 64;
    std::uint64_t seed = 0;

    static TrainConfig cnn_defaults() {
        TrainConfig cfg;
        cfg.model_kind = "cnn";
        cfg.max_epochs = 25;
        cfg.patience = 10;
        return cfg;
    }

    void validate() const {
        if (model_kind != "gin" && model_kind != "cnn")
            throw ParamError("model_kind must be gin or cnn, got " + model_kind);
        if (!(lr >= 0.0)) throw ParamError("lr must be nonnegative");
        if (max_epochs < 1) throw ParamError("max_epochs must be >= 1");
        if (batch_size < 1) throw ParamError("batch_size must be >= 1");
        if (!(clip_norm > 0.0)) throw ParamError("clip_norm must be positive");
        if (patience < 0 || patience >= max_epochs)
            throw ParamError("patience must satisfy 0 <= patience < max_epochs, got " +
                             std::to_string(patience) + " vs " + std::to_string(max_epochs));
        if (!(val_frac > 0.0 && val_frac < 1.0) || !(test_frac > 0.0 && test_frac < 1.0))
            throw ParamError("split fractions must lie in (0,1)");
        if (hidden_width < 2) throw ParamError("hidden_width must be >= 2");
    }
};

struct EpochRecord {
    int epoch;  // 1-based
    double train_loss;
    double val_mae;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_mae = std::numeric_limits<double>::infinity();

    std::string to_csv() const {
        std::string out = "epoch,train_loss,val_mae\n";
        char buf[128];
        for (const auto& e : epochs) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_mae);
            out += buf;
        }
        return out;
    }
};

namespace detail {

// Snapshot of all parameter values plus batchnorm running statistics, so the
// best-validation checkpoint can be restored after early stopping.
struct ParamSnapshot {
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> buffers;
};

template <typename Model>
ParamSnapshot snapshot(const Model& model) {
    ParamSnapshot s;
    for (const auto& nt : model.named_parameters()) s.values.push_back(nt.tensor.data());
    for (const auto& nt : model.named_buffers()) s.buffers.push_back(nt.tensor.data());
    return s;
}

inline void restore_params(std::vector<NamedTensor> params, const ParamSnapshot& s) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i].tensor.data() = s.values[i];
}

inline void restore(CnnModel& model, const ParamSnapshot& s) {
    restore_params(model.named_parameters(), s);
}

inline void restore(GnnModel& model, const ParamSnapshot& s) {
    restore_params(model.named_parameters(), s);
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        model.layers()[l].bn.stats.running_mean = s.buffers[2 * l];
        model.layers()[l].bn.stats.running_var = s.buffers[2 * l + 1];
    }
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, Xoshiro256& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.next_below(i)]);
    return idx;
}

}  // namespace detail

// Batched eval-mode predictions.
inline std::vector<double> predict_batch(GnnModel& model,
                                         const std::vector<const Graph*>& graphs,
                                         int batch_size = 64) {
    NoGradGuard ng;
    std::vector<double> preds;
    preds.reserve(graphs.size());
    for (std::size_t at = 0; at < graphs.size(); at += static_cast<std::size_t>(batch_size)) {
        const auto end = std::min(graphs.size(), at + static_cast<std::size_t>(batch_size));
        std::vector<const Graph*> chunk(graphs.begin() + static_cast<std::ptrdiff_t>(at),
                                        graphs.begin() + static_cast<std::ptrdiff_t>(end));
        Tensor out = model.forward_batch(chunk, Mode::Eval);
        preds.insert(preds.end(), out.data().begin(), out.data().end());
    }
    return preds;
}

inline std::vector<double> predict_batch(const CnnModel& model,
                                         const std::vector<const Graph*>& graphs,
                                         int batch_size = 32) {
    NoGradGuard ng;
    std::vector<double> preds;
    preds.reserve(graphs.size());
    for (std::size_t at = 0; at < graphs.size(); at += static_cast<std::size_t>(batch_size)) {
        const auto end = std::min(graphs.size(), at + static_cast<std::size_t>(batch_size));
        std::vector<AdjacencyImage> images;
        images.reserve(end - at);
        for (std::size_t i = at; i < end; ++i)
            images.push_back(encode_adjacency_image(*graphs[i]));
        Tensor out = model.forward(image_batch(images), Mode::Eval);
        preds.insert(preds.end(), out.data().begin(), out.data().end());
    }
    return preds;
}

inline std::vector<const Graph*> graph_pointers(const std::vector<LabeledInstance>& instances) {
    std::vector<const Graph*> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(&inst.graph);
    return out;
}

inline std::vector<double> gamma_targets(const std::vector<LabeledInstance>& instances) {
    std::vector<double> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(static_cast<double>(inst.gamma));
    return out;
}

namespace detail {

// Shared epoch/early-stopping skeleton. step(epoch, batch_index, indices)
// returns the batch loss; validate() returns val MAE for the current params.
template <typename Model, typename StepFn, typename ValFn>
TrainHistory run_training(Model& model, const TrainConfig& cfg, std::size_t train_count,
                          StepFn&& step, ValFn&& validate) {
    Xoshiro256 shuffle_rng(derive_seed(cfg.seed, 0x5));
    TrainHistory history;
    ParamSnapshot best = snapshot(model);
    int epochs_since_best = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto order = shuffled_indices(train_count, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        int batch_index = 0;
        for (std::size_t at = 0; at < order.size();
             at += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
            const auto end = std::min(order.size(), at + static_cast<std::size_t>(cfg.batch_size));
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(at),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
            const double loss = step(batch);
            if (!std::isfinite(loss)) throw DivergenceError(cfg.lr, epoch, batch_index);
            loss_sum += loss * static_cast<double>(batch.size());
            seen += batch.size();
        }
        const double train_loss = loss_sum / static_cast<double>(seen);
        const double val_mae = validate();
        history.epochs.push_back({epoch, train_loss, val_mae});

        if (val_mae < history.best_val_mae) {
            history.best_val_mae = val_mae;
            history.best_epoch = epoch;
            best = snapshot(model);
            epochs_since_best = 0;
        } else if (++epochs_since_best >= cfg.patience) {
            break;
        }
    }
    restore(model, best);
    return history;
}

}  // namespace detail

// Mini-batch MSE training of the GIN with Adam, gradient clipping and early
// stopping on validation MAE. Returns the best-validation model.
inline GnnModel train_gnn(const DatasetSplit& split, const TrainConfig& cfg,
                          TrainHistory* out_history = nullptr) {
    cfg.validate();
    if (split.train.empty() || split.val.empty())
        throw ParamError("training requires nonempty train and val splits");

    GnnModel model(cfg.hidden_width, cfg.pooling, cfg.seed);
    auto params = model.parameters();
    Adam opt(params, {.lr = cfg.lr});

    const auto val_graphs = graph_pointers(split.val);
    const auto val_targets = gamma_targets(split.val);

    auto step = [&](const std::vector<std::size_t>& batch) {
        std::vector<const Graph*> graphs;
        Tensor targets = Tensor::zeros({static_cast<int>(batch.size()), 1});
        for (std::size_t i = 0; i < batch.size(); ++i) {
            graphs.push_back(&split.train[batch[i]].graph);
            targets.data()[i] = static_cast<double>(split.train[batch[i]].gamma);
        }
        opt.zero_grad();
        Tensor loss = mse_loss(model.forward_batch(graphs, Mode::Train), targets);
        backward(loss);
        clip_grad_norm(params, cfg.clip_norm);
        opt.step();
        return loss.item();
    };
    auto validate = [&] {
        return compute_metrics(predict_batch(model, val_graphs), val_targets).mae;
    };

    TrainHistory history = detail::run_training(model, cfg, split.train.size(), step, validate);
    if (out_history) *out_history = std::move(history);
    return model;
}

// Same harness for the CNN; adjacency images are encoded once up front.
inline CnnModel train_cnn(const DatasetSplit& split, const TrainConfig& cfg,
                          TrainHistory* out_history = nullptr) {
    cfg.validate();
    if (split.train.empty() || split.val.empty())
        throw ParamError("training requires nonempty train and val splits");

    CnnModel model(cfg.seed);
    auto params = model.parameters();
    Adam opt(params, {.lr = cfg.lr});

    std::vector<AdjacencyImage> train_images;
    train_images.reserve(split.train.size());
    for (const auto& inst : split.train) train_images.push_back(encode_adjacency_image(inst.graph));

    const auto val_graphs = graph_pointers(split.val);
    const auto val_targets = gamma_targets(split.val);

    auto step = [&](const std::vector<std::size_t>& batch) {
        std::vector<AdjacencyImage> images;
        images.reserve(batch.size());
        Tensor targets = Tensor::zeros({static_cast<int>(batch.size()), 1});
        for (std::size_t i = 0; i < batch.size(); ++i) {
            images.push_back(train_images[batch[i]]);
            targets.data()[i] = static_cast<double>(split.train[batch[i]].gamma);
        }
        opt.zero_grad();
        Tensor loss = mse_loss(model.forward(image_batch(images), Mode::Train), targets);
        backward(loss);
        clip_grad_norm(params, cfg.clip_norm);
        opt.step();
        return loss.item();
    };
    auto validate = [&] {
        return compute_metrics(predict_batch(model, val_graphs), val_targets).mae;
    };

    TrainHistory history = detail::run_training(model, cfg, split.train.size(), step, validate);
    if (out_history) *out_history = std::move(history);
    return model;
}

// Scores raw real-valued predictions against the integer labels.
template <typename PredictAll>
EvalReport evaluate_with(PredictAll&& predict_all, const std::vector<LabeledInstance>& instances) {
    if (instances.empty()) throw ParamError("evaluate: no instances");
    std::vector<int> sizes;
    sizes.reserve(instances.size());
    for (const auto& inst : instances) sizes.push_back(inst.graph.vertex_count());
    return make_eval_report(predict_all(instances), gamma_targets(instances), sizes);
}

inline EvalReport evaluate(GnnModel& model, const std::vector<LabeledInstance>& instances) {
    return evaluate_with(
        [&](const std::vector<LabeledInstance>& xs) {
            return predict_batch(model, graph_pointers(xs));
        },
        instances);
}

inline EvalReport evaluate(const CnnModel& model, const std::vector<LabeledInstance>& instances) {
    return evaluate_with(
        [&](const std::vector<LabeledInstance>& xs) {
            return predict_batch(model, graph_pointers(xs));
        },
        instances);
}

inline EvalReport evaluate(SurrogateModel& model, const std::vector<LabeledInstance>& instances) {
    if (auto* gnn = model.as_gnn()) return evaluate(*gnn, instances);
    return evaluate(*model.as_cnn(), instances);
}

}  // namespace domset
