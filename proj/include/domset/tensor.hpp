#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "domset/error.hpp"

namespace domset {

using Shape = std::vector<int>;

inline std::int64_t numel(const Shape& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

namespace detail {

struct TensorNode {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until first accumulation
    bool requires_grad = false;

    std::vector<std::shared_ptr<TensorNode>> parents;
    std::function<void()> backprop;  // reads this->grad, accumulates into parents

    void ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), 0.0);
    }
};

// Reverse-mode tracking is on by default; wrap inference in NoGradGuard to
// skip closure recording.
inline bool& grad_mode() {
    thread_local bool enabled = true;
    return enabled;
}

}  // namespace detail

struct NoGradGuard {
    NoGradGuard() : previous(detail::grad_mode()) { detail::grad_mode() = false; }
    ~NoGradGuard() { detail::grad_mode() = previous; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
    bool previous;
};

// Dense row-major float64 tensor participating in a reverse-mode computation
// graph. Copies share the underlying node (shallow value semantics, like a
// smart reference); deep copies go through clone().
class Tensor {
public:
    Tensor() : node_(std::make_shared<detail::TensorNode>()) {}

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        Tensor t;
        t.node_->shape = std::move(shape);
        t.node_->value.assign(static_cast<std::size_t>(numel(t.node_->shape)), 0.0);
        t.node_->requires_grad = requires_grad;
        return t;
    }

    static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false) {
        if (static_cast<std::int64_t>(data.size()) != numel(shape))
            throw ShapeError("tensor data of length " + std::to_string(data.size()) +
                             " does not fill shape " + shape_str(shape));
        Tensor t;
        t.node_->shape = std::move(shape);
        t.node_->value = std::move(data);
        t.node_->requires_grad = requires_grad;
        return t;
    }

    static Tensor scalar(double v, bool requires_grad = false) {
        return from_data({1}, {v}, requires_grad);
    }

    const Shape& shape() const { return node_->shape; }
    std::int64_t size() const { return static_cast<std::int64_t>(node_->value.size()); }

    std::vector<double>& data() { return node_->value; }
    const std::vector<double>& data() const { return node_->value; }

    double item() const {
        if (size() != 1)
            throw ContractError("item() requires a scalar tensor, shape is " +
                                shape_str(node_->shape));
        return node_->value[0];
    }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool v) { node_->requires_grad = v; }

    bool has_grad() const { return !node_->grad.empty(); }
    std::vector<double>& grad() {
        node_->ensure_grad();
        return node_->grad;
    }
    const std::vector<double>& grad() const {
        node_->ensure_grad();
        return node_->grad;
    }
    void zero_grad() { node_->grad.clear(); }

    Tensor clone() const {
        Tensor t;
        t.node_->shape = node_->shape;
        t.node_->value = node_->value;
        t.node_->requires_grad = node_->requires_grad;
        return t;
    }

    // Detached view of the same values (no graph history, shares nothing).
    Tensor detach() const { return clone(); }

    std::shared_ptr<detail::TensorNode> node() const { return node_; }

private:
    std::shared_ptr<detail::TensorNode> node_;

    friend class OpBuilder;
};

// Helper for defining differentiable ops: collects parents, decides whether a
// closure must be recorded, and wires it up.
class OpBuilder {
public:
    explicit OpBuilder(std::vector<Tensor> inputs) : inputs_(std::move(inputs)) {
        if (detail::grad_mode())
            for (const auto& t : inputs_)
                if (t.node()->requires_grad) {
                    record_ = true;
                    break;
                }
    }

    bool recording() const { return record_; }

    detail::TensorNode* input_node(std::size_t i) const { return inputs_[i].node().get(); }

    // fn runs during the backward sweep with out's grad populated.
    Tensor finish(Tensor out, std::function<void()> fn) {
        if (record_) {
            out.node()->requires_grad = true;
            for (const auto& t : inputs_) out.node()->parents.push_back(t.node());
            out.node()->backprop = std::move(fn);
        }
        return out;
    }

private:
    std::vector<Tensor> inputs_;
    bool record_ = false;
};

// Accumulates d(loss)/d(x) into the grad buffer of every tensor reachable
// from `loss` that requires grad. Repeated calls accumulate.
inline void backward(const Tensor& loss) {
    if (loss.size() != 1)
        throw ContractError("backward requires a scalar loss, shape is " +
                            shape_str(loss.shape()));
    if (!loss.node()->requires_grad) return;  // constant graph: nothing to populate

    // Iterative post-order DFS over parent edges.
    std::vector<detail::TensorNode*> order;
    std::unordered_set<detail::TensorNode*> visited;
    struct Frame {
        detail::TensorNode* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack{{loss.node().get(), 0}};
    visited.insert(loss.node().get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.node->parents.size()) {
            detail::TensorNode* p = f.node->parents[f.next_parent++].get();
            if (visited.insert(p).second) stack.push_back({p, 0});
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    // Op outputs get a fresh pass-local gradient; leaves keep accumulating,
    // so a second backward() without zero_grad adds another d(loss)/d(leaf).
    for (auto* node : order)
        if (node->backprop) node->grad.assign(node->value.size(), 0.0);

    loss.node()->ensure_grad();
    loss.node()->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backprop) (*it)->backprop();
}

// ---------------------------------------------------------------------------
// Elementwise and reduction ops
// ---------------------------------------------------------------------------

namespace detail {

inline void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
    detail::require_same_shape("add", a, b);
    Tensor out = Tensor::zeros(a.shape());
    const std::size_t n = a.data().size();
    for (std::size_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] + b.data()[i];
    OpBuilder op({a, b});
    auto* an = op.input_node(0);
    auto* bn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [an, bn, on, n] {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) an->grad[i] += on->grad[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) bn->grad[i] += on->grad[i];
        }
    });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
    detail::require_same_shape("mul", a, b);
    Tensor out = Tensor::zeros(a.shape());
    const std::size_t n = a.data().size();
    for (std::size_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] * b.data()[i];
    OpBuilder op({a, b});
    auto* an = op.input_node(0);
    auto* bn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [an, bn, on, n] {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) an->grad[i] += on->grad[i] * bn->value[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < n; ++i) bn->grad[i] += on->grad[i] * an->value[i];
        }
    });
}

inline Tensor scale(const Tensor& x, double c) {
    Tensor out = Tensor::zeros(x.shape());
    const std::size_t n = x.data().size();
    for (std::size_t i = 0; i < n; ++i) out.data()[i] = x.data()[i] * c;
    OpBuilder op({x});
    auto* xn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [xn, on, n, c] {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) xn->grad[i] += on->grad[i] * c;
    });
}

// x * s with s a one-element tensor (used for the learnable GIN epsilon).
inline Tensor mul_scalar(const Tensor& x, const Tensor& s) {
    if (s.size() != 1)
        throw ShapeError("mul_scalar: scale must have one element, got " + shape_str(s.shape()) +
                         " vs input " + shape_str(x.shape()));
    Tensor out = Tensor::zeros(x.shape());
    const std::size_t n = x.data().size();
    const double sv = s.data()[0];
    for (std::size_t i = 0; i < n; ++i) out.data()[i] = x.data()[i] * sv;
    OpBuilder op({x, s});
    auto* xn = op.input_node(0);
    auto* sn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [xn, sn, on, n] {
        if (xn->requires_grad) {
            xn->ensure_grad();
            const double sv = sn->value[0];
            for (std::size_t i = 0; i < n; ++i) xn->grad[i] += on->grad[i] * sv;
        }
        if (sn->requires_grad) {
            sn->ensure_grad();
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += on->grad[i] * xn->value[i];
            sn->grad[0] += acc;
        }
    });
}

inline Tensor relu(const Tensor& x) {
    Tensor out = Tensor::zeros(x.shape());
    const std::size_t n = x.data().size();
    for (std::size_t i = 0; i < n; ++i) out.data()[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
    OpBuilder op({x});
    auto* xn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [xn, on, n] {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i)
            if (xn->value[i] > 0.0) xn->grad[i] += on->grad[i];
    });
}

inline Tensor reshape(const Tensor& x, Shape shape) {
    if (numel(shape) != x.size())
        throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " +
                         shape_str(shape));
    Tensor out = Tensor::from_data(std::move(shape), x.data());
    OpBuilder op({x});
    auto* xn = op.input_node(0);
    auto* on = out.node().get();
    const std::size_t n = x.data().size();
    return op.finish(out, [xn, on, n] {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) xn->grad[i] += on->grad[i];
    });
}

// [N, ...] -> [N, product of the rest]
inline Tensor flatten(const Tensor& x) {
    if (x.shape().empty())
        throw ShapeError("flatten: input must have at least one dimension, got " +
                         shape_str(x.shape()));
    const int rows = x.shape()[0];
    const int cols = static_cast<int>(x.size() / rows);
    return reshape(x, {rows, cols});
}

inline Tensor mean_all(const Tensor& x) {
    if (x.size() == 0) throw ContractError("mean_all: empty tensor");
    const std::size_t n = x.data().size();
    double acc = 0.0;
    for (double v : x.data()) acc += v;
    Tensor out = Tensor::scalar(acc / static_cast<double>(n));
    OpBuilder op({x});
    auto* xn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [xn, on, n] {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double g = on->grad[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) xn->grad[i] += g;
    });
}

namespace detail {

inline void require_matrix(const char* op, const Tensor& x) {
    if (x.shape().size() != 2)
        throw ShapeError(std::string(op) + ": expected a 2-d tensor, got " +
                         shape_str(x.shape()));
}

}  // namespace detail

// Column sums of a [N, d] matrix -> [d]. Rows are accumulated in index order.
inline Tensor sum_rows(const Tensor& x) {
    detail::require_matrix("sum_rows", x);
    const int rows = x.shape()[0], cols = x.shape()[1];
    Tensor out = Tensor::zeros({cols});
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out.data()[j] += x.data()[i * cols + j];
    OpBuilder op({x});
    auto* xn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [xn, on, rows, cols] {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) xn->grad[i * cols + j] += on->grad[j];
    });
}

inline Tensor mean_rows(const Tensor& x) {
    detail::require_matrix("mean_rows", x);
    if (x.shape()[0] == 0) throw ContractError("mean_rows: no rows");
    return scale(sum_rows(x), 1.0 / x.shape()[0]);
}

// 1-d concatenation.
inline Tensor concat(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 1 || b.shape().size() != 1)
        throw ShapeError("concat: expected 1-d tensors, got " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    const int na = a.shape()[0], nb = b.shape()[0];
    Tensor out = Tensor::zeros({na + nb});
    for (int i = 0; i < na; ++i) out.data()[i] = a.data()[i];
    for (int i = 0; i < nb; ++i) out.data()[na + i] = b.data()[i];
    OpBuilder op({a, b});
    auto* an = op.input_node(0);
    auto* bn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [an, bn, on, na, nb] {
        if (an->requires_grad) {
            an->ensure_grad();
            for (int i = 0; i < na; ++i) an->grad[i] += on->grad[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int i = 0; i < nb; ++i) bn->grad[i] += on->grad[na + i];
        }
    });
}

// Column-wise concatenation of [N, p] and [N, q] -> [N, p+q].
inline Tensor concat_cols(const Tensor& a, const Tensor& b) {
    detail::require_matrix("concat_cols", a);
    detail::require_matrix("concat_cols", b);
    if (a.shape()[0] != b.shape()[0])
        throw ShapeError("concat_cols: row mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    const int rows = a.shape()[0], p = a.shape()[1], q = b.shape()[1];
    Tensor out = Tensor::zeros({rows, p + q});
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < p; ++j) out.data()[i * (p + q) + j] = a.data()[i * p + j];
        for (int j = 0; j < q; ++j) out.data()[i * (p + q) + p + j] = b.data()[i * q + j];
    }
    OpBuilder op({a, b});
    auto* an = op.input_node(0);
    auto* bn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [an, bn, on, rows, p, q] {
        if (an->requires_grad) {
            an->ensure_grad();
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < p; ++j) an->grad[i * p + j] += on->grad[i * (p + q) + j];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < q; ++j) bn->grad[i * q + j] += on->grad[i * (p + q) + p + j];
        }
    });
}

// Mean of squared elementwise differences, as a scalar.
inline Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    detail::require_same_shape("mse_loss", pred, target);
    if (pred.size() == 0) throw ContractError("mse_loss: empty tensors");
    const std::size_t n = pred.data().size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pred.data()[i] - target.data()[i];
        acc += e * e;
    }
    Tensor out = Tensor::scalar(acc / static_cast<double>(n));
    OpBuilder op({pred, target});
    auto* pn = op.input_node(0);
    auto* tn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [pn, tn, on, n] {
        const double g = 2.0 * on->grad[0] / static_cast<double>(n);
        if (pn->requires_grad) {
            pn->ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                pn->grad[i] += g * (pn->value[i] - tn->value[i]);
        }
        if (tn->requires_grad) {
            tn->ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                tn->grad[i] -= g * (pn->value[i] - tn->value[i]);
        }
    });
}

}  // namespace domset
