#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "domset/tensor.hpp"

namespace domset {

namespace detail {

// C[r,c] += A[r,k] * B[k,c]; the k-dimension is unrolled by 4 so each pass
// over the output row amortizes its loads and stores across four FMAs.
inline void gemm_nn(double* __restrict c, const double* __restrict a, const double* __restrict b,
                    int rows, int inner, int cols) {
    const auto bcols = static_cast<std::size_t>(cols);
    for (int i = 0; i < rows; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * inner;
        double* crow = c + static_cast<std::size_t>(i) * cols;
        int l = 0;
        for (; l + 4 <= inner; l += 4) {
            const double a0 = arow[l], a1 = arow[l + 1], a2 = arow[l + 2], a3 = arow[l + 3];
            const double* b0 = b + static_cast<std::size_t>(l) * bcols;
            const double* b1 = b0 + bcols;
            const double* b2 = b1 + bcols;
            const double* b3 = b2 + bcols;
            for (int j = 0; j < cols; ++j)
                crow[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
        }
        for (; l < inner; ++l) {
            const double av = arow[l];
            const double* brow = b + static_cast<std::size_t>(l) * bcols;
            for (int j = 0; j < cols; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[r,c] += A[r,k] * B^T[k,c]  (B stored as [c,k]); four independent
// accumulators keep the reduction pipelined without reordering sums at -O3.
inline void gemm_nt(double* __restrict c, const double* __restrict a, const double* __restrict b,
                    int rows, int inner, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * inner;
        double* crow = c + static_cast<std::size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) {
            const double* brow = b + static_cast<std::size_t>(j) * inner;
            double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
            int l = 0;
            for (; l + 4 <= inner; l += 4) {
                acc0 += arow[l] * brow[l];
                acc1 += arow[l + 1] * brow[l + 1];
                acc2 += arow[l + 2] * brow[l + 2];
                acc3 += arow[l + 3] * brow[l + 3];
            }
            for (; l < inner; ++l) acc0 += arow[l] * brow[l];
            crow[j] += (acc0 + acc1) + (acc2 + acc3);
        }
    }
}

// C[r,c] += A^T[r,k] * B[k,c]  (A stored as [k,r]); same 4-wide blocking of
// the reduction dimension as gemm_nn.
inline void gemm_tn(double* __restrict c, const double* __restrict a, const double* __restrict b,
                    int rows, int inner, int cols) {
    const auto bcols = static_cast<std::size_t>(cols);
    int l = 0;
    for (; l + 4 <= inner; l += 4) {
        const double* a0 = a + static_cast<std::size_t>(l) * rows;
        const double* a1 = a0 + rows;
        const double* a2 = a1 + rows;
        const double* a3 = a2 + rows;
        const double* b0 = b + static_cast<std::size_t>(l) * bcols;
        const double* b1 = b0 + bcols;
        const double* b2 = b1 + bcols;
        const double* b3 = b2 + bcols;
        for (int i = 0; i < rows; ++i) {
            double* crow = c + static_cast<std::size_t>(i) * cols;
            const double v0 = a0[i], v1 = a1[i], v2 = a2[i], v3 = a3[i];
            for (int j = 0; j < cols; ++j)
                crow[j] += v0 * b0[j] + v1 * b1[j] + v2 * b2[j] + v3 * b3[j];
        }
    }
    for (; l < inner; ++l) {
        const double* arow = a + static_cast<std::size_t>(l) * rows;
        const double* brow = b + static_cast<std::size_t>(l) * bcols;
        for (int i = 0; i < rows; ++i) {
            const double av = arow[i];
            double* crow = c + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) crow[j] += av * brow[j];
        }
    }
}

}  // namespace detail

// [r, k] x [k, c] -> [r, c]
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    detail::require_matrix("matmul", a);
    detail::require_matrix("matmul", b);
    if (a.shape()[1] != b.shape()[0])
        throw ShapeError("matmul: shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    const int rows = a.shape()[0], inner = a.shape()[1], cols = b.shape()[1];
    Tensor out = Tensor::zeros({rows, cols});
    detail::gemm_nn(out.data().data(), a.data().data(), b.data().data(), rows, inner, cols);
    OpBuilder op({a, b});
    auto* an = op.input_node(0);
    auto* bn = op.input_node(1);
    auto* on = out.node().get();
    return op.finish(out, [an, bn, on, rows, inner, cols] {
        if (an->requires_grad) {
            an->ensure_grad();
            detail::gemm_nt(an->grad.data(), on->grad.data(), bn->value.data(), rows, cols, inner);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            detail::gemm_tn(bn->grad.data(), an->value.data(), on->grad.data(), inner, rows, cols);
        }
    });
}

// x[N, d_in] * w[d_in, d_out] + bias[d_out] broadcast over rows.
inline Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
    detail::require_matrix("linear", x);
    detail::require_matrix("linear", w);
    if (x.shape()[1] != w.shape()[0])
        throw ShapeError("linear: shape mismatch " + shape_str(x.shape()) + " vs " +
                         shape_str(w.shape()));
    if (bias.shape() != Shape{w.shape()[1]})
        throw ShapeError("linear: bias shape " + shape_str(bias.shape()) +
                         " does not match weight " + shape_str(w.shape()));
    const int rows = x.shape()[0], inner = x.shape()[1], cols = w.shape()[1];
    Tensor out = Tensor::zeros({rows, cols});
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out.data()[i * cols + j] = bias.data()[j];
    detail::gemm_nn(out.data().data(), x.data().data(), w.data().data(), rows, inner, cols);
    OpBuilder op({x, w, bias});
    auto* xn = op.input_node(0);
    auto* wn = op.input_node(1);
    auto* bn = op.input_node(2);
    auto* on = out.node().get();
    return op.finish(out, [xn, wn, bn, on, rows, inner, cols] {
        if (xn->requires_grad) {
            xn->ensure_grad();
            detail::gemm_nt(xn->grad.data(), on->grad.data(), wn->value.data(), rows, cols, inner);
        }
        if (wn->requires_grad) {
            wn->ensure_grad();
            detail::gemm_tn(wn->grad.data(), xn->value.data(), on->grad.data(), inner, rows, cols);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) bn->grad[j] += on->grad[i * cols + j];
        }
    });
}

namespace detail {

// Patch matrix for one image: cols[(ci*kh + ky)*kw + kx][oy*ow + ox]
// = x[ci][oy+ky][ox+kx]. Kernels flatten to [outc, chans*kh*kw], turning the
// convolution into one dense product per image.
inline void im2col(const double* x, int chans, int h, int w, int kh, int kw, double* cols) {
    const int oh = h - kh + 1, ow = w - kw + 1;
    double* dst = cols;
    for (int ci = 0; ci < chans; ++ci) {
        const double* plane = x + static_cast<std::size_t>(ci) * h * w;
        for (int ky = 0; ky < kh; ++ky)
            for (int kx = 0; kx < kw; ++kx)
                for (int oy = 0; oy < oh; ++oy) {
                    const double* src = plane + (oy + ky) * static_cast<std::size_t>(w) + kx;
                    for (int ox = 0; ox < ow; ++ox) *dst++ = src[ox];
                }
    }
}

// Scatter-add the patch-matrix layout back onto an image gradient.
inline void col2im_add(const double* cols, int chans, int h, int w, int kh, int kw, double* gx) {
    const int oh = h - kh + 1, ow = w - kw + 1;
    const double* src = cols;
    for (int ci = 0; ci < chans; ++ci) {
        double* plane = gx + static_cast<std::size_t>(ci) * h * w;
        for (int ky = 0; ky < kh; ++ky)
            for (int kx = 0; kx < kw; ++kx)
                for (int oy = 0; oy < oh; ++oy) {
                    double* dst = plane + (oy + ky) * static_cast<std::size_t>(w) + kx;
                    for (int ox = 0; ox < ow; ++ox) dst[ox] += src[ox];
                    src += ow;
                }
    }
}

}  // namespace detail

// Valid-padding stride-1 cross-correlation.
// x[N, C, H, W] * k[O, C, kh, kw] + bias[O] -> [N, O, H-kh+1, W-kw+1]
inline Tensor conv2d(const Tensor& x, const Tensor& kernels, const Tensor& bias) {
    if (x.shape().size() != 4 || kernels.shape().size() != 4)
        throw ShapeError("conv2d: expected 4-d input and kernels, got " + shape_str(x.shape()) +
                         " vs " + shape_str(kernels.shape()));
    if (x.shape()[1] != kernels.shape()[1])
        throw ShapeError("conv2d: channel mismatch " + shape_str(x.shape()) + " vs " +
                         shape_str(kernels.shape()));
    const int batch = x.shape()[0], chans = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
    const int outc = kernels.shape()[0], kh = kernels.shape()[2], kw = kernels.shape()[3];
    if (kh > h || kw > w)
        throw ShapeError("conv2d: kernel " + shape_str(kernels.shape()) +
                         " larger than input " + shape_str(x.shape()));
    if (bias.shape() != Shape{outc})
        throw ShapeError("conv2d: bias shape " + shape_str(bias.shape()) +
                         " does not match kernels " + shape_str(kernels.shape()));
    const int oh = h - kh + 1, ow = w - kw + 1;
    const int patch = chans * kh * kw;
    const int pixels = oh * ow;
    Tensor out = Tensor::zeros({batch, outc, oh, ow});

    std::vector<double> cols(static_cast<std::size_t>(patch) * pixels);
    for (int n = 0; n < batch; ++n) {
        detail::im2col(x.data().data() + static_cast<std::size_t>(n) * chans * h * w, chans, h, w,
                       kh, kw, cols.data());
        double* od = out.data().data() + static_cast<std::size_t>(n) * outc * pixels;
        for (int co = 0; co < outc; ++co) {
            const double b = bias.data()[static_cast<std::size_t>(co)];
            double* orow = od + static_cast<std::size_t>(co) * pixels;
            for (int i = 0; i < pixels; ++i) orow[i] = b;
        }
        detail::gemm_nn(od, kernels.data().data(), cols.data(), outc, patch, pixels);
    }

    OpBuilder op({x, kernels, bias});
    auto* xn = op.input_node(0);
    auto* kn = op.input_node(1);
    auto* bn = op.input_node(2);
    auto* on = out.node().get();
    return op.finish(out, [xn, kn, bn, on, batch, chans, h, w, outc, kh, kw, oh, ow, patch,
                           pixels] {
        const double* gout = on->grad.data();
        std::vector<double> cols(static_cast<std::size_t>(patch) * pixels);
        if (xn->requires_grad) xn->ensure_grad();
        if (kn->requires_grad) kn->ensure_grad();
        for (int n = 0; n < batch; ++n) {
            const double* gslice = gout + static_cast<std::size_t>(n) * outc * pixels;
            if (xn->requires_grad) {
                // d/dx: cols = kernels^T (outc x patch)^T * gout, then col2im.
                std::fill(cols.begin(), cols.end(), 0.0);
                detail::gemm_tn(cols.data(), kn->value.data(), gslice, patch, outc, pixels);
                detail::col2im_add(cols.data(), chans, h, w, kh, kw,
                                   xn->grad.data() + static_cast<std::size_t>(n) * chans * h * w);
            }
            if (kn->requires_grad) {
                detail::im2col(xn->value.data() + static_cast<std::size_t>(n) * chans * h * w,
                               chans, h, w, kh, kw, cols.data());
                detail::gemm_nt(kn->grad.data(), gslice, cols.data(), outc, pixels, patch);
            }
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int n = 0; n < batch; ++n)
                for (int co = 0; co < outc; ++co) {
                    const double* grow =
                        gout + (static_cast<std::size_t>(n) * outc + co) * pixels;
                    double acc = 0.0;
                    for (int i = 0; i < pixels; ++i) acc += grow[i];
                    bn->grad[static_cast<std::size_t>(co)] += acc;
                }
        }
    });
}

// 2x2 max pooling with stride 2; odd trailing rows/columns are dropped.
inline Tensor maxpool2d(const Tensor& x) {
    if (x.shape().size() != 4)
        throw ShapeError("maxpool2d: expected a 4-d tensor, got " + shape_str(x.shape()));
    const int batch = x.shape()[0], chans = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
    const int oh = h / 2, ow = w / 2;
    if (oh == 0 || ow == 0)
        throw ShapeError("maxpool2d: input " + shape_str(x.shape()) + " too small for 2x2 window");
    Tensor out = Tensor::zeros({batch, chans, oh, ow});
    auto argmax = std::make_shared<std::vector<std::size_t>>(out.data().size());

    const double* xd = x.data().data();
    double* od = out.data().data();
    std::size_t oi = 0;
    for (int n = 0; n < batch; ++n)
        for (int c = 0; c < chans; ++c) {
            const double* plane =
                xd + (static_cast<std::size_t>(n) * chans + c) * static_cast<std::size_t>(h) * w;
            const std::size_t plane_off =
                (static_cast<std::size_t>(n) * chans + c) * static_cast<std::size_t>(h) * w;
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    std::size_t best = static_cast<std::size_t>(2 * oy) * w + 2 * ox;
                    double best_v = plane[best];
                    const std::size_t idx[3] = {best + 1, best + w, best + w + 1};
                    for (std::size_t cand : idx)
                        if (plane[cand] > best_v) {
                            best_v = plane[cand];
                            best = cand;
                        }
                    od[oi] = best_v;
                    (*argmax)[oi] = plane_off + best;
                }
        }

    OpBuilder op({x});
    auto* xn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [xn, on, argmax] {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < argmax->size(); ++i)
            xn->grad[(*argmax)[i]] += on->grad[i];
    });
}

// Running statistics and hyperparameters for one batchnorm instance.
struct BatchNormStats {
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.1;
    double eps = 1e-5;

    explicit BatchNormStats(int features = 0)
        : running_mean(static_cast<std::size_t>(features), 0.0),
          running_var(static_cast<std::size_t>(features), 1.0) {}
};

enum class Mode { Train, Eval };

// Batch normalization over the rows of x[N, d]. Training mode normalizes by
// the biased batch variance and updates the running statistics (unbiased
// variance, like the usual framework convention); eval mode applies the
// stored statistics so single-sample inference is batch-independent.
inline Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                        BatchNormStats& stats, Mode mode) {
    detail::require_matrix("batchnorm", x);
    const int rows = x.shape()[0], cols = x.shape()[1];
    if (gamma.shape() != Shape{cols} || beta.shape() != Shape{cols})
        throw ShapeError("batchnorm: affine shapes " + shape_str(gamma.shape()) + " vs input " +
                         shape_str(x.shape()));
    if (static_cast<int>(stats.running_mean.size()) != cols)
        throw ShapeError("batchnorm: running stats track " +
                         std::to_string(stats.running_mean.size()) + " features vs input " +
                         shape_str(x.shape()));
    if (mode == Mode::Train && rows < 1) throw ContractError("batchnorm: empty batch");

    Tensor out = Tensor::zeros(x.shape());
    auto xhat = std::make_shared<std::vector<double>>(x.data().size());
    auto inv_std = std::make_shared<std::vector<double>>(static_cast<std::size_t>(cols));

    if (mode == Mode::Train) {
        for (int j = 0; j < cols; ++j) {
            double mean = 0.0;
            for (int i = 0; i < rows; ++i) mean += x.data()[i * cols + j];
            mean /= rows;
            double var = 0.0;
            for (int i = 0; i < rows; ++i) {
                const double d = x.data()[i * cols + j] - mean;
                var += d * d;
            }
            var /= rows;
            const double is = 1.0 / std::sqrt(var + stats.eps);
            (*inv_std)[static_cast<std::size_t>(j)] = is;
            for (int i = 0; i < rows; ++i) {
                const double xh = (x.data()[i * cols + j] - mean) * is;
                (*xhat)[static_cast<std::size_t>(i * cols + j)] = xh;
                out.data()[i * cols + j] = gamma.data()[static_cast<std::size_t>(j)] * xh +
                                           beta.data()[static_cast<std::size_t>(j)];
            }
            const double unbiased = rows > 1 ? var * rows / (rows - 1) : var;
            stats.running_mean[static_cast<std::size_t>(j)] =
                (1.0 - stats.momentum) * stats.running_mean[static_cast<std::size_t>(j)] +
                stats.momentum * mean;
            stats.running_var[static_cast<std::size_t>(j)] =
                (1.0 - stats.momentum) * stats.running_var[static_cast<std::size_t>(j)] +
                stats.momentum * unbiased;
        }
    } else {
        for (int j = 0; j < cols; ++j) {
            const double mean = stats.running_mean[static_cast<std::size_t>(j)];
            const double is = 1.0 / std::sqrt(stats.running_var[static_cast<std::size_t>(j)] + stats.eps);
            (*inv_std)[static_cast<std::size_t>(j)] = is;
            for (int i = 0; i < rows; ++i) {
                const double xh = (x.data()[i * cols + j] - mean) * is;
                (*xhat)[static_cast<std::size_t>(i * cols + j)] = xh;
                out.data()[i * cols + j] = gamma.data()[static_cast<std::size_t>(j)] * xh +
                                           beta.data()[static_cast<std::size_t>(j)];
            }
        }
    }

    OpBuilder op({x, gamma, beta});
    auto* xn = op.input_node(0);
    auto* gn = op.input_node(1);
    auto* bn = op.input_node(2);
    auto* on = out.node().get();
    const bool training = mode == Mode::Train;
    return op.finish(out, [xn, gn, bn, on, xhat, inv_std, rows, cols, training] {
        if (gn->requires_grad) {
            gn->ensure_grad();
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    gn->grad[static_cast<std::size_t>(j)] +=
                        on->grad[i * cols + j] * (*xhat)[static_cast<std::size_t>(i * cols + j)];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    bn->grad[static_cast<std::size_t>(j)] += on->grad[i * cols + j];
        }
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        if (training) {
            // d/dx of the batch-statistics normalization.
            for (int j = 0; j < cols; ++j) {
                double sum_g = 0.0, sum_gx = 0.0;
                for (int i = 0; i < rows; ++i) {
                    const double g = on->grad[i * cols + j];
                    sum_g += g;
                    sum_gx += g * (*xhat)[static_cast<std::size_t>(i * cols + j)];
                }
                const double scale_j =
                    gn->value[static_cast<std::size_t>(j)] * (*inv_std)[static_cast<std::size_t>(j)];
                for (int i = 0; i < rows; ++i) {
                    const double g = on->grad[i * cols + j];
                    const double xh = (*xhat)[static_cast<std::size_t>(i * cols + j)];
                    xn->grad[i * cols + j] +=
                        scale_j * (g - sum_g / rows - xh * (sum_gx / rows));
                }
            }
        } else {
            for (int j = 0; j < cols; ++j) {
                const double scale_j =
                    gn->value[static_cast<std::size_t>(j)] * (*inv_std)[static_cast<std::size_t>(j)];
                for (int i = 0; i < rows; ++i)
                    xn->grad[i * cols + j] += on->grad[i * cols + j] * scale_j;
            }
        }
    });
}

// Compressed adjacency over the nodes of one graph or a whole batch of
// graphs (indices are batch-global). Neighbor lists are ascending, matching
// the fixed summation order the permutation-invariance tolerance relies on.
struct CsrAdjacency {
    std::vector<int> offsets;    // size = node count + 1
    std::vector<int> neighbors;  // concatenated ascending lists

    int node_count() const { return static_cast<int>(offsets.size()) - 1; }
};

// out[v] = sum of H rows over the neighbors of v. The adjacency must be
// symmetric, which makes the backward pass the same gather.
inline Tensor neighbor_sum(const Tensor& h, std::shared_ptr<const CsrAdjacency> adj) {
    detail::require_matrix("neighbor_sum", h);
    const int rows = h.shape()[0], cols = h.shape()[1];
    if (adj->node_count() != rows)
        throw ShapeError("neighbor_sum: adjacency over " + std::to_string(adj->node_count()) +
                         " nodes vs features " + shape_str(h.shape()));
    Tensor out = Tensor::zeros(h.shape());
    for (int v = 0; v < rows; ++v) {
        double* orow = out.data().data() + static_cast<std::size_t>(v) * cols;
        for (int e = adj->offsets[v]; e < adj->offsets[v + 1]; ++e) {
            const double* hrow =
                h.data().data() + static_cast<std::size_t>(adj->neighbors[e]) * cols;
            for (int j = 0; j < cols; ++j) orow[j] += hrow[j];
        }
    }
    OpBuilder op({h});
    auto* hn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [hn, on, adj, rows, cols] {
        if (!hn->requires_grad) return;
        hn->ensure_grad();
        for (int v = 0; v < rows; ++v) {
            double* grow = hn->grad.data() + static_cast<std::size_t>(v) * cols;
            for (int e = adj->offsets[v]; e < adj->offsets[v + 1]; ++e) {
                const double* gout =
                    on->grad.data() + static_cast<std::size_t>(adj->neighbors[e]) * cols;
                for (int j = 0; j < cols; ++j) grow[j] += gout[j];
            }
        }
    });
}

enum class SegmentReduce { Sum, Mean };

// Reduces contiguous row segments of h[N, d] into one row per segment.
// offsets has size G+1 with offsets[0] = 0 and offsets[G] = N.
inline Tensor segment_reduce_rows(const Tensor& h, std::shared_ptr<const std::vector<int>> offsets,
                                  SegmentReduce kind) {
    detail::require_matrix("segment_reduce_rows", h);
    const int rows = h.shape()[0], cols = h.shape()[1];
    const int groups = static_cast<int>(offsets->size()) - 1;
    if (groups < 1 || offsets->front() != 0 || offsets->back() != rows)
        throw ShapeError("segment_reduce_rows: offsets do not partition " + shape_str(h.shape()));
    for (int g = 0; g < groups; ++g)
        if ((*offsets)[g + 1] <= (*offsets)[g])
            throw ContractError("segment_reduce_rows: empty segment " + std::to_string(g));

    Tensor out = Tensor::zeros({groups, cols});
    for (int g = 0; g < groups; ++g) {
        double* orow = out.data().data() + static_cast<std::size_t>(g) * cols;
        for (int i = (*offsets)[g]; i < (*offsets)[g + 1]; ++i) {
            const double* hrow = h.data().data() + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) orow[j] += hrow[j];
        }
        if (kind == SegmentReduce::Mean) {
            const double inv = 1.0 / ((*offsets)[g + 1] - (*offsets)[g]);
            for (int j = 0; j < cols; ++j) orow[j] *= inv;
        }
    }
    OpBuilder op({h});
    auto* hn = op.input_node(0);
    auto* on = out.node().get();
    return op.finish(out, [hn, on, offsets, groups, cols, kind] {
        if (!hn->requires_grad) return;
        hn->ensure_grad();
        for (int g = 0; g < groups; ++g) {
            const double* grow = on->grad.data() + static_cast<std::size_t>(g) * cols;
            const double inv =
                kind == SegmentReduce::Mean ? 1.0 / ((*offsets)[g + 1] - (*offsets)[g]) : 1.0;
            for (int i = (*offsets)[g]; i < (*offsets)[g + 1]; ++i) {
                double* hrow = hn->grad.data() + static_cast<std::size_t>(i) * cols;
                for (int j = 0; j < cols; ++j) hrow[j] += grow[j] * inv;
            }
        }
    });
}

}  // namespace domset
