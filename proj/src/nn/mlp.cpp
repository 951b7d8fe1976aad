#include "ipc/nn/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "ipc/simd/kernels.hpp"

namespace ipc::nn {

std::vector<std::size_t> MlpParams::sizes() const {
    std::vector<std::size_t> s;
    if (layers.empty()) return s;
    s.push_back(layers.front().in);
    for (const auto& l : layers) s.push_back(l.out);
    return s;
}

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

MlpParams MlpParams::zeros_like() const {
    MlpParams z;
    z.leaky_slope = leaky_slope;
    z.layers.reserve(layers.size());
    for (const auto& l : layers) z.layers.emplace_back(l.in, l.out);
    return z;
}

void MlpParams::set_zero() {
    for (auto& l : layers) {
        std::fill(l.weight.begin(), l.weight.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
}

bool MlpParams::all_finite() const {
    for (const auto& l : layers) {
        for (double w : l.weight)
            if (!std::isfinite(w)) return false;
        for (double b : l.bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

bool MlpParams::same_shape(const MlpParams& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].in != other.layers[i].in || layers[i].out != other.layers[i].out) return false;
    }
    return true;
}

void MlpParams::add_scaled(const MlpParams& other, double scale) {
    if (!same_shape(other)) throw std::invalid_argument("add_scaled: shape mismatch");
    const auto& k = simd::active();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        k.axpy(scale, other.layers[i].weight.data(), layers[i].weight.data(),
               layers[i].weight.size());
        k.axpy(scale, other.layers[i].bias.data(), layers[i].bias.data(), layers[i].bias.size());
    }
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto& l : layers) {
        flat.insert(flat.end(), l.weight.begin(), l.weight.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void MlpParams::unflatten(std::span<const double> flat) {
    if (flat.size() != param_count()) throw std::invalid_argument("unflatten: size mismatch");
    std::size_t off = 0;
    for (auto& l : layers) {
        std::copy_n(flat.begin() + off, l.weight.size(), l.weight.begin());
        off += l.weight.size();
        std::copy_n(flat.begin() + off, l.bias.size(), l.bias.begin());
        off += l.bias.size();
    }
}

std::vector<std::size_t> default_sizes(std::size_t input_dim) {
    return {input_dim, 64, 128, kOutputDim};
}

std::size_t param_count_for(std::span<const std::size_t> sizes) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) n += sizes[i] * sizes[i + 1] + sizes[i + 1];
    return n;
}

MlpParams init(std::uint64_t seed, std::size_t input_dim) {
    if (input_dim < 1) throw std::invalid_argument("init: input_dim must be >= 1");
    const auto sizes = default_sizes(input_dim);
    return init(seed, sizes);
}

MlpParams init(std::uint64_t seed, std::span<const std::size_t> sizes, double leaky_slope) {
    if (sizes.size() < 2) throw std::invalid_argument("init: need at least two layer sizes");
    if (sizes.back() != kOutputDim) {
        throw std::invalid_argument("init: output dimension must be " +
                                    std::to_string(kOutputDim));
    }
    for (auto s : sizes)
        if (s == 0) throw std::invalid_argument("init: zero-width layer");

    std::mt19937_64 rng(seed);
    MlpParams p;
    p.leaky_slope = leaky_slope;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        Layer l(sizes[i], sizes[i + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : l.weight) w = dist(rng);
        p.layers.push_back(std::move(l));
    }
    auto& last = p.layers.back();
    std::fill_n(last.weight.begin(), 3 * last.in, 0.0);
    for (int d = 0; d < 3; ++d) last.bias[3 + 3 * d + d] = 0.1 / kShapeGain;
    return p;
}

IpcOutputHeads heads_from_output(std::span<const double> out) {
    if (out.size() != kOutputDim) throw std::invalid_argument("heads_from_output: need 12 values");
    IpcOutputHeads h;
    h.center = kCenterGain * Eigen::Vector3d(out[0], out[1], out[2]);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) h.shape_raw(r, c) = kShapeGain * out[3 + 3 * r + c];
    return h;
}

IpcOutputHeads forward(const MlpParams& params, std::span<const double> input) {
    ForwardCache cache;
    return forward(params, input, cache);
}

IpcOutputHeads forward(const MlpParams& params, std::span<const double> input,
                       ForwardCache& cache) {
    if (params.layers.empty()) throw std::invalid_argument("forward: empty network");
    if (input.size() != params.input_dim()) {
        throw std::invalid_argument("forward: input has " + std::to_string(input.size()) +
                                    " features, network expects " +
                                    std::to_string(params.input_dim()));
    }
    for (double x : input)
        if (!std::isfinite(x)) throw std::invalid_argument("forward: non-finite input");

    const auto& k = simd::active();
    const std::size_t nl = params.layers.size();
    cache.input.assign(input.begin(), input.end());
    cache.pre.resize(nl);
    cache.post.resize(nl);
    const double* x = cache.input.data();
    for (std::size_t i = 0; i < nl; ++i) {
        const Layer& l = params.layers[i];
        cache.pre[i].resize(l.out);
        cache.post[i].resize(l.out);
        k.gemv(l.weight.data(), x, l.bias.data(), cache.pre[i].data(), l.out, l.in);
        if (i + 1 < nl) {
            k.leaky_relu(cache.pre[i].data(), cache.post[i].data(), l.out, params.leaky_slope);
        } else {
            cache.post[i] = cache.pre[i];
        }
        x = cache.post[i].data();
    }
    return heads_from_output(cache.output());
}

void backward_accumulate(const MlpParams& params, const ForwardCache& cache,
                         const Eigen::Vector3d& grad_center, const Eigen::Matrix3d& grad_shape,
                         MlpParams& grads) {
    const auto& k = simd::active();
    const std::size_t nl = params.layers.size();
    std::vector<double> delta(kOutputDim);
    for (int i = 0; i < 3; ++i) delta[i] = kCenterGain * grad_center[i];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) delta[3 + 3 * r + c] = kShapeGain * grad_shape(r, c);

    std::vector<double> prev;
    for (std::size_t li = nl; li-- > 0;) {
        const Layer& l = params.layers[li];
        Layer& gl = grads.layers[li];
        const double* x = li == 0 ? cache.input.data() : cache.post[li - 1].data();
        k.ger(gl.weight.data(), delta.data(), x, l.out, l.in);
        k.axpy(1.0, delta.data(), gl.bias.data(), l.out);
        if (li == 0) break;
        prev.resize(l.in);
        k.gemv_t(l.weight.data(), delta.data(), prev.data(), l.out, l.in);
        k.leaky_relu_backward(cache.pre[li - 1].data(), prev.data(), l.in, params.leaky_slope);
        delta.swap(prev);
    }
}

MlpParams backward(const MlpParams& params, std::span<const double> input,
                   const Eigen::Vector3d& grad_center, const Eigen::Matrix3d& grad_shape) {
    if (!grad_center.allFinite() || !grad_shape.allFinite()) {
        throw std::invalid_argument("backward: non-finite upstream gradient");
    }
    ForwardCache cache;
    forward(params, input, cache);
    MlpParams grads = params.zeros_like();
    backward_accumulate(params, cache, grad_center, grad_shape, grads);
    return grads;
}

}  // namespace ipc::nn
