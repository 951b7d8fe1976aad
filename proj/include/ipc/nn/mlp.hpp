#pragma once

// Fully-connected network with leaky-rectifier hidden layers and a linear
// 12-wide output read as two heads: an ellipsoid center (outputs 0..2) and a
// 3x3 shape matrix (outputs 3..11, row-major).
//
// Each head carries a fixed gain. Positions are in meters and the contract needs
// millimeter-level centers but shape entries in the tens (1/radius), while Adam
// moves every parameter by roughly lr per step; the gains put both heads on a
// comparable footing.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ipc::nn {

inline constexpr std::size_t kOutputDim = 12;
inline constexpr std::size_t kDefaultInputDim = 9;
inline constexpr double kDefaultLeakySlope = 0.01;
inline constexpr double kCenterGain = 0.01;
inline constexpr double kShapeGain = 10.0;

struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;  // out x in, row-major
    std::vector<double> bias;    // out

    Layer() = default;
    Layer(std::size_t in_, std::size_t out_)
        : in(in_), out(out_), weight(in_ * out_, 0.0), bias(out_, 0.0) {}
};

// Weights and biases. Gradients and Adam moments reuse this type.
struct MlpParams {
    std::vector<Layer> layers;
    double leaky_slope = kDefaultLeakySlope;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }
    std::vector<std::size_t> sizes() const;
    std::size_t param_count() const;

    MlpParams zeros_like() const;
    void set_zero();
    bool all_finite() const;
    bool same_shape(const MlpParams& other) const;

    // this += scale * other
    void add_scaled(const MlpParams& other, double scale);

    // Flat view of all parameters in layer order (weights then bias per layer).
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);
};

// in -> 64 -> 128 -> 12, the deployed architecture.
std::vector<std::size_t> default_sizes(std::size_t input_dim = kDefaultInputDim);

// Parameter count for a layer-size list; matches MlpParams::param_count.
std::size_t param_count_for(std::span<const std::size_t> sizes);

// Glorot-uniform weights, zero biases. The center head starts at zero (the
// contract is centered on the measurement) and the shape head at 0.1 * I3, so
// first ellipsoids are 10 m balls.
MlpParams init(std::uint64_t seed, std::size_t input_dim);
MlpParams init(std::uint64_t seed, std::span<const std::size_t> sizes,
               double leaky_slope = kDefaultLeakySlope);

struct IpcOutputHeads {
    Eigen::Vector3d center;
    Eigen::Matrix3d shape_raw;
};

// Per-layer pre-activations and activations from one forward pass.
struct ForwardCache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;   // per layer
    std::vector<std::vector<double>> post;  // per layer; last equals pre (linear output)
    std::span<const double> output() const { return post.back(); }
};

// Throws std::invalid_argument on dimension mismatch or non-finite input.
IpcOutputHeads forward(const MlpParams& params, std::span<const double> input);
IpcOutputHeads forward(const MlpParams& params, std::span<const double> input,
                       ForwardCache& cache);

IpcOutputHeads heads_from_output(std::span<const double> output);

// Parameter gradient of <grad_center, center> + <grad_shape, shape_raw>.
MlpParams backward(const MlpParams& params, std::span<const double> input,
                   const Eigen::Vector3d& grad_center, const Eigen::Matrix3d& grad_shape);

// Accumulating variant reusing a cache from forward(); adds into grads.
void backward_accumulate(const MlpParams& params, const ForwardCache& cache,
                         const Eigen::Vector3d& grad_center, const Eigen::Matrix3d& grad_shape,
                         MlpParams& grads);

}  // namespace ipc::nn
