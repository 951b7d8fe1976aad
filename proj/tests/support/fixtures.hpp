#pragma once
// Shared generators for unit and acceptance tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ipc/contract/sample.hpp"
#include "ipc/nn/mlp.hpp"

namespace ipc::testing {

inline contract::Sample random_sample(std::mt19937_64& rng, double spread = 0.5) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    contract::Sample s;
    for (auto& v : s.state_c) v = u(rng);
    s.perceived_c = Eigen::Vector3d(u(rng), u(rng), 2.0 + u(rng));
    s.truth_c = s.perceived_c + spread * Eigen::Vector3d(u(rng), u(rng), u(rng));
    for (std::size_t i = 0; i < 3; ++i) s.state_c[contract::kMotionDim + i] = s.perceived_c[i];
    return s;
}

inline std::vector<contract::Sample> random_samples(std::mt19937_64& rng, std::size_t n,
                                                    double spread = 0.5) {
    std::vector<contract::Sample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_sample(rng, spread));
    return out;
}

inline contract::Example random_example(std::mt19937_64& rng, std::size_t input_dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    contract::Example ex;
    ex.input.resize(input_dim);
    for (auto& v : ex.input) v = u(rng);
    ex.anchor = Eigen::Vector3d(u(rng), u(rng), u(rng));
    ex.truth = ex.anchor + 0.3 * Eigen::Vector3d(u(rng), u(rng), u(rng));
    return ex;
}

// Random network whose heads vary visibly with the input: the default init
// keeps the center head at zero, so perturb every parameter.
inline nn::MlpParams random_net(std::mt19937_64& rng, const std::vector<std::size_t>& sizes,
                                double scale = 0.3) {
    auto p = nn::init(rng(), sizes);
    auto flat = p.flatten();
    std::normal_distribution<double> n(0.0, scale);
    for (auto& v : flat) v += n(rng);
    p.unflatten(flat);
    return p;
}

// Smallest |pre-activation| over the hidden layers. Central differences are
// only meaningful away from the leaky-rectifier kink.
inline double kink_distance(const nn::MlpParams& p, const std::vector<double>& input) {
    nn::ForwardCache cache;
    nn::forward(p, input, cache);
    double d = 1e300;
    for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l)
        for (double v : cache.pre[l]) d = std::min(d, std::abs(v));
    return d;
}

// Input-independent network whose heads output `center_offset` (added to the
// anchor) and `shape`.
inline nn::MlpParams constant_net(std::size_t input_dim, const Eigen::Vector3d& center_offset,
                                  const Eigen::Matrix3d& shape) {
    const std::vector<std::size_t> sizes{input_dim, 4, 12};
    auto p = nn::init(1, sizes);
    for (auto& L : p.layers) {
        std::fill(L.weight.begin(), L.weight.end(), 0.0);
        std::fill(L.bias.begin(), L.bias.end(), 0.0);
    }
    auto& b = p.layers.back().bias;
    for (int i = 0; i < 3; ++i) b[i] = center_offset[i] / nn::kCenterGain;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) b[3 + 3 * r + c] = shape(r, c) / nn::kShapeGain;
    return p;
}

}  // namespace ipc::testing
