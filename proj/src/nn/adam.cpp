#include "ipc/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "ipc/simd/kernels.hpp"

namespace ipc::nn {

AdamState AdamState::for_params(const MlpParams& params) {
    AdamState s;
    s.m = params.zeros_like();
    s.v = params.zeros_like();
    return s;
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state, double lr) {
    if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
        throw std::invalid_argument("adam_step: parameter, gradient and moment shapes differ");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const simd::AdamCoeffs c{lr,
                             state.beta1,
                             state.beta2,
                             state.eps,
                             1.0 - std::pow(state.beta1, t),
                             1.0 - std::pow(state.beta2, t)};
    const auto& k = simd::active();
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        Layer& p = params.layers[i];
        const Layer& g = grads.layers[i];
        k.adam_update(p.weight.data(), g.weight.data(), state.m.layers[i].weight.data(),
                      state.v.layers[i].weight.data(), p.weight.size(), c);
        k.adam_update(p.bias.data(), g.bias.data(), state.m.layers[i].bias.data(),
                      state.v.layers[i].bias.data(), p.bias.size(), c);
    }
}

}  // namespace ipc::nn
