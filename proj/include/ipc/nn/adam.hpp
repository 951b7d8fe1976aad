#pragma once

#include <cstdint>

#include "ipc/nn/mlp.hpp"

namespace ipc::nn {

struct AdamState {
    MlpParams m;  // first moment
    MlpParams v;  // second moment
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_params(const MlpParams& params);
};

// One bias-corrected Adam update in place. Throws std::invalid_argument on shape mismatch.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state, double lr);

}  // namespace ipc::nn
