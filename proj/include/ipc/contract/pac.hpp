#pragma once

#include <cstddef>
#include <span>

#include "ipc/contract/sample.hpp"
#include "ipc/nn/mlp.hpp"

namespace ipc::contract {

struct PacInputs {
    double empirical_trunc_loss = 0.0;  // in [0, 1]
    double alpha = 0.1;
    double lipschitz_lg = 0.0;  // Lipschitz constant of g with respect to the parameters
    std::size_t param_count_p = 0;
    std::size_t sample_count_n = 0;
    double epsilon = 0.0;

    void validate() const;
};

struct PacBound {
    double bound = 0.0;        // upper bound on the true contract error
    double confidence = 0.0;   // probability the bound holds
    double complexity = 0.0;   // (12 / alpha) * L_g * sqrt(p / N)
};

// bound      = empirical + (12 / alpha) L_g sqrt(p / N) + epsilon
// confidence = 1 - 2 exp(-2 N epsilon^2)
// The bound is conditional on the supplied L_g.
PacBound pac_bound(const PacInputs& in);

// Empirical L_g: largest parameter-gradient norm of g over the samples, times safety_factor.
double estimate_lipschitz(const nn::MlpParams& params, std::span<const Sample> samples,
                          double safety_factor = 2.0);

}  // namespace ipc::contract
