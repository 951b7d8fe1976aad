#include "ipc/contract/pac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ipc/contract/objective.hpp"

namespace ipc::contract {

void PacInputs::validate() const {
    if (!(empirical_trunc_loss >= 0.0 && empirical_trunc_loss <= 1.0)) {
        throw std::invalid_argument("pac: empirical truncated loss must lie in [0, 1]");
    }
    if (!(alpha > 0.0)) throw std::invalid_argument("pac: alpha must be > 0");
    if (!(lipschitz_lg >= 0.0)) throw std::invalid_argument("pac: L_g must be >= 0");
    if (sample_count_n == 0) throw std::invalid_argument("pac: N must be >= 1");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("pac: epsilon must be >= 0");
}

PacBound pac_bound(const PacInputs& in) {
    in.validate();
    const double n = static_cast<double>(in.sample_count_n);
    const double p = static_cast<double>(in.param_count_p);
    PacBound out;
    out.complexity = (12.0 / in.alpha) * in.lipschitz_lg * std::sqrt(p / n);
    out.bound = in.empirical_trunc_loss + out.complexity + in.epsilon;
    out.confidence = 1.0 - 2.0 * std::exp(-2.0 * n * in.epsilon * in.epsilon);
    return out;
}

double estimate_lipschitz(const nn::MlpParams& params, std::span<const Sample> samples,
                          double safety_factor) {
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, g_gradient_norm(params, to_example(s)));
    return safety_factor * worst;
}

}  // namespace ipc::contract
