#pragma once

#include <cstdint>
#include <json.hpp>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipc/contract/sample.hpp"
#include "ipc/nn/mlp.hpp"

namespace ipc::contract {

struct TrainConfig {
    double alpha = 0.1;
    double lambda = 1e-3;
    double lr = 1e-3;
    int epochs = 20;
    int batch_size = 8;
    std::uint64_t seed = 1;
    double train_fraction = 0.9;
    std::vector<std::size_t> hidden = {64, 128};
    double leaky_slope = nn::kDefaultLeakySlope;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
// Missing fields keep their defaults; unknown fields are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j);

class TrainingDiverged : public std::runtime_error {
public:
    explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct EpochStats {
    double total = 0.0;
    double erm = 0.0;
    double reg = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> loss_curve;
    double train_error = 0.0;
    double heldout_error = 0.0;
    std::size_t train_count = 0;
    std::size_t heldout_count = 0;
    std::size_t steps = 0;
    // Batches where more than 10% of samples hit the determinant floor.
    std::size_t degenerate_batches = 0;
    double wall_time_s = 0.0;
};

nlohmann::json to_json(const TrainReport& r, const TrainConfig& c);

struct TrainResult {
    nn::MlpParams params;
    TrainReport report;
};

// Mini-batch Adam on the objective. The first train_fraction of a seeded
// permutation trains, the rest is held out. Throws TrainingDiverged if a loss
// term or the parameters become non-finite.
TrainResult train(std::span<const Sample> dataset, const TrainConfig& cfg);
TrainResult train(std::span<const Example> train_set, std::span<const Example> heldout,
                  const TrainConfig& cfg);

}  // namespace ipc::contract
