#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <json.hpp>
#include <vector>

#include "ipc/contract/sample.hpp"
#include "ipc/sim/world.hpp"

namespace ipc::sim {

// Lissajous sweep in x-y with a sinusoidal altitude. Time is warped by
// s(t) = t - (T / 2 pi) sin(2 pi t / T) so the reference periodically comes to
// rest, which spreads speeds from hover to the velocity limit.
struct PathConfig {
    Eigen::Vector3d center{0.0, 0.0, 1.25};
    Eigen::Vector3d amplitude{2.4, 2.4, 1.15};
    Eigen::Vector3d frequency{0.31, 0.23, 0.17};  // rad/s of warped time
    double warp_period = 9.0;                     // s
    int stride = 12;                              // camera frames between samples
    int pad_count = 1;                            // > 1 moves the pad between segments

    void validate() const;
};

struct DatasetConfig {
    SimConfig sim;
    PathConfig path;
    std::size_t n = 5000;

    void validate() const;
};

nlohmann::json to_json(const DatasetConfig& c);
// Sim fields at top level, path under "path", sample count under "n".
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

// Flies the sweep and samples (x_C, y_C, yhat_C) every `stride` frames.
// Pure function of the config, seed included.
std::vector<contract::Sample> generate_dataset(const DatasetConfig& cfg);

// Lissajous reference position at time t for a given phase offset.
Eigen::Vector3d path_reference(const PathConfig& path, double t, const Eigen::Vector3d& phase);

}  // namespace ipc::sim
