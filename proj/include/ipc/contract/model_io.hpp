#pragma once

#include <json.hpp>
#include <string>

#include "ipc/contract/train.hpp"
#include "ipc/nn/mlp.hpp"

namespace ipc::contract {

inline constexpr int kModelFormat = 1;

// On-disk model: network plus the provenance needed to refuse mismatched data.
struct ModelFile {
    nn::MlpParams params;
    TrainConfig train_config;
    std::string frame_fingerprint;  // camera rig + feature set the model was trained in
    std::string dataset_hash;       // content hash of the training dataset
    int trained_buffer_size = 0;    // perception lag of the training data, 0 if unknown
};

nlohmann::json params_to_json(const nn::MlpParams& p);
nn::MlpParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelFile& m);
ModelFile model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const ModelFile& m);
ModelFile load_model(const std::string& path);

}  // namespace ipc::contract
