#include "ipc/contract/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace ipc::contract {

nlohmann::json params_to_json(const nn::MlpParams& p) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : p.layers) {
        layers.push_back({{"in", l.in}, {"out", l.out}, {"weight", l.weight}, {"bias", l.bias}});
    }
    return {{"sizes", p.sizes()}, {"leaky_slope", p.leaky_slope}, {"layers", std::move(layers)}};
}

nn::MlpParams params_from_json(const nlohmann::json& j) {
    nn::MlpParams p;
    p.leaky_slope = j.at("leaky_slope").get<double>();
    const auto sizes = j.at("sizes").get<std::vector<std::size_t>>();
    const auto& layers = j.at("layers");
    if (sizes.size() != layers.size() + 1) {
        throw std::invalid_argument("model: layer list does not match sizes");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        nn::Layer l(sizes[i], sizes[i + 1]);
        if (layers[i].at("in").get<std::size_t>() != l.in ||
            layers[i].at("out").get<std::size_t>() != l.out) {
            throw std::invalid_argument("model: layer " + std::to_string(i) + " size mismatch");
        }
        l.weight = layers[i].at("weight").get<std::vector<double>>();
        l.bias = layers[i].at("bias").get<std::vector<double>>();
        if (l.weight.size() != l.in * l.out || l.bias.size() != l.out) {
            throw std::invalid_argument("model: layer " + std::to_string(i) +
                                        " has the wrong number of entries");
        }
        p.layers.push_back(std::move(l));
    }
    if (p.output_dim() != nn::kOutputDim) {
        throw std::invalid_argument("model: output dimension must be 12");
    }
    if (!p.all_finite()) throw std::invalid_argument("model: non-finite parameter");
    return p;
}

nlohmann::json to_json(const ModelFile& m) {
    return {{"format", kModelFormat},
            {"network", params_to_json(m.params)},
            {"train_config", to_json(m.train_config)},
            {"frame_fingerprint", m.frame_fingerprint},
            {"dataset_hash", m.dataset_hash},
            {"trained_buffer_size", m.trained_buffer_size}};
}

ModelFile model_from_json(const nlohmann::json& j) {
    const int format = j.at("format").get<int>();
    if (format != kModelFormat) {
        throw std::invalid_argument("model: unsupported format " + std::to_string(format));
    }
    ModelFile m;
    m.params = params_from_json(j.at("network"));
    m.train_config = train_config_from_json(j.at("train_config"));
    m.frame_fingerprint = j.at("frame_fingerprint").get<std::string>();
    m.dataset_hash = j.value("dataset_hash", std::string{});
    m.trained_buffer_size = j.value("trained_buffer_size", 0);
    return m;
}

void save_model(const std::string& path, const ModelFile& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << to_json(m).dump(1) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

ModelFile load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return model_from_json(nlohmann::json::parse(is));
}

}  // namespace ipc::contract
