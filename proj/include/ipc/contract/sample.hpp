#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipc::contract {

inline constexpr std::size_t kStateDim = 9;
// Leading entries of the state that describe motion: v_C (3), omega_C (3).
inline constexpr std::size_t kMotionDim = 6;
inline constexpr std::string_view kFeatureSet = "v_c(3),omega_c(3),yhat_c(3)";

// One camera-frame record: state features, ground truth and the perceived value.
struct Sample {
    std::array<double, kStateDim> state_c{};
    Eigen::Vector3d truth_c = Eigen::Vector3d::Zero();
    Eigen::Vector3d perceived_c = Eigen::Vector3d::Zero();

    bool all_finite() const;
};

// Network input: motion features of the state followed by the perceived value.
std::vector<double> features(const Sample& s);
std::vector<double> features(std::span<const double, kStateDim> state_c,
                             const Eigen::Vector3d& perceived_c);

// Network-ready record. Loss and training code works on these so that reduced
// networks with arbitrary input width can be exercised directly.
// The ellipsoid center is anchor + center head; for camera samples the anchor
// is the perceived value, so the center head learns the correction to it.
struct Example {
    std::vector<double> input;
    Eigen::Vector3d truth = Eigen::Vector3d::Zero();
    Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
};

Example to_example(const Sample& s);
std::vector<Example> to_examples(std::span<const Sample> samples);

nlohmann::json to_json(const Sample& s);
Sample sample_from_json(const nlohmann::json& j);

// JSON Lines, one sample per line.
void write_jsonl(std::ostream& os, std::span<const Sample> samples);
std::vector<Sample> read_jsonl(std::istream& is);
void write_jsonl_file(const std::string& path, std::span<const Sample> samples);
std::vector<Sample> read_jsonl_file(const std::string& path);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string dataset_hash(std::span<const Sample> samples);

}  // namespace ipc::contract
