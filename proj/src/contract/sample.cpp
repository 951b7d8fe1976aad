#include "ipc/contract/sample.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ipc::contract {

bool Sample::all_finite() const {
    for (double x : state_c)
        if (!std::isfinite(x)) return false;
    return truth_c.allFinite() && perceived_c.allFinite();
}

std::vector<double> features(std::span<const double, kStateDim> state_c,
                             const Eigen::Vector3d& perceived_c) {
    std::vector<double> f(state_c.begin(), state_c.begin() + kMotionDim);
    f.insert(f.end(), {perceived_c.x(), perceived_c.y(), perceived_c.z()});
    return f;
}

std::vector<double> features(const Sample& s) {
    return features(std::span<const double, kStateDim>(s.state_c), s.perceived_c);
}

Example to_example(const Sample& s) { return {features(s), s.truth_c, s.perceived_c}; }

std::vector<Example> to_examples(std::span<const Sample> samples) {
    std::vector<Example> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(to_example(s));
    return out;
}

nlohmann::json to_json(const Sample& s) {
    nlohmann::json j;
    j["x_c"] = s.state_c;
    j["y_c"] = {s.truth_c.x(), s.truth_c.y(), s.truth_c.z()};
    j["yhat_c"] = {s.perceived_c.x(), s.perceived_c.y(), s.perceived_c.z()};
    return j;
}

Sample sample_from_json(const nlohmann::json& j) {
    Sample s;
    const auto& x = j.at("x_c");
    if (x.size() != kStateDim) throw std::invalid_argument("sample: x_c must have 9 entries");
    s.state_c = x.get<std::array<double, kStateDim>>();
    const auto y = j.at("y_c").get<std::array<double, 3>>();
    const auto yh = j.at("yhat_c").get<std::array<double, 3>>();
    s.truth_c = Eigen::Vector3d(y[0], y[1], y[2]);
    s.perceived_c = Eigen::Vector3d(yh[0], yh[1], yh[2]);
    if (!s.all_finite()) throw std::invalid_argument("sample: non-finite value");
    return s;
}

void write_jsonl(std::ostream& os, std::span<const Sample> samples) {
    for (const auto& s : samples) os << to_json(s).dump() << '\n';
}

std::vector<Sample> read_jsonl(std::istream& is) {
    std::vector<Sample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
    return out;
}

void write_jsonl_file(const std::string& path, std::span<const Sample> samples) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_jsonl(os, samples);
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<Sample> read_jsonl_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_jsonl(is);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string dataset_hash(std::span<const Sample> samples) {
    std::ostringstream os;
    write_jsonl(os, samples);
    return fnv1a_hex(os.str());
}

}  // namespace ipc::contract
