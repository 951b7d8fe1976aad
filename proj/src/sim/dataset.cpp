#include "ipc/sim/dataset.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ipc::sim {

void PathConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("path config: " + field + " " + why);
    };
    if (!center.allFinite() || !amplitude.allFinite() || !frequency.allFinite()) {
        bad("center/amplitude/frequency", "must be finite");
    }
    if (!(warp_period > 0.0)) bad("warp_period", "must be > 0");
    if (stride < 1) bad("stride", "must be >= 1");
    if (pad_count < 1) bad("pad_count", "must be >= 1");
}

void DatasetConfig::validate() const {
    sim.validate();
    path.validate();
    if (n < 1) throw std::invalid_argument("dataset config: n must be >= 1");
}

nlohmann::json to_json(const DatasetConfig& c) {
    auto j = to_json(c.sim);
    const auto v = [](const Eigen::Vector3d& x) { return nlohmann::json{x.x(), x.y(), x.z()}; };
    j["path"] = {{"center", v(c.path.center)},
                 {"amplitude", v(c.path.amplitude)},
                 {"frequency", v(c.path.frequency)},
                 {"warp_period", c.path.warp_period},
                 {"stride", c.path.stride},
                 {"pad_count", c.path.pad_count}};
    j["n"] = c.n;
    return j;
}

DatasetConfig dataset_config_from_json(const nlohmann::json& j) {
    DatasetConfig c;
    c.sim = sim_config_from_json(j);
    try {
        if (j.contains("path")) {
            const auto& p = j.at("path");
            auto vec = [&](const char* key, Eigen::Vector3d& dst) {
                if (!p.contains(key)) return;
                const auto a = p.at(key).get<std::array<double, 3>>();
                dst = Eigen::Vector3d(a[0], a[1], a[2]);
            };
            vec("center", c.path.center);
            vec("amplitude", c.path.amplitude);
            vec("frequency", c.path.frequency);
            c.path.warp_period = p.value("warp_period", c.path.warp_period);
            c.path.stride = p.value("stride", c.path.stride);
            c.path.pad_count = p.value("pad_count", c.path.pad_count);
        }
        if (j.contains("n")) {
            const auto n = j.at("n").get<long long>();
            if (n < 1) throw std::invalid_argument("dataset config: n must be >= 1");
            c.n = static_cast<std::size_t>(n);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("dataset config: ") + e.what());
    }
    c.validate();
    return c;
}

Eigen::Vector3d path_reference(const PathConfig& path, double t, const Eigen::Vector3d& phase) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double s = t - path.warp_period / two_pi * std::sin(two_pi * t / path.warp_period);
    Eigen::Vector3d r;
    for (int i = 0; i < 3; ++i) {
        r[i] = path.center[i] + path.amplitude[i] * std::sin(path.frequency[i] * s + phase[i]);
    }
    return r;
}

std::vector<contract::Sample> generate_dataset(const DatasetConfig& cfg) {
    cfg.validate();
    std::mt19937_64 plan_rng(cfg.sim.seed * 0x9E3779B97F4A7C15ull + 17);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const Eigen::Vector3d phase(angle(plan_rng), angle(plan_rng), angle(plan_rng));

    const geom::Box3& ws = cfg.sim.workspace;
    QuadState start;
    start.p = ws.clamp(path_reference(cfg.path, 0.0, phase));
    SimWorld world(cfg.sim, start);
    warm_up(world);

    const std::size_t per_pad =
        (cfg.n + static_cast<std::size_t>(cfg.path.pad_count) - 1) /
        static_cast<std::size_t>(cfg.path.pad_count);
    std::uniform_real_distribution<double> pad_x(0.6 * ws.lo.x(), 0.6 * ws.hi.x());
    std::uniform_real_distribution<double> pad_y(0.6 * ws.lo.y(), 0.6 * ws.hi.y());

    std::vector<contract::Sample> out;
    out.reserve(cfg.n);
    double t = 0.0;
    const double dt = world.rig.frame_dt;
    while (out.size() < cfg.n) {
        if (cfg.path.pad_count > 1 && out.size() % per_pad == 0 && !out.empty()) {
            world.pad_world = Eigen::Vector3d(pad_x(plan_rng), pad_y(plan_rng), 0.0);
        }
        for (int k = 0; k < cfg.path.stride; ++k) {
            t += dt;
            step(world, path_reference(cfg.path, t, phase), dt);
        }
        const auto seen = perceive(world);
        contract::Sample s;
        s.state_c = state_features(world, seen.perceived_c);
        s.truth_c = truth_camera(world);
        s.perceived_c = seen.perceived_c;
        out.push_back(s);
    }
    return out;
}

}  // namespace ipc::sim
