#include "ipc/sim/world.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace ipc::sim {
namespace {

nlohmann::json vec_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Eigen::Vector3d vec_from(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument(std::string("sim config: field '") + field +
                                    "' must be a 3-vector");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Eigen::Matrix3d attitude_rotation(const Eigen::Vector3d& phi) {
    return (Eigen::AngleAxisd(phi.z(), Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(phi.y(), Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(phi.x(), Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

CameraRig CameraRig::forward_down() {
    const double a = std::numbers::pi / 6.0;
    CameraRig r;
    r.rotation.col(0) = Eigen::Vector3d(0, -1, 0);
    r.rotation.col(1) = Eigen::Vector3d(-std::sin(a), 0, -std::cos(a));
    r.rotation.col(2) = Eigen::Vector3d(std::cos(a), 0, -std::sin(a));
    r.translation = Eigen::Vector3d(0.05, 0, 0);
    return r;
}

void CameraRig::validate() const {
    if (!rotation.allFinite() || !translation.allFinite()) {
        throw std::invalid_argument("rig: non-finite entries");
    }
    if (!(rotation.transpose() * rotation).isIdentity(1e-9) ||
        std::abs(rotation.determinant() - 1.0) > 1e-9) {
        throw std::invalid_argument("rig: rotation must be orthonormal with det +1");
    }
    if (!(frame_dt > 0.0)) throw std::invalid_argument("rig: frame_dt must be > 0");
}

nlohmann::json to_json(const CameraRig& r) {
    nlohmann::json rot = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rot.push_back({r.rotation(i, 0), r.rotation(i, 1), r.rotation(i, 2)});
    return {{"rotation", rot}, {"translation", vec_json(r.translation)}, {"frame_dt", r.frame_dt}};
}

CameraRig rig_from_json(const nlohmann::json& j) {
    CameraRig r;
    const auto& rot = j.at("rotation");
    if (rot.size() != 3) throw std::invalid_argument("rig: rotation must be 3x3");
    for (int i = 0; i < 3; ++i) r.rotation.row(i) = vec_from(rot.at(i), "rig.rotation").transpose();
    r.translation = vec_from(j.at("translation"), "rig.translation");
    r.frame_dt = j.value("frame_dt", 1.0 / 60.0);
    r.validate();
    return r;
}

std::string frame_fingerprint(const CameraRig& rig) {
    std::string desc = "rig:";
    char buf[32];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g,", x);
        desc += buf;
    };
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) put(rig.rotation(i, k));
    for (int i = 0; i < 3; ++i) put(rig.translation[i]);
    put(rig.frame_dt);
    desc += "|features:";
    desc += contract::kFeatureSet;
    return contract::fnv1a_hex(desc);
}

Eigen::Matrix3d camera_to_world_rotation(const CameraRig& rig, const QuadState& quad) {
    return attitude_rotation(quad.phi) * rig.rotation;
}

Eigen::Vector3d world_to_camera(const CameraRig& rig, const QuadState& quad,
                                const Eigen::Vector3d& point_w) {
    const Eigen::Vector3d in_quad = attitude_rotation(quad.phi).transpose() * (point_w - quad.p);
    return rig.rotation.transpose() * (in_quad - rig.translation);
}

Eigen::Vector3d camera_to_world(const CameraRig& rig, const QuadState& quad,
                                const Eigen::Vector3d& point_c) {
    const Eigen::Vector3d in_quad = rig.rotation * point_c + rig.translation;
    return attitude_rotation(quad.phi) * in_quad + quad.p;
}

void SimConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("sim config: " + field + " " + why);
    };
    if ((workspace.lo.array() >= workspace.hi.array()).any()) bad("workspace", "must have lo < hi");
    if (pad.z() != 0.0) bad("pad", "must lie on the ground plane (z = 0)");
    if (!workspace.contains(pad)) bad("pad", "must lie inside the workspace");
    rig.validate();
    if (buffer_size < 1) bad("buffer_size", "must be >= 1");
    if (!(noise_sigma >= 0.0)) bad("noise_sigma", "must be >= 0");
    if (!(dynamics.k_p > 0.0)) bad("dynamics.k_p", "must be > 0");
    if (!(dynamics.v_max > 0.0)) bad("dynamics.v_max", "must be > 0");
    if (!(dynamics.max_tilt > 0.0 && dynamics.max_tilt < std::numbers::pi / 2)) {
        bad("dynamics.max_tilt", "must be in (0, pi/2)");
    }
    if (!(dynamics.attitude_tau >= 0.0)) bad("dynamics.attitude_tau", "must be >= 0");
}

nlohmann::json to_json(const SimConfig& c) {
    return {{"workspace", geom::to_json(c.workspace)},
            {"pad", vec_json(c.pad)},
            {"rig", to_json(c.rig)},
            {"buffer_size", c.buffer_size},
            {"noise_sigma", c.noise_sigma},
            {"seed", c.seed},
            {"dynamics",
             {{"k_p", c.dynamics.k_p},
              {"v_max", c.dynamics.v_max},
              {"max_tilt", c.dynamics.max_tilt},
              {"attitude_tau", c.dynamics.attitude_tau},
              {"gravity", c.dynamics.gravity}}}};
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    try {
        if (j.contains("workspace")) c.workspace = geom::box_from_json(j.at("workspace"));
        if (j.contains("pad")) c.pad = vec_from(j.at("pad"), "pad");
        if (j.contains("rig")) c.rig = rig_from_json(j.at("rig"));
        if (j.contains("buffer_size")) c.buffer_size = j.at("buffer_size").get<int>();
        if (j.contains("noise_sigma")) c.noise_sigma = j.at("noise_sigma").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("dynamics")) {
            const auto& d = j.at("dynamics");
            c.dynamics.k_p = d.value("k_p", c.dynamics.k_p);
            c.dynamics.v_max = d.value("v_max", c.dynamics.v_max);
            c.dynamics.max_tilt = d.value("max_tilt", c.dynamics.max_tilt);
            c.dynamics.attitude_tau = d.value("attitude_tau", c.dynamics.attitude_tau);
            c.dynamics.gravity = d.value("gravity", c.dynamics.gravity);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sim config: ") + e.what());
    }
    c.validate();
    return c;
}

SimWorld::SimWorld(const SimConfig& cfg, const QuadState& initial)
    : quad(initial),
      pad_world(cfg.pad),
      rig(cfg.rig),
      workspace(cfg.workspace),
      dynamics(cfg.dynamics),
      seed(cfg.seed),
      rng(cfg.seed) {
    cfg.validate();
    if (!workspace.contains(quad.p)) throw std::invalid_argument("sim: initial position outside workspace");
    channel.buffer_size = cfg.buffer_size;
    channel.noise_sigma = cfg.noise_sigma;
    record_pose();
}

void SimWorld::record_pose() {
    channel.history.push_back(quad);
    const auto depth = static_cast<std::size_t>(channel.buffer_size) + 1;
    while (channel.history.size() > depth) channel.history.pop_front();
}

Perception perceive(SimWorld& world) {
    const auto lag = static_cast<std::size_t>(world.channel.buffer_size);
    if (world.channel.history.size() < lag + 1) {
        throw PerceptionWarmup("perceive: need " + std::to_string(lag) +
                               " frames of pose history, have " +
                               std::to_string(world.channel.history.size() - 1));
    }
    const auto& h = world.channel.history;
    Perception out;
    out.stale = h[h.size() - 1 - lag];
    out.perceived_c = world_to_camera(world.rig, out.stale, world.pad_world);
    if (world.channel.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, world.channel.noise_sigma);
        for (int i = 0; i < 3; ++i) out.perceived_c[i] += noise(world.rng);
    }
    return out;
}

Eigen::Vector3d truth_camera(const SimWorld& world) {
    return world_to_camera(world.rig, world.quad, world.pad_world);
}

std::array<double, contract::kStateDim> state_features(const SimWorld& world,
                                                       const Eigen::Vector3d& perceived_c) {
    const Eigen::Matrix3d r_wc = camera_to_world_rotation(world.rig, world.quad);
    const Eigen::Vector3d v_c = r_wc.transpose() * world.quad.v;
    const Eigen::Vector3d w_c = world.rig.rotation.transpose() * world.quad.omega;
    return {v_c.x(), v_c.y(), v_c.z(), w_c.x(), w_c.y(), w_c.z(),
            perceived_c.x(), perceived_c.y(), perceived_c.z()};
}

void step(SimWorld& world, const Eigen::Vector3d& waypoint, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const auto& dyn = world.dynamics;
    Eigen::Vector3d target = waypoint;
    if (!world.workspace.contains(target)) {
        target = world.workspace.clamp(target);
        ++world.clamp_warnings;
    }
    QuadState& q = world.quad;
    Eigen::Vector3d v_new = dyn.k_p * (target - q.p);
    const double speed = v_new.norm();
    if (speed > dyn.v_max) v_new *= dyn.v_max / speed;

    // Small-angle tilt toward the commanded acceleration, expressed in the yaw frame.
    const Eigen::Vector3d accel = (v_new - q.v) / dt;
    const double cy = std::cos(q.phi.z()), sy = std::sin(q.phi.z());
    const double a_fwd = cy * accel.x() + sy * accel.y();
    const double a_left = -sy * accel.x() + cy * accel.y();
    const double pitch_cmd = std::clamp(std::atan2(a_fwd, dyn.gravity), -dyn.max_tilt, dyn.max_tilt);
    const double roll_cmd = std::clamp(std::atan2(-a_left, dyn.gravity), -dyn.max_tilt, dyn.max_tilt);
    const Eigen::Vector3d phi_cmd(roll_cmd, pitch_cmd, q.phi.z());
    const double blend = dt / (dyn.attitude_tau + dt);
    const Eigen::Vector3d phi_new = q.phi + blend * (phi_cmd - q.phi);

    q.omega = (phi_new - q.phi) / dt;
    q.phi = phi_new;
    q.v = v_new;
    q.p += v_new * dt;
    world.clock += dt;
    world.record_pose();
}

void warm_up(SimWorld& world) {
    const Eigen::Vector3d hold = world.quad.p;
    while (world.lag_frames_available() < static_cast<std::size_t>(world.channel.buffer_size)) {
        step(world, hold, world.rig.frame_dt);
    }
}

}  // namespace ipc::sim
