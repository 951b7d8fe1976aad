#pragma once

// Kinematic quadcopter, camera rig and a lagged perception channel.
//
// Frames: world W is z-up; quadcopter Q is x-forward, y-left, z-up with
// attitude phi = (roll, pitch, yaw) in Z-Y-X order; camera C has z along the
// optical axis, x right and y down.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <deque>
#include <json.hpp>
#include <random>
#include <string>

#include "ipc/contract/sample.hpp"
#include "ipc/geometry/ellipsoid.hpp"

namespace ipc::sim {

struct QuadState {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();      // position (m)
    Eigen::Vector3d v = Eigen::Vector3d::Zero();      // velocity (m/s)
    Eigen::Vector3d phi = Eigen::Vector3d::Zero();    // roll, pitch, yaw (rad)
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();  // angular rate (rad/s)
};

// R_WQ = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d attitude_rotation(const Eigen::Vector3d& phi);

struct CameraRig {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // camera axes in the quad frame
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();   // camera origin in the quad frame (m)
    double frame_dt = 1.0 / 60.0;

    // Camera looking forward, pitched 30 degrees down, 5 cm ahead of the body origin.
    static CameraRig forward_down();
    void validate() const;
};

nlohmann::json to_json(const CameraRig& r);
CameraRig rig_from_json(const nlohmann::json& j);

// Hash of the rig geometry and the feature layout. A contract learned under one
// fingerprint is not valid for data from another.
std::string frame_fingerprint(const CameraRig& rig);

Eigen::Matrix3d camera_to_world_rotation(const CameraRig& rig, const QuadState& quad);
Eigen::Vector3d world_to_camera(const CameraRig& rig, const QuadState& quad,
                                const Eigen::Vector3d& point_w);
Eigen::Vector3d camera_to_world(const CameraRig& rig, const QuadState& quad,
                                const Eigen::Vector3d& point_c);

struct Dynamics {
    double k_p = 1.0;           // 1/s
    double v_max = 1.5;         // m/s
    double max_tilt = 0.3;      // rad
    double attitude_tau = 0.2;  // s
    double gravity = 9.81;      // m/s^2
};

struct PerceptionChannel {
    int buffer_size = 1;        // frames of lag
    double noise_sigma = 0.002; // m, isotropic in the camera frame
    std::deque<QuadState> history;  // oldest first; back() is the current pose
};

struct SimConfig {
    geom::Box3 workspace{Eigen::Vector3d(-3, -3, 0), Eigen::Vector3d(3, 3, 3)};
    Eigen::Vector3d pad = Eigen::Vector3d::Zero();
    CameraRig rig = CameraRig::forward_down();
    int buffer_size = 1;
    double noise_sigma = 0.002;
    std::uint64_t seed = 1;
    Dynamics dynamics;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

nlohmann::json to_json(const SimConfig& c);
// Reads the sim fields of j; other keys are ignored. Missing fields keep defaults.
SimConfig sim_config_from_json(const nlohmann::json& j);

class SimWorld {
public:
    SimWorld(const SimConfig& cfg, const QuadState& initial);

    QuadState quad;
    Eigen::Vector3d pad_world;
    CameraRig rig;
    PerceptionChannel channel;
    geom::Box3 workspace;
    Dynamics dynamics;
    double clock = 0.0;
    std::uint64_t seed;
    std::mt19937_64 rng;
    std::size_t clamp_warnings = 0;

    // Frames of history available beyond the current pose.
    std::size_t lag_frames_available() const { return channel.history.size() - 1; }
    void record_pose();
};

class PerceptionWarmup : public std::runtime_error {
public:
    explicit PerceptionWarmup(const std::string& what) : std::runtime_error(what) {}
};

struct Perception {
    Eigen::Vector3d perceived_c;  // pad seen through the lagged, noisy channel
    QuadState stale;              // pose the image was taken from
};

// Pad in the current camera frame computed from the pose buffer_size frames ago,
// plus noise. Throws PerceptionWarmup if the history is too short.
Perception perceive(SimWorld& world);

// Ground-truth pad position in the current camera frame.
Eigen::Vector3d truth_camera(const SimWorld& world);

// [v_C, omega_C, yhat_C].
std::array<double, contract::kStateDim> state_features(const SimWorld& world,
                                                       const Eigen::Vector3d& perceived_c);

// First-order waypoint tracking for one step of length dt. Waypoints outside
// the workspace are clamped and counted in clamp_warnings.
void step(SimWorld& world, const Eigen::Vector3d& waypoint, double dt);

// Hold the current position until the history covers the perception lag.
void warm_up(SimWorld& world);

}  // namespace ipc::sim
