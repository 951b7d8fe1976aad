#pragma once
// Safe-landing state machine driven by an inverse perception contract.
//
//   Measuring --trust--> Landing --> Done
//       |  ^
//     retry |
//       v  |
//   NewWaypoint
//
// A measurement is trusted when the world-frame ellipsoid fits inside G. The
// quad then flies to the top-center of the ellipsoid's bounding box and shuts
// off. Otherwise it flies to where the segment from its position to the
// ellipsoid center crosses the surface and measures again.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipc/contract/sample.hpp"
#include "ipc/geometry/ellipsoid.hpp"
#include "ipc/nn/mlp.hpp"
#include "ipc/sim/world.hpp"

namespace ipc::landing {

enum class MachineState { Measuring, NewWaypoint, Landing, Done, Aborted };

const char* state_name(MachineState s);

struct LandingConfig {
    geom::Box3 g_box{Eigen::Vector3d(-0.05, -0.05, 0.0), Eigen::Vector3d(0.05, 0.05, 0.05)};
    Eigen::Vector3d trust_limits{0.1, 0.1, 0.05};
    int max_measurements = 20;
    double settle_tolerance = 0.03;   // m
    double fallback_ascent = 0.5;     // m, used when the quad is inside the ellipsoid
    double degenerate_radius = 1.0;   // m, stand-in ball for a singular contract output
    double leg_timeout = 60.0;        // s of sim time allowed per flight leg

    // Throws std::invalid_argument naming the field.
    void validate() const;
};

nlohmann::json to_json(const LandingConfig& c);
LandingConfig landing_config_from_json(const nlohmann::json& j);

// Camera-frame contract: (x_C, yhat_C) -> ellipsoid in the camera frame.
using ContractFn = std::function<geom::Ellipsoid(std::span<const double, contract::kStateDim>,
                                                 const Eigen::Vector3d&)>;

// E(yhat, 10000 I): always tiny, always trusted.
geom::Ellipsoid trivial_ipc(const Eigen::Vector3d& perceived);

ContractFn trivial_contract();
// The network is copied into the returned function.
ContractFn learned_contract(nn::MlpParams params);

// Camera-frame ellipsoid to world frame for the quad's current pose.
geom::Ellipsoid ellipsoid_to_world(const geom::Ellipsoid& e_c, const sim::CameraRig& rig,
                                   const sim::QuadState& quad);

struct Decision {
    bool trust = false;
    bool degenerate = false;        // contract output was singular; ellipsoid is the stand-in ball
    geom::Ellipsoid ellipsoid = geom::Ellipsoid::ball(Eigen::Vector3d::Zero(), 1.0);  // world frame
    Eigen::Vector3d perceived_w;    // yhat mapped to the world with the current pose
};

// One Measuring step: perceive, query, convert, test against trust_limits.
// Throws sim::PerceptionWarmup if the pose history is too short.
Decision measure_and_decide(const ContractFn& ipc, sim::SimWorld& world,
                            const LandingConfig& cfg);

// Next measurement position. Outside the ellipsoid: the surface crossing
// toward the center. Inside or on it: straight up by `ascent`. Clamped to the
// workspace.
Eigen::Vector3d next_waypoint(const geom::Ellipsoid& e_w, const Eigen::Vector3d& quad_position,
                              const geom::Box3& workspace, double ascent = 0.5);

// [(xmin+xmax)/2, (ymin+ymax)/2, zmax] of the ellipsoid's bounding box.
Eigen::Vector3d turnoff_point(const geom::Ellipsoid& e_w);

struct TraceEvent {
    double t = 0.0;
    MachineState state = MachineState::Measuring;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    std::optional<geom::Ellipsoid> ellipsoid;  // Measuring events
    std::optional<Eigen::Vector3d> waypoint;   // NewWaypoint / Landing events
    std::optional<bool> trusted;               // Measuring events
    bool degenerate = false;
};

struct TrajectoryPoint {
    double t;
    Eigen::Vector3d p;
    Eigen::Vector3d v;
    Eigen::Vector3d waypoint;
    std::optional<Eigen::Vector3d> perceived_w;  // set on frames where a measurement was taken
};

struct LandingTrace {
    std::vector<TraceEvent> events;
    std::vector<TrajectoryPoint> trajectory;
    Eigen::Vector3d pad = Eigen::Vector3d::Zero();
    std::optional<Eigen::Vector3d> shutdown_point;
    bool success = false;
    int measurement_count = 0;
    bool final_contains_truth = false;  // last measured ellipsoid contained the pad
    std::string abort_reason;
};

// Runs the machine to Done or Aborted. The world must be warmed up.
LandingTrace run_landing(const ContractFn& ipc, sim::SimWorld& world, const LandingConfig& cfg);

// Every consecutive pair of events is an allowed edge.
bool transitions_legal(const LandingTrace& trace);

// --- experiment scenarios ---------------------------------------------------

struct ScenarioConfig {
    int buffer_size = 1;
    // Start far back and cruise at full speed toward the pad; the first
    // measurement is taken mid-flight instead of from a hover.
    bool fast_approach = false;
    double pad_half_range = 1.5;  // pad x, y uniform in [-r, r]
};

nlohmann::json to_json(const ScenarioConfig& c);

// World for one run. Pad position, approach heading and start point derive
// from `seed`; the returned world is warmed up and, for fast approaches,
// already moving.
sim::SimWorld make_scenario(const sim::SimConfig& base, const ScenarioConfig& sc,
                            std::uint64_t seed);

}  // namespace ipc::landing
