#include "ipc/landing/state_machine.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ipc/contract/objective.hpp"

namespace ipc::landing {

const char* state_name(MachineState s) {
    switch (s) {
        case MachineState::Measuring: return "Measuring";
        case MachineState::NewWaypoint: return "NewWaypoint";
        case MachineState::Landing: return "Landing";
        case MachineState::Done: return "Done";
        case MachineState::Aborted: return "Aborted";
    }
    return "?";
}

void LandingConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("landing config: " + field + " " + why);
    };
    if (((g_box.extent() - trust_limits).array().abs() > 1e-12).any()) {
        bad("trust_limits", "must equal the extents of g_box");
    }
    if (max_measurements < 1) bad("max_measurements", "must be >= 1");
    if (!(settle_tolerance > 0.0)) bad("settle_tolerance", "must be > 0");
    if (!(fallback_ascent > 0.0)) bad("fallback_ascent", "must be > 0");
    if (!(degenerate_radius > 0.0)) bad("degenerate_radius", "must be > 0");
    if (!(leg_timeout > 0.0)) bad("leg_timeout", "must be > 0");
}

nlohmann::json to_json(const LandingConfig& c) {
    return {{"g_box", geom::to_json(c.g_box)},
            {"trust_limits", {c.trust_limits.x(), c.trust_limits.y(), c.trust_limits.z()}},
            {"max_measurements", c.max_measurements},
            {"settle_tolerance", c.settle_tolerance},
            {"fallback_ascent", c.fallback_ascent},
            {"degenerate_radius", c.degenerate_radius},
            {"leg_timeout", c.leg_timeout}};
}

LandingConfig landing_config_from_json(const nlohmann::json& j) {
    LandingConfig c;
    try {
        if (j.contains("g_box")) c.g_box = geom::box_from_json(j.at("g_box"));
        if (j.contains("trust_limits")) {
            const auto t = j.at("trust_limits").get<std::array<double, 3>>();
            c.trust_limits = Eigen::Vector3d(t[0], t[1], t[2]);
        }
        if (j.contains("max_measurements")) j.at("max_measurements").get_to(c.max_measurements);
        if (j.contains("settle_tolerance")) j.at("settle_tolerance").get_to(c.settle_tolerance);
        if (j.contains("fallback_ascent")) j.at("fallback_ascent").get_to(c.fallback_ascent);
        if (j.contains("degenerate_radius")) j.at("degenerate_radius").get_to(c.degenerate_radius);
        if (j.contains("leg_timeout")) j.at("leg_timeout").get_to(c.leg_timeout);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("landing config: ") + e.what());
    }
    c.validate();
    return c;
}

geom::Ellipsoid trivial_ipc(const Eigen::Vector3d& perceived) {
    return geom::Ellipsoid(perceived, 10000.0 * Eigen::Matrix3d::Identity());
}

ContractFn trivial_contract() {
    return [](std::span<const double, contract::kStateDim>, const Eigen::Vector3d& perceived) {
        return trivial_ipc(perceived);
    };
}

ContractFn learned_contract(nn::MlpParams params) {
    return [p = std::move(params)](std::span<const double, contract::kStateDim> state_c,
                                   const Eigen::Vector3d& perceived) {
        return contract::query(p, state_c, perceived);
    };
}

geom::Ellipsoid ellipsoid_to_world(const geom::Ellipsoid& e_c, const sim::CameraRig& rig,
                                   const sim::QuadState& quad) {
    const Eigen::Matrix3d r_wc = sim::camera_to_world_rotation(rig, quad);
    const Eigen::Vector3d center = sim::camera_to_world(rig, quad, e_c.center());
    return geom::Ellipsoid(center, e_c.shape() * r_wc.transpose());
}

Decision measure_and_decide(const ContractFn& ipc, sim::SimWorld& world,
                            const LandingConfig& cfg) {
    const auto seen = sim::perceive(world);
    const auto state = sim::state_features(world, seen.perceived_c);
    Decision d;
    d.perceived_w = sim::camera_to_world(world.rig, world.quad, seen.perceived_c);
    try {
        d.ellipsoid = ellipsoid_to_world(ipc(state, seen.perceived_c), world.rig, world.quad);
        d.trust = geom::fits_in_box(d.ellipsoid, cfg.trust_limits);
    } catch (const geom::DegenerateEllipsoid&) {
        d.degenerate = true;
        d.ellipsoid = geom::Ellipsoid::ball(d.perceived_w, cfg.degenerate_radius);
        d.trust = false;
    }
    return d;
}

Eigen::Vector3d next_waypoint(const geom::Ellipsoid& e_w, const Eigen::Vector3d& quad_position,
                              const geom::Box3& workspace, double ascent) {
    Eigen::Vector3d wp;
    if (geom::gauge(e_w, quad_position) > 1.0) {
        wp = geom::surface_waypoint(e_w, quad_position);
    } else {
        wp = quad_position + Eigen::Vector3d(0.0, 0.0, ascent);
    }
    return workspace.clamp(wp);
}

Eigen::Vector3d turnoff_point(const geom::Ellipsoid& e_w) {
    const geom::Box3 box = geom::aabb(e_w);
    return {(box.lo.x() + box.hi.x()) / 2.0, (box.lo.y() + box.hi.y()) / 2.0, box.hi.z()};
}

namespace {

class Runner {
public:
    Runner(sim::SimWorld& world, const LandingConfig& cfg, LandingTrace& trace)
        : world_(world), cfg_(cfg), trace_(trace) {
        sample(world_.quad.p);
    }

    void event(MachineState s, std::optional<geom::Ellipsoid> e = std::nullopt,
               std::optional<Eigen::Vector3d> wp = std::nullopt,
               std::optional<bool> trusted = std::nullopt, bool degenerate = false) {
        trace_.events.push_back({world_.clock, s, world_.quad.p, std::move(e), wp, trusted,
                                 degenerate});
    }

    // Steps toward target until within settle tolerance. False on timeout.
    bool fly(const Eigen::Vector3d& target) {
        const Eigen::Vector3d goal = world_.workspace.clamp(target);
        const double dt = world_.rig.frame_dt;
        const auto max_steps = static_cast<long>(std::ceil(cfg_.leg_timeout / dt));
        for (long i = 0; i < max_steps; ++i) {
            if ((world_.quad.p - goal).norm() <= cfg_.settle_tolerance) return true;
            sim::step(world_, goal, dt);
            sample(goal);
        }
        return (world_.quad.p - goal).norm() <= cfg_.settle_tolerance;
    }

    void mark_perception(const Eigen::Vector3d& perceived_w) {
        trace_.trajectory.back().perceived_w = perceived_w;
    }

private:
    void sample(const Eigen::Vector3d& waypoint) {
        trace_.trajectory.push_back({world_.clock, world_.quad.p, world_.quad.v, waypoint, {}});
    }

    sim::SimWorld& world_;
    const LandingConfig& cfg_;
    LandingTrace& trace_;
};

}  // namespace

LandingTrace run_landing(const ContractFn& ipc, sim::SimWorld& world, const LandingConfig& cfg) {
    cfg.validate();
    LandingTrace trace;
    trace.pad = world.pad_world;
    Runner run(world, cfg, trace);

    for (;;) {
        const Decision d = measure_and_decide(ipc, world, cfg);
        ++trace.measurement_count;
        run.mark_perception(d.perceived_w);
        trace.final_contains_truth = geom::contains(d.ellipsoid, world.pad_world);
        run.event(MachineState::Measuring, d.ellipsoid, std::nullopt, d.trust, d.degenerate);

        if (d.trust) {
            const Eigen::Vector3d target = turnoff_point(d.ellipsoid);
            run.event(MachineState::Landing, std::nullopt, target);
            if (!run.fly(target)) {
                trace.abort_reason = "did not reach the turnoff point within the leg timeout";
                run.event(MachineState::Aborted);
                return trace;
            }
            trace.shutdown_point = target;
            trace.success = geom::box_offset_contains(world.pad_world, cfg.g_box, target);
            run.event(MachineState::Done, std::nullopt, target);
            return trace;
        }

        if (trace.measurement_count >= cfg.max_measurements) {
            trace.abort_reason = "no trusted measurement after " +
                                 std::to_string(trace.measurement_count) + " measurements";
            run.event(MachineState::Aborted);
            return trace;
        }
        const Eigen::Vector3d wp =
            next_waypoint(d.ellipsoid, world.quad.p, world.workspace, cfg.fallback_ascent);
        run.event(MachineState::NewWaypoint, std::nullopt, wp);
        if (!run.fly(wp)) {
            trace.abort_reason = "did not settle at a waypoint within the leg timeout";
            run.event(MachineState::Aborted);
            return trace;
        }
    }
}

bool transitions_legal(const LandingTrace& trace) {
    using S = MachineState;
    const auto& ev = trace.events;
    if (ev.empty() || ev.front().state != S::Measuring) return false;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        const S a = ev[i - 1].state, b = ev[i].state;
        const bool ok = (a == S::Measuring && (b == S::NewWaypoint || b == S::Landing)) ||
                        (a == S::NewWaypoint && b == S::Measuring) ||
                        (a == S::Landing && b == S::Done) ||
                        (b == S::Aborted && a != S::Done && a != S::Aborted);
        if (!ok) return false;
    }
    const S last = ev.back().state;
    return last == S::Done || last == S::Aborted;
}

nlohmann::json to_json(const ScenarioConfig& c) {
    return {{"buffer_size", c.buffer_size},
            {"fast_approach", c.fast_approach},
            {"pad_half_range", c.pad_half_range}};
}

sim::SimWorld make_scenario(const sim::SimConfig& base, const ScenarioConfig& sc,
                            std::uint64_t seed) {
    if (sc.buffer_size < 1) throw std::invalid_argument("scenario: buffer_size must be >= 1");
    if (!(sc.pad_half_range >= 0.0)) throw std::invalid_argument("scenario: pad_half_range must be >= 0");

    std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ull + 0x1A4D);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    sim::SimConfig cfg = base;
    cfg.seed = seed;
    cfg.buffer_size = sc.buffer_size;
    cfg.pad = Eigen::Vector3d(uniform(-sc.pad_half_range, sc.pad_half_range),
                              uniform(-sc.pad_half_range, sc.pad_half_range), 0.0);

    // The quad approaches with the pad ahead of it, so the forward-looking
    // camera has it in view. Hover starts sit 1.0-1.6 m back; fast approaches
    // start 2.8 m back and cruise for 0.8 s before the first measurement.
    const double back = sc.fast_approach ? 2.8 : uniform(1.0, 1.6);
    const double height = uniform(0.7, 1.3);
    const double lateral = sc.fast_approach ? 0.0 : uniform(-0.3, 0.3);
    geom::Box3 inner(cfg.workspace.lo + Eigen::Vector3d::Constant(0.1),
                     cfg.workspace.hi - Eigen::Vector3d::Constant(0.1));
    double yaw = 0.0;
    Eigen::Vector3d start;
    for (int attempt = 0;; ++attempt) {
        yaw = uniform(-std::numbers::pi, std::numbers::pi);
        const Eigen::Vector3d fwd(std::cos(yaw), std::sin(yaw), 0.0);
        const Eigen::Vector3d left(-std::sin(yaw), std::cos(yaw), 0.0);
        start = cfg.pad - back * fwd + lateral * left + Eigen::Vector3d(0.0, 0.0, height);
        if (inner.contains(start)) break;
        if (attempt > 1000) throw std::runtime_error("scenario: no start position fits the workspace");
    }

    sim::QuadState q;
    q.p = start;
    q.phi.z() = yaw;
    sim::SimWorld world(cfg, q);
    sim::warm_up(world);
    if (sc.fast_approach) {
        const Eigen::Vector3d aim = cfg.pad + Eigen::Vector3d(0.0, 0.0, height);
        const int cruise_frames = static_cast<int>(std::lround(0.8 / world.rig.frame_dt));
        for (int i = 0; i < cruise_frames; ++i) sim::step(world, aim, world.rig.frame_dt);
    }
    return world;
}

}  // namespace ipc::landing
