#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ipc/contract/sample.hpp"
#include "ipc/sim/dataset.hpp"
#include "ipc/sim/world.hpp"

using namespace ipc;
using namespace ipc::sim;
using Eigen::Vector3d;

namespace {

QuadState random_pose(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuadState q;
    q.p = Vector3d(3 * u(rng), 3 * u(rng), 1.5 + 1.5 * u(rng));
    q.phi = Vector3d(0.5 * u(rng), 0.5 * u(rng), 3.1 * u(rng));
    return q;
}

CameraRig identity_rig() {
    CameraRig r;
    r.rotation.setIdentity();
    r.translation.setZero();
    return r;
}

SimConfig quiet_config(int buffer) {
    SimConfig c;
    c.buffer_size = buffer;
    c.noise_sigma = 0.0;
    return c;
}

}  // namespace

TEST_CASE("frame transform examples") {
    const auto rig = identity_rig();
    QuadState q;
    const Vector3d w(0.3, -1.2, 0.7);
    CHECK(world_to_camera(rig, q, w) == w);
    q.p = Vector3d(1, 2, 3);
    CHECK((world_to_camera(rig, q, w) - (w - q.p)).norm() < 1e-15);
}

TEST_CASE("frame transform round trip") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        CameraRig rig;
        rig.rotation = attitude_rotation(Vector3d(u(rng), u(rng), u(rng)));
        rig.translation = Vector3d(0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng));
        const auto q = random_pose(rng);
        const Vector3d w(u(rng), u(rng), u(rng));
        worst = std::max(worst, (camera_to_world(rig, q, world_to_camera(rig, q, w)) - w).norm());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("camera rig defaults and validation") {
    const auto rig = CameraRig::forward_down();
    CHECK((rig.rotation.transpose() * rig.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(rig.frame_dt == doctest::Approx(1.0 / 60.0));
    CHECK_NOTHROW(rig.validate());
    auto bad = rig;
    bad.rotation(0, 0) = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = rig;
    bad.frame_dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(frame_fingerprint(rig) == frame_fingerprint(CameraRig::forward_down()));
    CHECK(frame_fingerprint(rig) != frame_fingerprint(identity_rig()));
}

TEST_CASE("perception is exact while hovering without noise") {
    for (int b = 1; b <= 5; ++b) {
        QuadState q;
        q.p = Vector3d(-1, 0, 1.2);
        SimWorld w(quiet_config(b), q);
        warm_up(w);
        for (int i = 0; i < b + 2; ++i) step(w, q.p, w.rig.frame_dt);
        const auto per = perceive(w);
        CHECK((per.perceived_c - truth_camera(w)).norm() < 1e-12);
    }
}

TEST_CASE("perception needs a warm history") {
    QuadState q;
    q.p = Vector3d(0, 0, 1);
    SimWorld w(quiet_config(4), q);
    CHECK_THROWS_AS(perceive(w), PerceptionWarmup);
    warm_up(w);
    CHECK_NOTHROW(perceive(w));
}

TEST_CASE("lag error is speed times lag") {
    // Moving at 1 m/s with level attitude: the stale camera pose trails by
    // buffer_size frames, so the error is buffer_size * dt along the motion.
    std::vector<double> errs;
    for (int b = 1; b <= 5; ++b) {
        QuadState q;
        q.p = Vector3d(0, 0, 1);
        SimWorld w(quiet_config(b), q);
        w.rig = identity_rig();
        warm_up(w);
        for (int i = 0; i < 10; ++i) {
            w.quad.p += Vector3d(1, 0, 0) * w.rig.frame_dt;
            w.quad.v = Vector3d(1, 0, 0);
            w.clock += w.rig.frame_dt;
            w.record_pose();
        }
        const Vector3d e = perceive(w).perceived_c - truth_camera(w);
        CHECK(e.norm() == doctest::Approx(b / 60.0).epsilon(1e-9));
        CHECK(std::abs(e.x()) == doctest::Approx(e.norm()).epsilon(1e-9));
        errs.push_back(e.norm());
    }
    CHECK(errs[2] == doctest::Approx(0.05).epsilon(1e-9));
    for (int b = 1; b < 5; ++b) CHECK(errs[b] - errs[b - 1] == doctest::Approx(1.0 / 60.0).epsilon(1e-6));
}

TEST_CASE("step: fixed point, convergence, speed limit") {
    QuadState q;
    q.p = Vector3d(0.5, -0.5, 1.0);
    SimWorld w(quiet_config(1), q);
    const double dt = w.rig.frame_dt;
    step(w, q.p, dt);
    CHECK(w.quad.p == q.p);
    CHECK(w.quad.v.norm() == 0.0);
    CHECK(w.clock == doctest::Approx(dt));

    const Vector3d target(-2.0, 2.0, 2.5);
    double prev = (w.quad.p - target).norm();
    bool monotone = true;
    double vmax = 0.0;
    for (int i = 0; i < 600; ++i) {
        step(w, target, dt);
        const double d = (w.quad.p - target).norm();
        monotone = monotone && d <= prev;
        prev = d;
        vmax = std::max(vmax, w.quad.v.norm());
        CHECK(std::abs(w.quad.phi.x()) < M_PI / 2);
        CHECK(std::abs(w.quad.phi.y()) < M_PI / 2);
    }
    CHECK(monotone);
    CHECK(prev < 1e-3);
    CHECK(vmax <= 1.5 + 1e-12);
    CHECK(w.clamp_warnings == 0);

    step(w, Vector3d(10, 0, 1), dt);
    CHECK(w.clamp_warnings == 1);
    CHECK(w.workspace.contains(w.quad.p));
}

TEST_CASE("dataset: size, determinism, diversity and lag bound") {
    DatasetConfig cfg;
    CHECK(cfg.n == 5000);
    cfg.n = 2000;
    const auto a = generate_dataset(cfg);
    const auto b = generate_dataset(cfg);
    REQUIRE(a.size() == 2000);
    std::ostringstream sa, sb;
    contract::write_jsonl(sa, a);
    contract::write_jsonl(sb, b);
    CHECK(sa.str() == sb.str());

    auto other = cfg;
    other.sim.seed = 2;
    CHECK(contract::dataset_hash(generate_dataset(other)) != contract::dataset_hash(a));

    double lo = 1e9, hi = 0.0;
    for (const auto& s : a) {
        const double speed = Vector3d(s.state_c[0], s.state_c[1], s.state_c[2]).norm();
        lo = std::min(lo, speed);
        hi = std::max(hi, speed);
        CHECK(s.all_finite());
        for (int i = 0; i < 3; ++i) CHECK(s.state_c[contract::kMotionDim + i] == s.perceived_c[i]);
    }
    CHECK(lo <= 0.05);
    CHECK(hi >= 1.2);

}

namespace {

// Samples whose perception error exceeds v_max * lag + 5 sigma.
std::size_t lag_bound_violations(DatasetConfig c, int buffer) {
    c.sim.buffer_size = buffer;
    const double limit =
        c.sim.dynamics.v_max * buffer * c.sim.rig.frame_dt + 5 * c.sim.noise_sigma;
    std::size_t over = 0;
    for (const auto& s : generate_dataset(c)) over += (s.perceived_c - s.truth_c).norm() > limit;
    return over;
}

}  // namespace

TEST_CASE("perception error is within the translational lag bound when the camera does not rotate") {
    DatasetConfig cfg;
    cfg.n = 3000;
    cfg.sim.dynamics.max_tilt = 1e-9;
    for (int buf = 1; buf <= 5; ++buf) CHECK(lag_bound_violations(cfg, buf) == 0);
}

// With the default tilt model the stale image also comes from a rotated
// camera, and at ranges of a few metres that rotation adds to the
// translational lag. Kept visible: this reports the violation count at the
// default dynamics without failing the suite.
TEST_CASE("perception error is within the translational lag bound at default dynamics" *
          doctest::may_fail()) {
    DatasetConfig cfg;
    cfg.n = 5000;
    for (int buf = 1; buf <= 5; ++buf) {
        CAPTURE(buf);
        CHECK(lag_bound_violations(cfg, buf) == 0);
    }
}

TEST_CASE("config validation and json") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.buffer_size = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.noise_sigma = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.pad.z() = 0.3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    DatasetConfig d;
    d.sim.buffer_size = 3;
    d.path.stride = 5;
    d.n = 17;
    const auto back = dataset_config_from_json(to_json(d));
    CHECK(to_json(back) == to_json(d));
    CHECK_THROWS_AS(dataset_config_from_json(nlohmann::json{{"buffer_size", "x"}}), std::invalid_argument);
}
