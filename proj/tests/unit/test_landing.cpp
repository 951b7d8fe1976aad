#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "ipc/landing/state_machine.hpp"
#include "ipc/landing/trace_io.hpp"

using namespace ipc;
using namespace ipc::landing;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

geom::Ellipsoid axis_box(const Vector3d& c, const Vector3d& extents) {
    return geom::Ellipsoid(c, (2.0 * extents.cwiseInverse()).asDiagonal().toDenseMatrix());
}

// Contract returning a ball of the given radius around the measurement.
ContractFn ball_contract(double radius) {
    return [radius](std::span<const double, contract::kStateDim>, const Vector3d& yhat) {
        return geom::Ellipsoid::ball(yhat, radius);
    };
}

sim::SimWorld hover_world(const Vector3d& start, const Vector3d& pad, int buffer, double sigma) {
    sim::SimConfig c;
    c.pad = pad;
    c.buffer_size = buffer;
    c.noise_sigma = sigma;
    sim::QuadState q;
    q.p = start;
    sim::SimWorld w(c, q);
    sim::warm_up(w);
    return w;
}

const geom::Box3 kWorkspace{Vector3d(-3, -3, 0), Vector3d(3, 3, 3)};

}  // namespace

TEST_CASE("trust test examples") {
    const Vector3d limits = LandingConfig{}.trust_limits;
    CHECK(geom::fits_in_box(axis_box(Vector3d::Zero(), Vector3d(0.02, 0.02, 0.02)), limits));
    CHECK_FALSE(geom::fits_in_box(axis_box(Vector3d::Zero(), Vector3d(0.02, 0.02, 0.06)), limits));
    const auto t = trivial_ipc(Vector3d(1, 2, 3));
    const auto box = geom::aabb(t);
    CHECK((box.extent() - Vector3d::Constant(2e-4)).norm() < 1e-15);
    CHECK(geom::fits_in_box(t, limits));
    CHECK(geom::contains(t, Vector3d(1, 2, 3)));
    CHECK(t.center() == Eigen::VectorXd(Vector3d(1, 2, 3)));
    CHECK(t.shape() == Eigen::MatrixXd(10000.0 * Matrix3d::Identity()));
}

TEST_CASE("landing config defaults agree with G") {
    const LandingConfig c;
    CHECK(c.trust_limits == c.g_box.extent());
    CHECK(c.max_measurements == 20);
    CHECK(c.settle_tolerance == 0.03);
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.max_measurements = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    const auto back = landing_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
}

TEST_CASE("next_waypoint examples") {
    const auto unit = geom::Ellipsoid::ball(Vector3d::Zero(), 1.0);
    CHECK((next_waypoint(unit, Vector3d(2, 0, 0), geom::Box3(Vector3d(-3, -3, -3), Vector3d(3, 3, 3))) -
           Vector3d(1, 0, 0)).norm() < 1e-15);
    const auto big = geom::Ellipsoid::ball(Vector3d(0, 0, 1), 2.0);
    const Vector3d p(0.2, 0.1, 1.0);
    REQUIRE(geom::gauge(big, p) <= 1.0);
    CHECK((next_waypoint(big, p, kWorkspace) - (p + Vector3d(0, 0, 0.5))).norm() < 1e-15);
    // clamped to the workspace
    CHECK(next_waypoint(big, Vector3d(0, 0, 2.8), kWorkspace).z() == 3.0);
}

TEST_CASE("next_waypoint is never inside the uncertain set") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        Matrix3d C;
        for (int k = 0; k < 9; ++k) C(k / 3, k % 3) = u(rng);
        C += 2.0 * Matrix3d::Identity();
        if (std::abs(C.determinant()) < 0.1) continue;
        const geom::Ellipsoid e(Vector3d(u(rng), u(rng), 1.5 + u(rng)), C);
        const Vector3d p(2.5 * u(rng), 2.5 * u(rng), 1.5 + 1.4 * u(rng));
        const Vector3d w = next_waypoint(e, p, kWorkspace);
        if (geom::gauge(e, p) > 1.0 && kWorkspace.contains(w)) CHECK(geom::gauge(e, w) >= 1.0 - 1e-9);
        CHECK(kWorkspace.contains(w));
    }
}

TEST_CASE("turnoff_point examples") {
    CHECK((turnoff_point(geom::Ellipsoid::ball(Vector3d(1, 2, 0.01), 0.02)) - Vector3d(1, 2, 0.03)).norm() < 1e-15);
    const auto e = axis_box(Vector3d(0.5, -0.5, 0.2), Vector3d(0.04, 0.08, 0.02));
    CHECK((turnoff_point(e) - Vector3d(0.5, -0.5, 0.21)).norm() < 1e-15);
}

TEST_CASE("turnoff point lies in the offset box for every trusted ellipsoid") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const LandingConfig cfg;
    int trials = 0;
    while (trials < 10000) {
        Matrix3d C;
        for (int k = 0; k < 9; ++k) C(k / 3, k % 3) = 60.0 * u(rng);
        C += 70.0 * Matrix3d::Identity();
        if (std::abs(C.determinant()) < 1e-3) continue;
        const geom::Ellipsoid e(Vector3d(u(rng), u(rng), 0.1 * u(rng)), C);
        if (!geom::fits_in_box(e, cfg.trust_limits)) continue;
        ++trials;
        std::normal_distribution<double> n;
        const Vector3d d = Vector3d(n(rng), n(rng), n(rng)).normalized();
        const double r = std::cbrt(std::uniform_real_distribution<double>(0, 1)(rng));
        const Vector3d y = e.center() + C.inverse() * (r * d);
        REQUIRE(geom::contains(e, y));
        CHECK(geom::box_offset_contains(y, cfg.g_box, turnoff_point(e)));
    }
}

TEST_CASE("hovering above the pad without noise: one measurement, trust, success") {
    auto w = hover_world(Vector3d(-0.8, 0.0, 1.0), Vector3d::Zero(), 1, 0.0);
    const auto t = run_landing(ball_contract(0.01), w, LandingConfig{});
    CHECK(t.success);
    CHECK(t.measurement_count == 1);
    REQUIRE(t.shutdown_point);
    CHECK(transitions_legal(t));
    CHECK(t.events.front().state == MachineState::Measuring);
    CHECK(t.events.back().state == MachineState::Done);
}

TEST_CASE("a contract that never shrinks aborts after max_measurements") {
    auto w = hover_world(Vector3d(-0.8, 0.0, 1.0), Vector3d::Zero(), 1, 0.0);
    LandingConfig cfg;
    cfg.max_measurements = 5;
    const auto t = run_landing(ball_contract(0.3), w, cfg);
    CHECK_FALSE(t.success);
    CHECK(t.measurement_count == 5);
    CHECK_FALSE(t.shutdown_point);
    CHECK_FALSE(t.abort_reason.empty());
    CHECK(t.events.back().state == MachineState::Aborted);
    CHECK(transitions_legal(t));
}

TEST_CASE("degenerate contract output is a retry") {
    auto w = hover_world(Vector3d(-0.8, 0.0, 1.0), Vector3d::Zero(), 1, 0.0);
    ContractFn degenerate = [](std::span<const double, contract::kStateDim>,
                               const Vector3d& y) -> geom::Ellipsoid {
        throw geom::DegenerateEllipsoid("singular at " + std::to_string(y.x()));
    };
    LandingConfig cfg;
    const auto d = measure_and_decide(degenerate, w, cfg);
    CHECK_FALSE(d.trust);
    CHECK(d.degenerate);
    CHECK(geom::aabb(d.ellipsoid).extent().x() == doctest::Approx(2.0 * cfg.degenerate_radius));
}

TEST_CASE("trace invariants over random scenarios") {
    LandingConfig cfg;
    for (const bool fast : {false, true}) {
        for (std::uint64_t seed = 1; seed <= 12; ++seed) {
            ScenarioConfig sc;
            sc.buffer_size = 1 + static_cast<int>(seed % 5);
            sc.fast_approach = fast;
            for (const auto& ipc : {trivial_contract(), ball_contract(0.02), ball_contract(0.2)}) {
                auto w = make_scenario(sim::SimConfig{}, sc, seed);
                const auto t = run_landing(ipc, w, cfg);
                CHECK(transitions_legal(t));
                CHECK(t.measurement_count <= cfg.max_measurements);
                if (t.success) CHECK(t.shutdown_point.has_value());

                const TraceEvent* last = nullptr;
                bool landed = false;
                for (const auto& e : t.events) {
                    if (e.state == MachineState::Measuring) last = &e;
                    landed = landed || e.state == MachineState::Landing;
                }
                REQUIRE(last);
                REQUIRE(last->ellipsoid);
                CHECK(landed == geom::fits_in_box(*last->ellipsoid, cfg.trust_limits));
                if (landed && t.final_contains_truth) CHECK(t.success);
                if (landed && t.shutdown_point) {
                    CHECK(geom::box_offset_contains(t.pad, cfg.g_box, *t.shutdown_point) == t.success);
                }
            }
            // The trivial contract always trusts its first measurement.
            auto w = make_scenario(sim::SimConfig{}, sc, seed);
            const auto t = run_landing(trivial_contract(), w, cfg);
            CHECK(t.measurement_count == 1);
            CHECK(t.events[1].state == MachineState::Landing);
        }
    }
}

TEST_CASE("scenarios are deterministic and keep the pad in range") {
    ScenarioConfig sc;
    for (std::uint64_t seed = 1; seed < 30; ++seed) {
        const auto a = make_scenario(sim::SimConfig{}, sc, seed);
        const auto b = make_scenario(sim::SimConfig{}, sc, seed);
        CHECK(a.pad_world == b.pad_world);
        CHECK(a.quad.p == b.quad.p);
        CHECK(std::abs(a.pad_world.x()) <= sc.pad_half_range);
        CHECK(std::abs(a.pad_world.y()) <= sc.pad_half_range);
        CHECK(a.pad_world.z() == 0.0);
        CHECK(a.workspace.contains(a.quad.p));
    }
}

TEST_CASE("transition legality rejects illegal sequences") {
    LandingTrace t;
    t.events.push_back({0, MachineState::Measuring, Vector3d::Zero(), {}, {}, {}, false});
    t.events.push_back({0, MachineState::Done, Vector3d::Zero(), {}, {}, {}, false});
    CHECK_FALSE(transitions_legal(t));
    t.events.back().state = MachineState::Landing;
    t.events.push_back({0, MachineState::Done, Vector3d::Zero(), {}, {}, {}, false});
    CHECK(transitions_legal(t));
    t.events.push_back({0, MachineState::Measuring, Vector3d::Zero(), {}, {}, {}, false});
    CHECK_FALSE(transitions_legal(t));
}

TEST_CASE("trace export formats") {
    auto w = hover_world(Vector3d(-0.8, 0.0, 1.0), Vector3d::Zero(), 1, 0.0);
    const auto t = run_landing(ball_contract(0.01), w, LandingConfig{});
    std::ostringstream meas, traj, plot;
    write_measurements_csv(meas, t);
    write_trajectory_csv(traj, t);
    CHECK(meas.str().rfind("index,t,x,y,z,xmin,xmax,ymin,ymax,zmin,zmax,trusted,degenerate\n", 0) == 0);
    CHECK(traj.str().rfind("t,px,py,pz,vx,vy,vz,wx,wy,wz,yhat_wx,yhat_wy,yhat_wz\n", 0) == 0);

    const std::vector<PlotRun> runs{{0, false, &t}, {1, true, &t}};
    write_plot_csv(plot, runs);
    const std::string s = plot.str();
    CHECK(s.rfind("run,marker,x,y,z,dx,dy,dz,size,success\n", 0) == 0);
    CHECK(s.find("0,star,") != std::string::npos);
    CHECK(s.find("1,cross,") != std::string::npos);
    CHECK(s.find("0,circle,") != std::string::npos);
    CHECK(s.find("1,circle,") == std::string::npos);

    const auto j = to_json(t);
    CHECK(j.at("success") == true);
    CHECK(j.at("events").at(0).at("state") == "Measuring");
    CHECK(num(0.1) == "0.10000000000000001");
}
