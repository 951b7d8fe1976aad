#include "ipc/landing/trace_io.hpp"

#include <algorithm>
#include <cstdio>

namespace ipc::landing {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

nlohmann::json vec(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

void row(std::ostream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

}  // namespace

nlohmann::json to_json(const LandingTrace& t) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : t.events) {
        nlohmann::json j{{"t", e.t}, {"state", state_name(e.state)}, {"position", vec(e.position)}};
        if (e.ellipsoid) {
            j["ellipsoid"] = geom::to_json(*e.ellipsoid);
            j["aabb"] = geom::to_json(geom::aabb(*e.ellipsoid));
        }
        if (e.waypoint) j["waypoint"] = vec(*e.waypoint);
        if (e.trusted) j["trusted"] = *e.trusted;
        if (e.degenerate) j["degenerate"] = true;
        events.push_back(std::move(j));
    }
    nlohmann::json out{{"pad", vec(t.pad)},
                       {"success", t.success},
                       {"measurement_count", t.measurement_count},
                       {"final_contains_truth", t.final_contains_truth},
                       {"shutdown_point", t.shutdown_point ? vec(*t.shutdown_point) : nlohmann::json()},
                       {"events", std::move(events)}};
    if (!t.abort_reason.empty()) out["abort_reason"] = t.abort_reason;
    return out;
}

void write_measurements_csv(std::ostream& os, const LandingTrace& t) {
    os << "index,t,x,y,z,xmin,xmax,ymin,ymax,zmin,zmax,trusted,degenerate\n";
    int index = 0;
    for (const auto& e : t.events) {
        if (e.state != MachineState::Measuring || !e.ellipsoid) continue;
        const auto box = geom::aabb(*e.ellipsoid);
        row(os, {std::to_string(index++), num(e.t), num(e.position.x()), num(e.position.y()),
                 num(e.position.z()), num(box.lo.x()), num(box.hi.x()), num(box.lo.y()),
                 num(box.hi.y()), num(box.lo.z()), num(box.hi.z()),
                 e.trusted.value_or(false) ? "1" : "0", e.degenerate ? "1" : "0"});
    }
}

void write_trajectory_csv(std::ostream& os, const LandingTrace& t) {
    os << "t,px,py,pz,vx,vy,vz,wx,wy,wz,yhat_wx,yhat_wy,yhat_wz\n";
    for (const auto& p : t.trajectory) {
        std::string yx, yy, yz;
        if (p.perceived_w) {
            yx = num(p.perceived_w->x());
            yy = num(p.perceived_w->y());
            yz = num(p.perceived_w->z());
        }
        row(os, {num(p.t), num(p.p.x()), num(p.p.y()), num(p.p.z()), num(p.v.x()), num(p.v.y()),
                 num(p.v.z()), num(p.waypoint.x()), num(p.waypoint.y()), num(p.waypoint.z()), yx,
                 yy, yz});
    }
}

void write_plot_csv(std::ostream& os, std::span<const PlotRun> runs) {
    os << "run,marker,x,y,z,dx,dy,dz,size,success\n";
    for (const auto& r : runs) {
        if (!r.trace) continue;
        const auto& t = *r.trace;
        const std::string run = std::to_string(r.run);
        const std::string ok = t.success ? "1" : "0";
        auto emit = [&](const char* marker, const Eigen::Vector3d& p, double size) {
            const Eigen::Vector3d d = p - t.pad;
            row(os, {run, marker, num(p.x()), num(p.y()), num(p.z()), num(d.x()), num(d.y()),
                     num(d.z()), num(size), ok});
        };
        emit("pad", t.pad, 0.0);
        if (!r.baseline) {
            for (const auto& e : t.events) {
                if (e.state != MachineState::Measuring || !e.ellipsoid) continue;
                const Eigen::Vector3d half = geom::aabb(*e.ellipsoid).extent() / 2.0;
                emit("circle", e.position, half.maxCoeff());
            }
        }
        if (t.shutdown_point) emit(r.baseline ? "cross" : "star", *t.shutdown_point, 0.0);
    }
}

}  // namespace ipc::landing
