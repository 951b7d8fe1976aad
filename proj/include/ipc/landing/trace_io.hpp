#pragma once
// Landing trace export: full JSON, per-measurement CSV, per-frame trajectory
// CSV, and a multi-run plot table (stars, crosses, circles as data rows).

#include <json.hpp>
#include <ostream>
#include <span>
#include <string>

#include "ipc/landing/state_machine.hpp"

namespace ipc::landing {

nlohmann::json to_json(const LandingTrace& t);

// index, t, x, y, z, xmin, xmax, ymin, ymax, zmin, zmax, trusted, degenerate
void write_measurements_csv(std::ostream& os, const LandingTrace& t);

// t, px, py, pz, vx, vy, vz, wx, wy, wz, yhat_wx, yhat_wy, yhat_wz
// (the yhat columns are empty on frames without a measurement)
void write_trajectory_csv(std::ostream& os, const LandingTrace& t);

struct PlotRun {
    int run = 0;
    bool baseline = false;
    const LandingTrace* trace = nullptr;
};

// run, marker, x, y, z, dx, dy, dz, size, success
// marker: "pad", "star" (learned shutdown), "cross" (baseline shutdown) or
// "circle" (a learned-contract measurement; size = largest bounding-box
// half-extent). d* columns are offsets from the run's pad.
void write_plot_csv(std::ostream& os, std::span<const PlotRun> runs);

// 17 significant digits; the rendering used by every CSV writer here.
std::string num(double x);

}  // namespace ipc::landing
