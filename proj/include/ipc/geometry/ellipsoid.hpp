#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <stdexcept>
#include <string>

namespace ipc::geom {

// |det(C)| at or below this is treated as singular.
inline constexpr double kDetFloor = 1e-9;

class DegenerateEllipsoid : public std::runtime_error {
public:
    explicit DegenerateEllipsoid(const std::string& what) : std::runtime_error(what) {}
};

// E(c, C) = { x : ||C (x - c)||_2 <= 1 }.
class Ellipsoid {
public:
    // Throws DegenerateEllipsoid if |det(shape)| <= kDetFloor, std::invalid_argument
    // on non-square shape or dimension mismatch.
    Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape);

    static Ellipsoid ball(const Eigen::VectorXd& center, double radius);

    const Eigen::VectorXd& center() const noexcept { return center_; }
    const Eigen::MatrixXd& shape() const noexcept { return shape_; }
    Eigen::Index dim() const noexcept { return center_.size(); }

private:
    Eigen::VectorXd center_;
    Eigen::MatrixXd shape_;
};

struct Box3 {
    Eigen::Vector3d lo = Eigen::Vector3d::Zero();
    Eigen::Vector3d hi = Eigen::Vector3d::Zero();

    Box3() = default;
    Box3(const Eigen::Vector3d& lo_, const Eigen::Vector3d& hi_);

    Eigen::Vector3d extent() const { return hi - lo; }
    bool contains(const Eigen::Vector3d& p) const;
    Eigen::Vector3d clamp(const Eigen::Vector3d& p) const;
};

// ||C (x - c)||_2.
double gauge(const Ellipsoid& e, const Eigen::VectorXd& x);

// The 3-D gauge on raw parts. gauge() on a 3-D ellipsoid evaluates exactly
// this expression, so callers holding network heads get bit-identical values.
inline double gauge3(const Eigen::Matrix3d& shape, const Eigen::Vector3d& center,
                     const Eigen::Vector3d& x) {
    return (shape * (x - center)).norm();
}

// Boundary counts as inside.
bool contains(const Ellipsoid& e, const Eigen::VectorXd& x);

// Tightest axis-aligned box around a 3-D ellipsoid. Half-extent along axis i is
// the norm of row i of C^{-1}.
Box3 aabb(const Ellipsoid& e);

// Per-axis width check against limits, the landing trust test.
bool fits_in_box(const Ellipsoid& e, const Eigen::Vector3d& limits);

// Point where the segment from p (outside) to the center crosses the surface.
// Throws std::domain_error if p is inside or on the ellipsoid.
Eigen::VectorXd surface_waypoint(const Ellipsoid& e, const Eigen::VectorXd& p);

// point - y in g, componentwise. Membership of point in {y} (+) g.
bool box_offset_contains(const Eigen::Vector3d& y, const Box3& g, const Eigen::Vector3d& point);

struct LogDetResult {
    double value;   // -log det(C^T C)
    bool clamped;   // |det C| was floored at kDetFloor
};

// -log det(C^T C) = -2 log|det C|, with |det C| floored at kDetFloor.
LogDetResult neg_log_det_sq(const Eigen::MatrixXd& C);

nlohmann::json to_json(const Ellipsoid& e);
Ellipsoid ellipsoid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Box3& b);
Box3 box_from_json(const nlohmann::json& j);

}  // namespace ipc::geom
