#include "ipc/geometry/ellipsoid.hpp"

#include <cmath>

namespace ipc::geom {
namespace {

void require_dim(const Ellipsoid& e, Eigen::Index n, const char* op) {
    if (n != e.dim()) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (ellipsoid " +
                                    std::to_string(e.dim()) + ", point " + std::to_string(n) +
                                    ")");
    }
}

}  // namespace

Ellipsoid::Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
    if (shape_.rows() != shape_.cols() || shape_.rows() != center_.size()) {
        throw std::invalid_argument("ellipsoid: shape must be n x n with n = dim(center)");
    }
    if (!center_.allFinite() || !shape_.allFinite()) {
        throw std::invalid_argument("ellipsoid: non-finite entries");
    }
    const double det = shape_.determinant();
    if (!(std::abs(det) > kDetFloor)) {
        throw DegenerateEllipsoid("ellipsoid: |det(C)| = " + std::to_string(std::abs(det)) +
                                  " is below the singularity floor");
    }
}

Ellipsoid Ellipsoid::ball(const Eigen::VectorXd& center, double radius) {
    const auto n = center.size();
    return Ellipsoid(center, Eigen::MatrixXd::Identity(n, n) / radius);
}

Box3::Box3(const Eigen::Vector3d& lo_, const Eigen::Vector3d& hi_) : lo(lo_), hi(hi_) {
    if ((lo.array() > hi.array()).any()) throw std::invalid_argument("box: lo > hi");
}

bool Box3::contains(const Eigen::Vector3d& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

Eigen::Vector3d Box3::clamp(const Eigen::Vector3d& p) const {
    return p.cwiseMax(lo).cwiseMin(hi);
}

double gauge(const Ellipsoid& e, const Eigen::VectorXd& x) {
    require_dim(e, x.size(), "gauge");
    if (e.dim() == 3) {
        return gauge3(Eigen::Matrix3d(e.shape()), Eigen::Vector3d(e.center()), Eigen::Vector3d(x));
    }
    return (e.shape() * (x - e.center())).norm();
}

bool contains(const Ellipsoid& e, const Eigen::VectorXd& x) {
    require_dim(e, x.size(), "contains");
    return gauge(e, x) <= 1.0;
}

Box3 aabb(const Ellipsoid& e) {
    if (e.dim() != 3) throw std::invalid_argument("aabb: ellipsoid must be 3-dimensional");
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(e.shape());
    if (!lu.isInvertible()) throw DegenerateEllipsoid("aabb: singular shape matrix");
    const Eigen::MatrixXd inv = lu.inverse();
    Eigen::Vector3d half;
    for (int i = 0; i < 3; ++i) half[i] = inv.row(i).norm();
    const Eigen::Vector3d c = e.center();
    Box3 box;
    box.lo = c - half;
    box.hi = c + half;
    return box;
}

bool fits_in_box(const Ellipsoid& e, const Eigen::Vector3d& limits) {
    const Eigen::Vector3d ext = aabb(e).extent();
    return ext.x() <= limits.x() && ext.y() <= limits.y() && ext.z() <= limits.z();
}

Eigen::VectorXd surface_waypoint(const Ellipsoid& e, const Eigen::VectorXd& p) {
    const double g = gauge(e, p);
    if (!(g > 1.0)) throw std::domain_error("surface_waypoint: point is not outside the ellipsoid");
    // gauge is linear along the ray from the center: gauge(c + s(p - c)) = s g.
    const double t = 1.0 - 1.0 / g;
    return p + t * (e.center() - p);
}

bool box_offset_contains(const Eigen::Vector3d& y, const Box3& g, const Eigen::Vector3d& point) {
    return g.contains(point - y);
}

LogDetResult neg_log_det_sq(const Eigen::MatrixXd& C) {
    double adet = std::abs(C.determinant());
    bool clamped = false;
    if (!(adet > kDetFloor)) {
        adet = kDetFloor;
        clamped = true;
    }
    return {-2.0 * std::log(adet), clamped};
}

nlohmann::json to_json(const Ellipsoid& e) {
    nlohmann::json center = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.dim(); ++i) center.push_back(e.center()[i]);
    nlohmann::json shape = nlohmann::json::array();
    for (Eigen::Index r = 0; r < e.dim(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < e.dim(); ++c) row.push_back(e.shape()(r, c));
        shape.push_back(std::move(row));
    }
    return {{"center", std::move(center)}, {"shape", std::move(shape)}};
}

Ellipsoid ellipsoid_from_json(const nlohmann::json& j) {
    const auto& jc = j.at("center");
    const auto& js = j.at("shape");
    const auto n = static_cast<Eigen::Index>(jc.size());
    if (static_cast<Eigen::Index>(js.size()) != n) {
        throw std::invalid_argument("ellipsoid json: shape rows != dim(center)");
    }
    Eigen::VectorXd c(n);
    Eigen::MatrixXd C(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        c[i] = jc.at(i).get<double>();
        if (static_cast<Eigen::Index>(js.at(i).size()) != n) {
            throw std::invalid_argument("ellipsoid json: ragged shape matrix");
        }
        for (Eigen::Index k = 0; k < n; ++k) C(i, k) = js.at(i).at(k).get<double>();
    }
    return Ellipsoid(std::move(c), std::move(C));
}

nlohmann::json to_json(const Box3& b) {
    return {{"lo", {b.lo.x(), b.lo.y(), b.lo.z()}}, {"hi", {b.hi.x(), b.hi.y(), b.hi.z()}}};
}

Box3 box_from_json(const nlohmann::json& j) {
    const auto lo = j.at("lo").get<std::array<double, 3>>();
    const auto hi = j.at("hi").get<std::array<double, 3>>();
    return Box3(Eigen::Vector3d(lo[0], lo[1], lo[2]), Eigen::Vector3d(hi[0], hi[1], hi[2]));
}

}  // namespace ipc::geom
