#include "ipc/contract/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace ipc::contract {
namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("hinge: alpha must be > 0");
}

template <typename T>
void require_nonempty(std::span<const T> batch, const char* op) {
    if (batch.empty()) throw std::invalid_argument(std::string(op) + ": empty batch");
}

struct GaugeParts {
    Eigen::Vector3d residual;  // y - c
    Eigen::Vector3d image;     // C (y - c)
    double g;
};

GaugeParts gauge_parts(const nn::IpcOutputHeads& h, const Eigen::Vector3d& truth,
                       const Eigen::Vector3d& anchor) {
    GaugeParts p;
    p.residual = truth - (anchor + h.center);
    p.image = h.shape_raw * p.residual;
    p.g = p.image.norm();
    return p;
}

// dg/dc and dg/dC. Zero at g = 0, where g is not differentiable.
void gauge_gradients(const nn::IpcOutputHeads& h, const GaugeParts& p, Eigen::Vector3d& d_center,
                     Eigen::Matrix3d& d_shape) {
    if (p.g > 0.0) {
        const Eigen::Vector3d unit = p.image / p.g;
        d_shape = unit * p.residual.transpose();
        d_center = -(h.shape_raw.transpose() * unit);
    } else {
        d_shape.setZero();
        d_center.setZero();
    }
}

}  // namespace

double g_value(const nn::MlpParams& params, std::span<const double> input,
               const Eigen::Vector3d& truth, const Eigen::Vector3d& anchor) {
    const auto h = nn::forward(params, input);
    return geom::gauge3(h.shape_raw, anchor + h.center, truth);
}

double g_value(const nn::MlpParams& params, const Example& ex) {
    return g_value(params, ex.input, ex.truth, ex.anchor);
}

double g_value(const nn::MlpParams& params, const Sample& s) {
    return g_value(params, features(s), s.truth_c, s.perceived_c);
}

double hinge(double x, double alpha) {
    require_alpha(alpha);
    return std::max(0.0, x / alpha + 1.0);
}

double hinge_slope(double x, double alpha) {
    require_alpha(alpha);
    return x / alpha + 1.0 > 0.0 ? 1.0 / alpha : 0.0;
}

double truncated_hinge(double x, double alpha) { return std::min(1.0, hinge(x, alpha)); }

double erm_loss(const nn::MlpParams& params, std::span<const Sample> batch, double alpha) {
    require_nonempty(batch, "erm_loss");
    require_alpha(alpha);
    double sum = 0.0;
    for (const auto& s : batch) sum += hinge(g_value(params, s) - 1.0, alpha);
    return sum / static_cast<double>(batch.size());
}

RegLoss reg_loss(const nn::MlpParams& params, std::span<const Sample> batch) {
    require_nonempty(batch, "reg_loss");
    RegLoss r;
    double sum = 0.0;
    for (const auto& s : batch) {
        const auto h = nn::forward(params, features(s));
        const auto ld = geom::neg_log_det_sq(h.shape_raw);
        sum += ld.value;
        r.clamped += ld.clamped ? 1 : 0;
    }
    r.value = sum / static_cast<double>(batch.size());
    return r;
}

double total_loss(const nn::MlpParams& params, std::span<const Sample> batch, double alpha,
                  double lambda) {
    return erm_loss(params, batch, alpha) + lambda * reg_loss(params, batch).value;
}

ObjectiveValue objective(const nn::MlpParams& params, std::span<const Example> batch,
                         double alpha, double lambda, nn::MlpParams* grads) {
    require_nonempty(batch, "objective");
    require_alpha(alpha);
    if (grads) {
        if (!grads->same_shape(params)) *grads = params.zeros_like();
        grads->set_zero();
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    ObjectiveValue out;
    double erm_sum = 0.0;
    double reg_sum = 0.0;
    nn::ForwardCache cache;
    for (const auto& ex : batch) {
        const auto h = nn::forward(params, ex.input, cache);
        const auto parts = gauge_parts(h, ex.truth, ex.anchor);
        erm_sum += hinge(parts.g - 1.0, alpha);
        if (parts.g > 1.0) ++out.misses;

        const auto logdet = geom::neg_log_det_sq(h.shape_raw);
        const bool clamped = logdet.clamped;
        reg_sum += logdet.value;
        if (clamped) ++out.clamped;

        if (!grads) continue;
        Eigen::Vector3d d_center;
        Eigen::Matrix3d d_shape;
        gauge_gradients(h, parts, d_center, d_shape);
        const double slope = hinge_slope(parts.g - 1.0, alpha);
        d_center *= slope * inv_n;
        d_shape *= slope * inv_n;
        // d/dC [-log det(C^T C)] = -2 C^{-T}; flat once clamped.
        if (!clamped && lambda != 0.0) {
            d_shape += (-2.0 * lambda * inv_n) * h.shape_raw.inverse().transpose();
        }
        nn::backward_accumulate(params, cache, d_center, d_shape, *grads);
    }
    out.erm = erm_sum * inv_n;
    out.reg = reg_sum * inv_n;
    out.total = out.erm + lambda * out.reg;
    return out;
}

double evaluate_error(const nn::MlpParams& params, std::span<const Sample> dataset) {
    if (dataset.empty()) throw std::invalid_argument("evaluate_error: empty dataset");
    std::size_t misses = 0;
    for (const auto& s : dataset) misses += g_value(params, s) > 1.0 ? 1 : 0;
    return static_cast<double>(misses) / static_cast<double>(dataset.size());
}

double empirical_truncated_loss(const nn::MlpParams& params, std::span<const Sample> dataset,
                                double alpha) {
    if (dataset.empty()) throw std::invalid_argument("empirical_truncated_loss: empty dataset");
    double sum = 0.0;
    for (const auto& s : dataset) sum += truncated_hinge(g_value(params, s) - 1.0, alpha);
    return sum / static_cast<double>(dataset.size());
}

geom::Ellipsoid query(const nn::MlpParams& params, std::span<const double, kStateDim> state_c,
                      const Eigen::Vector3d& perceived_c) {
    const auto h = nn::forward(params, features(state_c, perceived_c));
    return geom::Ellipsoid(perceived_c + h.center, h.shape_raw);
}

double g_gradient_norm(const nn::MlpParams& params, const Example& ex) {
    nn::ForwardCache cache;
    const auto h = nn::forward(params, ex.input, cache);
    const auto parts = gauge_parts(h, ex.truth, ex.anchor);
    Eigen::Vector3d d_center;
    Eigen::Matrix3d d_shape;
    gauge_gradients(h, parts, d_center, d_shape);
    nn::MlpParams grads = params.zeros_like();
    nn::backward_accumulate(params, cache, d_center, d_shape, grads);
    double sq = 0.0;
    for (double v : grads.flatten()) sq += v * v;
    return std::sqrt(sq);
}

}  // namespace ipc::contract
