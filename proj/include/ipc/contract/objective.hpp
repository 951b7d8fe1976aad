#pragma once

// Training objective for the ellipsoid-valued contract:
//
//   g(X)   = || C(x, yhat) (y - c(x, yhat)) ||_2          (g <= 1  <=>  y inside)
//   c      = yhat + center head,  C = shape head
//   L_erm  = mean_i hinge(g_i - 1),  hinge(x) = max(0, x / alpha + 1)
//   L_reg  = mean_i -log det(C_i^T C_i)
//   L      = L_erm + lambda * L_reg

#include <cstddef>
#include <span>

#include "ipc/contract/sample.hpp"
#include "ipc/geometry/ellipsoid.hpp"
#include "ipc/nn/mlp.hpp"

namespace ipc::contract {

double g_value(const nn::MlpParams& params, const Sample& s);
double g_value(const nn::MlpParams& params, const Example& ex);
double g_value(const nn::MlpParams& params, std::span<const double> input,
               const Eigen::Vector3d& truth,
               const Eigen::Vector3d& anchor = Eigen::Vector3d::Zero());

// Throws std::invalid_argument if alpha <= 0.
double hinge(double x, double alpha);
// Derivative of hinge; 0 at the kink.
double hinge_slope(double x, double alpha);
double truncated_hinge(double x, double alpha);

struct RegLoss {
    double value = 0.0;
    std::size_t clamped = 0;  // samples whose |det C| hit the floor
};

// All of these throw std::invalid_argument on an empty batch.
double erm_loss(const nn::MlpParams& params, std::span<const Sample> batch, double alpha);
RegLoss reg_loss(const nn::MlpParams& params, std::span<const Sample> batch);
double total_loss(const nn::MlpParams& params, std::span<const Sample> batch, double alpha,
                  double lambda);

struct ObjectiveValue {
    double erm = 0.0;
    double reg = 0.0;
    double total = 0.0;
    std::size_t clamped = 0;
    std::size_t misses = 0;  // g > 1
};

// Batch objective over network-ready examples. If grads is non-null it is
// overwritten with the gradient of `total` with respect to the parameters.
ObjectiveValue objective(const nn::MlpParams& params, std::span<const Example> batch,
                         double alpha, double lambda, nn::MlpParams* grads = nullptr);

// Fraction of samples with g > 1.
double evaluate_error(const nn::MlpParams& params, std::span<const Sample> dataset);

// Mean truncated hinge of g - 1, the empirical term of the generalization bound.
double empirical_truncated_loss(const nn::MlpParams& params, std::span<const Sample> dataset,
                                double alpha);

// Contract output for one query. Throws geom::DegenerateEllipsoid on a
// near-singular shape head.
geom::Ellipsoid query(const nn::MlpParams& params, std::span<const double, kStateDim> state_c,
                      const Eigen::Vector3d& perceived_c);

// Parameter gradient of g at one example, and its Euclidean norm.
double g_gradient_norm(const nn::MlpParams& params, const Example& ex);

}  // namespace ipc::contract
