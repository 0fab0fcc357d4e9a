#pragma once

// Single-hidden-layer feedforward network: input -> ReLU(hidden) -> two
// logits, trained full-batch on softmax cross-entropy with moment-based
// per-parameter step scaling. Weight init is seeded uniform in [-s, s],
// s = sqrt(6 / (fan_in + fan_out)).

#include <cstdint>

#include <Eigen/Dense>

#include "logens/core.hpp"
#include "logens/features.hpp"

namespace logens {

struct SlfnModel {
    Eigen::MatrixXd w1;  // hidden x input
    Eigen::VectorXd b1;  // hidden
    Eigen::MatrixXd w2;  // 2 x hidden
    Eigen::VectorXd b2;  // 2
};

struct SlfnGradients {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;
};

struct SlfnTrainConfig {
    int hidden = 100;
    int epochs = 200;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

SlfnModel slfn_init(Eigen::Index input_dim, int hidden, std::uint64_t seed);

// Mean cross-entropy over the batch, plus its analytic gradients.
double slfn_loss(const SlfnModel& m, const FeatureMatrix& x, const Eigen::VectorXi& y);
SlfnGradients slfn_loss_gradients(const SlfnModel& m, const FeatureMatrix& x,
                                  const Eigen::VectorXi& y);

SlfnModel train_slfn(const FeatureMatrix& x, const Eigen::VectorXi& y,
                     const SlfnTrainConfig& cfg = {});

Eigen::Vector2d slfn_logits(const SlfnModel& m, const CountVector& x);
Label predict_slfn(const SlfnModel& m, const CountVector& x);

}  // namespace logens
