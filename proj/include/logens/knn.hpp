#pragma once

// k-nearest-neighbour base model over count vectors. Lazy learner: training
// stores the points, prediction votes among the k closest by Euclidean
// distance. Distance ties break toward the lower point index; an even vote
// split resolves to Normal.

#include <Eigen/Dense>

#include "logens/core.hpp"
#include "logens/features.hpp"

namespace logens {

struct KnnModel {
    int k = 1;
    FeatureMatrix points;    // rows = stored vectors
    Eigen::VectorXi labels;  // 0/1 per row
};

KnnModel train_knn(const FeatureMatrix& x, const Eigen::VectorXi& y, int k);
Label predict_knn(const KnnModel& m, const CountVector& x);

}  // namespace logens
