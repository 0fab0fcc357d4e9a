#pragma once

// CART-style binary decision tree with Gini impurity. Splits are axis
// aligned at midpoints between consecutive distinct feature values; a node
// becomes a leaf when pure, too small, at max depth, or when no split
// strictly reduces the weighted impurity. Leaf ties resolve to Normal.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "logens/core.hpp"
#include "logens/features.hpp"

namespace logens {

struct TreeNode {
    bool is_leaf = true;
    Label leaf_label = Label::Normal;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;  // x[feature] >  threshold
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::optional<int> max_depth;
    int min_samples_split = 2;
};

TreeModel train_dt(const FeatureMatrix& x, const Eigen::VectorXi& y,
                   std::optional<int> max_depth = std::nullopt,
                   int min_samples_split = 2);
Label predict_dt(const TreeModel& m, const CountVector& x);

// Gini impurity of a 0/1 label multiset given (count of ones, total).
double gini_impurity(std::size_t ones, std::size_t total);

}  // namespace logens
