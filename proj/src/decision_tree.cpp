#include "logens/decision_tree.hpp"

#include <algorithm>
#include <limits>

namespace logens {

double gini_impurity(std::size_t ones, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(ones) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = std::numeric_limits<double>::infinity();
};

Label majority_label(std::size_t ones, std::size_t total) {
    return 2 * ones > total ? Label::Anomalous : Label::Normal;
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& x, const Eigen::VectorXi& y, TreeModel& model)
        : x_(x), y_(y), model_(model) {}

    int build(std::vector<Eigen::Index> idx, int depth) {
        const std::size_t total = idx.size();
        std::size_t ones = 0;
        for (Eigen::Index i : idx) ones += static_cast<std::size_t>(y_[i]);

        const int node = static_cast<int>(model_.nodes.size());
        model_.nodes.emplace_back();

        const bool pure = ones == 0 || ones == total;
        const bool too_small = total < static_cast<std::size_t>(model_.min_samples_split);
        const bool at_depth = model_.max_depth && depth >= *model_.max_depth;
        if (pure || too_small || at_depth) {
            leaf(node, ones, total);
            return node;
        }

        const double parent = gini_impurity(ones, total);
        const SplitChoice split = best_split(idx, ones, parent);
        if (split.feature < 0) {
            leaf(node, ones, total);
            return node;
        }

        std::vector<Eigen::Index> left, right;
        for (Eigen::Index i : idx)
            (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        model_.nodes[static_cast<std::size_t>(node)].is_leaf = false;
        model_.nodes[static_cast<std::size_t>(node)].feature = split.feature;
        model_.nodes[static_cast<std::size_t>(node)].threshold = split.threshold;
        const int l = build(std::move(left), depth + 1);
        model_.nodes[static_cast<std::size_t>(node)].left = l;
        const int r = build(std::move(right), depth + 1);
        model_.nodes[static_cast<std::size_t>(node)].right = r;
        return node;
    }

private:
    void leaf(int node, std::size_t ones, std::size_t total) {
        model_.nodes[static_cast<std::size_t>(node)].is_leaf = true;
        model_.nodes[static_cast<std::size_t>(node)].leaf_label = majority_label(ones, total);
    }

    SplitChoice best_split(const std::vector<Eigen::Index>& idx, std::size_t ones,
                           double parent_gini) const {
        const std::size_t total = idx.size();
        SplitChoice best;
        std::vector<std::pair<double, int>> vals(total);  // (feature value, label)
        for (int f = 0; f < x_.cols(); ++f) {
            for (std::size_t i = 0; i < total; ++i)
                vals[i] = {x_(idx[i], f), y_[idx[i]]};
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            std::size_t left_n = 0, left_ones = 0;
            for (std::size_t i = 0; i + 1 < total; ++i) {
                ++left_n;
                left_ones += static_cast<std::size_t>(vals[i].second);
                if (vals[i].first == vals[i + 1].first) continue;
                const std::size_t right_n = total - left_n;
                const double w =
                    (static_cast<double>(left_n) * gini_impurity(left_ones, left_n) +
                     static_cast<double>(right_n) * gini_impurity(ones - left_ones, right_n)) /
                    static_cast<double>(total);
                if (w < best.weighted_gini) {
                    best.weighted_gini = w;
                    best.feature = f;
                    best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        // Demand a strict impurity reduction; otherwise the caller leaves.
        if (best.feature >= 0 && best.weighted_gini >= parent_gini - 1e-12) best.feature = -1;
        return best;
    }

    const FeatureMatrix& x_;
    const Eigen::VectorXi& y_;
    TreeModel& model_;
};

}  // namespace

TreeModel train_dt(const FeatureMatrix& x, const Eigen::VectorXi& y,
                   std::optional<int> max_depth, int min_samples_split) {
    if (x.rows() == 0) throw input_error("decision tree requires at least one sample");
    if (x.rows() != y.size()) throw input_error("decision tree feature/label count mismatch");
    if (min_samples_split < 2) throw config_error("min_samples_split must be >= 2");

    TreeModel model;
    model.max_depth = max_depth;
    model.min_samples_split = min_samples_split;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    TreeBuilder(x, y, model).build(std::move(idx), 0);
    return model;
}

Label predict_dt(const TreeModel& m, const CountVector& x) {
    if (m.nodes.empty()) throw input_error("empty decision tree");
    int node = 0;
    while (!m.nodes[static_cast<std::size_t>(node)].is_leaf) {
        const TreeNode& n = m.nodes[static_cast<std::size_t>(node)];
        if (n.feature >= x.size())
            throw input_error("decision tree feature index exceeds query dimension");
        node = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return m.nodes[static_cast<std::size_t>(node)].leaf_label;
}

}  // namespace logens
