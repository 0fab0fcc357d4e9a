#include "logens/knn.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace logens {

KnnModel train_knn(const FeatureMatrix& x, const Eigen::VectorXi& y, int k) {
    if (k < 1) throw config_error("knn requires k >= 1");
    if (x.rows() != y.size()) throw input_error("knn feature/label count mismatch");
    if (x.rows() < k)
        throw config_error("knn requires at least k training points (k=" + std::to_string(k) +
                           ", points=" + std::to_string(x.rows()) + ")");
    return KnnModel{k, x, y};
}

Label predict_knn(const KnnModel& m, const CountVector& x) {
    if (x.size() != m.points.cols())
        throw input_error("knn query dimension " + std::to_string(x.size()) +
                          " != model dimension " + std::to_string(m.points.cols()));

    const Eigen::VectorXd d2 =
        (m.points.rowwise() - x.transpose()).rowwise().squaredNorm();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m.points.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (d2[a] != d2[b]) return d2[a] < d2[b];
        return a < b;
    });

    int anomalous = 0;
    for (int i = 0; i < m.k; ++i) anomalous += m.labels[order[static_cast<std::size_t>(i)]];
    return 2 * anomalous > m.k ? Label::Anomalous : Label::Normal;
}

}  // namespace logens
