#pragma once

// Shared fixture builders and independent oracles for the test suites. The
// oracles deliberately avoid the library's implementation paths: plain
// loops, exhaustive search and finite differences only.

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "logens/core.hpp"
#include "logens/features.hpp"
#include "logens/rng.hpp"
#include "logens/slfn.hpp"

namespace testutil {

using namespace logens;

inline LogSequence seq(std::vector<TemplateId> ids) {
    LogSequence s;
    s.template_ids = std::move(ids);
    s.origin = SequenceOrigin::window(0);
    return s;
}

inline LabeledSequence lseq(std::vector<TemplateId> ids, Label label) {
    return {seq(std::move(ids)), label};
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("logens_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

// ---- oracles ----

// Exhaustive KNN: plain-loop distances, full sort, majority with ties to
// Normal and distance ties to the lower index.
inline Label knn_oracle(const std::vector<std::vector<double>>& points,
                        const std::vector<int>& labels, const std::vector<double>& query,
                        int k) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < query.size(); ++j) {
            const double diff = points[i][j] - query[j];
            d += diff * diff;
        }
        dist.emplace_back(d, i);
    }
    std::sort(dist.begin(), dist.end());
    int ones = 0;
    for (int i = 0; i < k; ++i) ones += labels[dist[static_cast<std::size_t>(i)].second];
    return 2 * ones > k ? Label::Anomalous : Label::Normal;
}

// Best single-split (stump) training accuracy by brute force.
inline double stump_oracle_accuracy(const FeatureMatrix& x, const Eigen::VectorXi& y) {
    const auto n = static_cast<double>(x.rows());
    double best = 0.0;
    // majority-only classifier as the floor
    {
        int ones = y.sum();
        best = std::max(static_cast<double>(ones), n - static_cast<double>(ones)) / n;
    }
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
        std::vector<double> vals;
        for (Eigen::Index i = 0; i < x.rows(); ++i) vals.push_back(x(i, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t v = 0; v + 1 < vals.size(); ++v) {
            const double thr = (vals[v] + vals[v + 1]) / 2.0;
            for (int left_label = 0; left_label <= 1; ++left_label) {
                int correct = 0;
                for (Eigen::Index i = 0; i < x.rows(); ++i) {
                    const int pred = x(i, f) <= thr ? left_label : 1 - left_label;
                    correct += (pred == y[i]);
                }
                best = std::max(best, static_cast<double>(correct) / n);
            }
        }
    }
    return best;
}

// Central finite differences of the SLFN loss over every parameter;
// returns the worst relative error against the analytic gradient.
inline double slfn_gradcheck_max_rel_error(SlfnModel model, const FeatureMatrix& x,
                                           const Eigen::VectorXi& y, double h = 1e-5) {
    const SlfnGradients g = slfn_loss_gradients(model, x, y);
    double worst = 0.0;

    auto check = [&](double* param, double analytic) {
        const double saved = *param;
        *param = saved + h;
        const double up = slfn_loss(model, x, y);
        *param = saved - h;
        const double down = slfn_loss(model, x, y);
        *param = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };

    for (Eigen::Index i = 0; i < model.w1.size(); ++i)
        check(model.w1.data() + i, g.w1.data()[i]);
    for (Eigen::Index i = 0; i < model.b1.size(); ++i)
        check(model.b1.data() + i, g.b1.data()[i]);
    for (Eigen::Index i = 0; i < model.w2.size(); ++i)
        check(model.w2.data() + i, g.w2.data()[i]);
    for (Eigen::Index i = 0; i < model.b2.size(); ++i)
        check(model.b2.data() + i, g.b2.data()[i]);
    return worst;
}

// Pair-counting U statistic: U_a = #{(i,j): a_i > b_j} + 0.5 #{ties}.
inline double mwu_pair_count_oracle(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a)
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    return u;
}

}  // namespace testutil
