#include "logens/slfn.hpp"

#include <cmath>

#include "logens/rng.hpp"

namespace logens {

namespace {

void fill_uniform(Eigen::MatrixXd& m, double s, SeededRng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.next_real(-s, s);
}

struct Forward {
    Eigen::MatrixXd hidden;  // n x h, post-ReLU
    Eigen::MatrixXd probs;   // n x 2, softmax
    double loss = 0.0;
};

Forward forward_pass(const SlfnModel& m, const FeatureMatrix& x, const Eigen::VectorXi& y) {
    Forward f;
    f.hidden = ((x * m.w1.transpose()).rowwise() + m.b1.transpose()).cwiseMax(0.0);
    Eigen::MatrixXd logits = (f.hidden * m.w2.transpose()).rowwise() + m.b2.transpose();

    // Row-wise stable softmax.
    Eigen::VectorXd rowmax = logits.rowwise().maxCoeff();
    Eigen::MatrixXd ex = (logits.colwise() - rowmax).array().exp();
    Eigen::VectorXd denom = ex.rowwise().sum();
    f.probs = ex.array().colwise() / denom.array();

    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        loss -= std::log(std::max(f.probs(i, y[i]), 1e-300));
    f.loss = loss / static_cast<double>(x.rows());
    return f;
}

SlfnGradients backward_pass(const SlfnModel& m, const FeatureMatrix& x,
                            const Eigen::VectorXi& y, const Forward& f) {
    const auto n = static_cast<double>(x.rows());
    Eigen::MatrixXd dlogits = f.probs;
    for (Eigen::Index i = 0; i < x.rows(); ++i) dlogits(i, y[i]) -= 1.0;
    dlogits /= n;

    SlfnGradients g;
    g.w2 = dlogits.transpose() * f.hidden;
    g.b2 = dlogits.colwise().sum();
    Eigen::MatrixXd dhidden =
        (dlogits * m.w2).cwiseProduct((f.hidden.array() > 0.0).cast<double>().matrix());
    g.w1 = dhidden.transpose() * x;
    g.b1 = dhidden.colwise().sum();
    return g;
}

// Per-parameter moment accumulators (first and second), bias-corrected.
struct Moments {
    Eigen::MatrixXd m1, v1;
    Eigen::VectorXd mb1, vb1;
    Eigen::MatrixXd m2, v2;
    Eigen::VectorXd mb2, vb2;

    explicit Moments(const SlfnModel& m)
        : m1(Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols())),
          v1(Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols())),
          mb1(Eigen::VectorXd::Zero(m.b1.size())),
          vb1(Eigen::VectorXd::Zero(m.b1.size())),
          m2(Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols())),
          v2(Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols())),
          mb2(Eigen::VectorXd::Zero(m.b2.size())),
          vb2(Eigen::VectorXd::Zero(m.b2.size())) {}
};

template <typename Param, typename Grad>
void moment_step(Param& p, const Grad& g, Param& m, Param& v, double lr, int t) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v.array().matrix() + (1.0 - beta2) * g.array().square().matrix();
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

SlfnModel slfn_init(Eigen::Index input_dim, int hidden, std::uint64_t seed) {
    if (input_dim < 1 || hidden < 1) throw config_error("slfn needs positive dimensions");
    SeededRng rng(seed);
    SlfnModel m;
    m.w1.resize(hidden, input_dim);
    m.w2.resize(2, hidden);
    const double s1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden));
    const double s2 = std::sqrt(6.0 / static_cast<double>(hidden + 2));
    fill_uniform(m.w1, s1, rng);
    fill_uniform(m.w2, s2, rng);
    m.b1 = Eigen::VectorXd::Zero(hidden);
    m.b2 = Eigen::VectorXd::Zero(2);
    return m;
}

double slfn_loss(const SlfnModel& m, const FeatureMatrix& x, const Eigen::VectorXi& y) {
    if (x.rows() == 0) throw input_error("slfn loss over empty batch");
    if (x.rows() != y.size()) throw input_error("slfn feature/label count mismatch");
    return forward_pass(m, x, y).loss;
}

SlfnGradients slfn_loss_gradients(const SlfnModel& m, const FeatureMatrix& x,
                                  const Eigen::VectorXi& y) {
    if (x.rows() == 0) throw input_error("slfn gradients over empty batch");
    return backward_pass(m, x, y, forward_pass(m, x, y));
}

SlfnModel train_slfn(const FeatureMatrix& x, const Eigen::VectorXi& y,
                     const SlfnTrainConfig& cfg) {
    if (x.rows() == 0) throw input_error("slfn requires at least one sample");
    if (x.rows() != y.size()) throw input_error("slfn feature/label count mismatch");
    if (cfg.epochs < 0 || cfg.learning_rate <= 0.0)
        throw config_error("slfn needs epochs >= 0 and learning_rate > 0");

    SlfnModel model = slfn_init(x.cols(), cfg.hidden, cfg.seed);
    Moments mom(model);

    SlfnModel best = model;
    double best_loss = forward_pass(model, x, y).loss;
    if (!std::isfinite(best_loss)) throw training_error("slfn initial loss is not finite");

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const Forward f = forward_pass(model, x, y);
        if (!std::isfinite(f.loss)) throw training_error("slfn loss diverged");
        const SlfnGradients g = backward_pass(model, x, y, f);

        moment_step(model.w1, g.w1, mom.m1, mom.v1, cfg.learning_rate, epoch);
        moment_step(model.b1, g.b1, mom.mb1, mom.vb1, cfg.learning_rate, epoch);
        moment_step(model.w2, g.w2, mom.m2, mom.v2, cfg.learning_rate, epoch);
        moment_step(model.b2, g.b2, mom.mb2, mom.vb2, cfg.learning_rate, epoch);

        const double loss = forward_pass(model, x, y).loss;
        if (!std::isfinite(loss)) throw training_error("slfn loss diverged");
        if (loss < best_loss) {
            best_loss = loss;
            best = model;
        }
    }
    return best;  // never worse than the initial iterate
}

Eigen::Vector2d slfn_logits(const SlfnModel& m, const CountVector& x) {
    if (x.size() != m.w1.cols())
        throw input_error("slfn query dimension " + std::to_string(x.size()) +
                          " != model dimension " + std::to_string(m.w1.cols()));
    Eigen::VectorXd hidden = ((m.w1 * x) + m.b1).cwiseMax(0.0);
    return (m.w2 * hidden) + m.b2;
}

Label predict_slfn(const SlfnModel& m, const CountVector& x) {
    const Eigen::Vector2d logits = slfn_logits(m, x);
    return logits[1] > logits[0] ? Label::Anomalous : Label::Normal;
}

}  // namespace logens
