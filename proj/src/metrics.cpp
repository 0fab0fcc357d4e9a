#include "logens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace logens {

Confusion confusion(const std::vector<Label>& preds, const std::vector<Label>& truth) {
    if (preds.size() != truth.size())
        throw input_error("prediction/truth length mismatch: " + std::to_string(preds.size()) +
                          " vs " + std::to_string(truth.size()));
    Confusion c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool p = preds[i] == Label::Anomalous;
        const bool t = truth[i] == Label::Anomalous;
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Prf1 precision_recall_f1(const Confusion& c) {
    Prf1 m;
    const double tp = static_cast<double>(c.tp);
    if (c.tp + c.fp > 0) m.precision = tp / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = tp / static_cast<double>(c.tp + c.fn);
    if (m.precision + m.recall > 0.0)
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

namespace {

// Midranks of the pooled sample, returned per original slot (a first, b after).
std::vector<double> pooled_midranks(const std::vector<double>& a,
                                    const std::vector<double>& b, bool& has_ties,
                                    double& tie_correction_sum) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto value = [&](std::size_t i) { return i < a.size() ? a[i] : b[i - a.size()]; };
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return value(x) < value(y); });

    std::vector<double> ranks(n);
    has_ties = false;
    tie_correction_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && value(order[j + 1]) == value(order[i])) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) {
            has_ties = true;
            tie_correction_sum += t * t * t - t;
        }
        i = j + 1;
    }
    return ranks;
}

// Exact two-sided p: double the probability of the smaller-U tail over all
// C(n1+n2, n1) equally likely rank assignments.
double exact_p_value(std::size_t n1, std::size_t n2, double u_min) {
    const std::size_t n = n1 + n2;
    std::vector<std::size_t> comb(n1);
    std::iota(comb.begin(), comb.end(), 1);  // rank values 1..n

    const double base = static_cast<double>(n1 * (n1 + 1)) / 2.0;
    std::size_t total = 0, in_tail = 0;
    for (;;) {
        ++total;
        const double rank_sum =
            static_cast<double>(std::accumulate(comb.begin(), comb.end(), std::size_t{0}));
        const double u = rank_sum - base;
        if (u <= u_min + 1e-9) ++in_tail;

        // next combination of {1..n} choose n1
        std::size_t k = n1;
        while (k > 0 && comb[k - 1] == n - n1 + k) --k;
        if (k == 0) break;
        ++comb[k - 1];
        for (std::size_t j = k; j < n1; ++j) comb[j] = comb[j - 1] + 1;
    }
    return std::min(1.0, 2.0 * static_cast<double>(in_tail) / static_cast<double>(total));
}

}  // namespace

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) {
    return std::exp(-x * x / 2.0) / std::sqrt(2.0 * 3.14159265358979323846);
}

// Two-sided p from the refined normal tail. The kurtosis term is the
// closed-form excess kurtosis of U under the null (untied); it corrects
// the platykurtic small-sample shape the plain normal overshoots.
double approx_p_value(std::size_t n1, std::size_t n2, double u_min, double tie_sum) {
    const double n = static_cast<double>(n1 + n2);
    const double prod = static_cast<double>(n1 * n2);
    const double mean = prod / 2.0;
    const double variance = prod / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (variance <= 0.0) return 1.0;  // every pooled value identical

    const double sd = std::sqrt(variance);
    const double kurtosis =
        -(6.0 / 5.0) *
        (static_cast<double>(n1) * static_cast<double>(n1) +
         static_cast<double>(n2) * static_cast<double>(n2) + prod + n) /
        (prod * (n + 1.0));

    const double x = (u_min + 0.5 - mean) / sd;  // continuity-corrected lower tail
    const double tail =
        normal_cdf(x) - normal_pdf(x) * (kurtosis / 24.0) * (x * x * x - 3.0 * x);
    return std::clamp(2.0 * tail, 0.0, 1.0);
}

struct RankedU {
    double u1 = 0.0;
    bool has_ties = false;
    double tie_sum = 0.0;
};

RankedU ranked_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw input_error("mann-whitney requires non-empty samples");
    RankedU out;
    const std::vector<double> ranks = pooled_midranks(a, b, out.has_ties, out.tie_sum);
    double r1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
    out.u1 = r1 - static_cast<double>(a.size() * (a.size() + 1)) / 2.0;
    return out;
}

}  // namespace

UTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    const RankedU r = ranked_u(a, b);
    const std::size_t n1 = a.size(), n2 = b.size();
    const double u2 = static_cast<double>(n1 * n2) - r.u1;

    UTestResult res;
    res.u_statistic = r.u1;
    if (n1 + n2 <= 16 && !r.has_ties) {
        res.exact = true;
        res.p_value = exact_p_value(n1, n2, std::min(r.u1, u2));
    } else {
        res.p_value = approx_p_value(n1, n2, std::min(r.u1, u2), r.tie_sum);
    }
    res.significant = res.p_value < kSignificanceAlpha;
    return res;
}

UTestResult mann_whitney_u_approx(const std::vector<double>& a,
                                  const std::vector<double>& b) {
    const RankedU r = ranked_u(a, b);
    const std::size_t n1 = a.size(), n2 = b.size();
    const double u2 = static_cast<double>(n1 * n2) - r.u1;

    UTestResult res;
    res.u_statistic = r.u1;
    res.p_value = approx_p_value(n1, n2, std::min(r.u1, u2), r.tie_sum);
    res.significant = res.p_value < kSignificanceAlpha;
    return res;
}

TimingReport timing_report(const std::vector<double>& sample_seconds) {
    TimingReport r;
    if (sample_seconds.empty()) return r;
    for (double s : sample_seconds) {
        r.total_seconds += s;
        r.max_seconds = std::max(r.max_seconds, s);
    }
    r.mean_seconds = r.total_seconds / static_cast<double>(sample_seconds.size());
    return r;
}

}  // namespace logens
