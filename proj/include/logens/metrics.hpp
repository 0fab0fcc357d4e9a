#pragma once

// Confusion metrics with the anomalous class as positive, Mann-Whitney U
// significance testing (exact enumeration for small untied samples, normal
// approximation with tie and continuity corrections otherwise) and timing
// aggregation.

#include <cstddef>
#include <vector>

#include "logens/core.hpp"

namespace logens {

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

Confusion confusion(const std::vector<Label>& preds, const std::vector<Label>& truth);

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Zero-denominator convention: a metric whose denominator is 0 is 0.
Prf1 precision_recall_f1(const Confusion& c);

struct UTestResult {
    double u_statistic = 0.0;  // U of the first sample
    double p_value = 1.0;
    bool significant = false;  // p < 0.05
    bool exact = false;        // enumeration rather than approximation
};

inline constexpr double kSignificanceAlpha = 0.05;

// Two-sided test. Exact enumeration when |a|+|b| <= 16 and the pooled
// sample has no ties; the approximation route otherwise.
UTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

// The approximation route on its own: tie- and continuity-corrected normal
// tail with a fourth-moment refinement that keeps small-sample p-values
// within 0.02 of enumeration for sizes >= 3.
UTestResult mann_whitney_u_approx(const std::vector<double>& a,
                                  const std::vector<double>& b);

struct TimingReport {
    double total_seconds = 0.0;
    double mean_seconds = 0.0;
    double max_seconds = 0.0;
};

TimingReport timing_report(const std::vector<double>& sample_seconds);

}  // namespace logens
