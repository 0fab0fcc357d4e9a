#pragma once

// Count-vector featurization. A sequence becomes a per-template occurrence
// histogram; the encoder variant reserves one overflow bucket for template
// ids minted after the training vocabulary was fixed.

#include <Eigen/Dense>

#include "logens/core.hpp"

namespace logens {

using CountVector = Eigen::VectorXd;
using FeatureMatrix = Eigen::MatrixXd;  // rows = sequences

// counts[i] = occurrences of template i. Throws input_error when an id
// falls outside [0, dim).
inline CountVector to_count_vector(const LogSequence& seq, Eigen::Index dim) {
    CountVector v = CountVector::Zero(dim);
    for (TemplateId id : seq.template_ids) {
        if (id < 0 || static_cast<Eigen::Index>(id) >= dim)
            throw input_error("template id " + std::to_string(id) +
                              " outside count-vector dimension " + std::to_string(dim));
        v[static_cast<Eigen::Index>(id)] += 1.0;
    }
    return v;
}

// Fixed training vocabulary of size vocab; ids >= vocab land in a trailing
// overflow bucket, so unseen templates keep their signal instead of failing.
class FeatureEncoder {
public:
    explicit FeatureEncoder(Eigen::Index vocab) : vocab_(vocab) {
        if (vocab < 1) throw config_error("feature vocabulary must be non-empty");
    }

    Eigen::Index dim() const { return vocab_ + 1; }
    Eigen::Index vocab() const { return vocab_; }

    CountVector encode(const LogSequence& seq) const {
        CountVector v = CountVector::Zero(dim());
        for (TemplateId id : seq.template_ids) {
            if (id < 0) throw input_error("negative template id");
            const Eigen::Index slot =
                static_cast<Eigen::Index>(id) < vocab_ ? static_cast<Eigen::Index>(id) : vocab_;
            v[slot] += 1.0;
        }
        return v;
    }

    FeatureMatrix encode_all(const std::vector<LabeledSequence>& data) const {
        FeatureMatrix x(static_cast<Eigen::Index>(data.size()), dim());
        for (std::size_t i = 0; i < data.size(); ++i)
            x.row(static_cast<Eigen::Index>(i)) = encode(data[i].sequence).transpose();
        return x;
    }

private:
    Eigen::Index vocab_;
};

inline Eigen::VectorXi labels_of(const std::vector<LabeledSequence>& data) {
    Eigen::VectorXi y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = label_to_int(data[i].label);
    return y;
}

}  // namespace logens
