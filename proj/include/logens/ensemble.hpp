#pragma once

// Detection orchestration: cache lookup, fan-out to the enabled base
// models, strict-majority vote (ties resolve to Normal) and cache
// write-back.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logens/backend.hpp"
#include "logens/cache.hpp"
#include "logens/core.hpp"
#include "logens/decision_tree.hpp"
#include "logens/features.hpp"
#include "logens/knn.hpp"
#include "logens/parser.hpp"
#include "logens/slfn.hpp"

namespace logens {

struct EnsembleConfig {
    bool use_knn = true;
    bool use_dt = true;
    bool use_slfn = true;
    bool use_llm = true;
    bool rag_enabled = true;
    bool cache_enabled = true;

    int parallelism = 1;     // bounded worker count for detect_batch
    bool fail_soft = false;  // collect per-sequence errors instead of aborting

    int enabled_models() const {
        return static_cast<int>(use_knn) + static_cast<int>(use_dt) +
               static_cast<int>(use_slfn) + static_cast<int>(use_llm);
    }
    void validate() const {
        if (enabled_models() == 0) throw config_error("ensemble needs at least one base model");
        if (parallelism < 1) throw config_error("parallelism must be >= 1");
    }
};

enum class VoteSource { CacheHit, Computed };

struct VoteRecord {
    std::map<std::string, Label> per_model;  // empty on cache hits
    Label final = Label::Normal;
    VoteSource source = VoteSource::Computed;
};

// Anomalous iff strictly more than half the votes are Anomalous.
Label majority_vote(const std::vector<Label>& votes);

struct BatchTiming {
    double total_seconds = 0.0;
    double mean_seconds = 0.0;
    double cache_seconds = 0.0;  // lookup + write-back share, reported separately
};

struct BatchError {
    std::size_t index = 0;
    std::string message;
};

struct BatchResult {
    std::vector<VoteRecord> records;  // input order
    BatchTiming timing;
    std::vector<BatchError> errors;  // fail-soft mode only
};

// Immutable model/knowledge state plus the (single-writer) cache.
class DetectionPipeline {
public:
    DetectionPipeline(EnsembleConfig config, const TemplateStore& store,
                      FeatureEncoder encoder, KnowledgeBase kb, PromptOptions prompt_options,
                      RetryPolicy retry);

    void set_knn(KnnModel m) { knn_ = std::move(m); }
    void set_dt(TreeModel m) { dt_ = std::move(m); }
    void set_slfn(SlfnModel m) { slfn_ = std::move(m); }
    void set_backend(std::shared_ptr<ChatBackend> b) { backend_ = std::move(b); }

    PredictionCache& cache() { return cache_; }
    const EnsembleConfig& config() const { return config_; }

    VoteRecord detect(const LogSequence& seq);
    BatchResult detect_batch(const std::vector<LogSequence>& seqs);

private:
    VoteRecord compute(const LogSequence& seq);

    EnsembleConfig config_;
    const TemplateStore& store_;
    FeatureEncoder encoder_;
    KnowledgeBase kb_;
    PromptOptions prompt_options_;
    RetryPolicy retry_;

    std::optional<KnnModel> knn_;
    std::optional<TreeModel> dt_;
    std::optional<SlfnModel> slfn_;
    std::shared_ptr<ChatBackend> backend_;

    PredictionCache cache_;
};

}  // namespace logens
