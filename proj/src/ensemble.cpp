#include "logens/ensemble.hpp"

#include <atomic>
#include <chrono>
#include <thread>

namespace logens {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Label majority_vote(const std::vector<Label>& votes) {
    if (votes.empty()) throw input_error("majority vote over an empty vote list");
    std::size_t anomalous = 0;
    for (Label v : votes) anomalous += (v == Label::Anomalous);
    return 2 * anomalous > votes.size() ? Label::Anomalous : Label::Normal;
}

DetectionPipeline::DetectionPipeline(EnsembleConfig config, const TemplateStore& store,
                                     FeatureEncoder encoder, KnowledgeBase kb,
                                     PromptOptions prompt_options, RetryPolicy retry)
    : config_(config),
      store_(store),
      encoder_(std::move(encoder)),
      kb_(std::move(kb)),
      prompt_options_(prompt_options),
      retry_(std::move(retry)) {
    config_.validate();
    retry_.validate();
    prompt_options_.rag_enabled = config_.rag_enabled;
}

VoteRecord DetectionPipeline::compute(const LogSequence& seq) {
    VoteRecord rec;
    rec.source = VoteSource::Computed;
    std::vector<Label> votes;

    if (config_.use_knn || config_.use_dt || config_.use_slfn) {
        const CountVector x = encoder_.encode(seq);
        if (config_.use_knn) {
            if (!knn_) throw config_error("knn enabled but no model loaded");
            const Label l = predict_knn(*knn_, x);
            rec.per_model["knn"] = l;
            votes.push_back(l);
        }
        if (config_.use_dt) {
            if (!dt_) throw config_error("decision tree enabled but no model loaded");
            const Label l = predict_dt(*dt_, x);
            rec.per_model["dt"] = l;
            votes.push_back(l);
        }
        if (config_.use_slfn) {
            if (!slfn_) throw config_error("slfn enabled but no model loaded");
            const Label l = predict_slfn(*slfn_, x);
            rec.per_model["slfn"] = l;
            votes.push_back(l);
        }
    }
    if (config_.use_llm) {
        if (!backend_) throw config_error("llm enabled but no backend configured");
        const Prompt prompt = build_prompt(seq, store_, kb_, prompt_options_);
        const ClassifyResult r = classify_with_llm(*backend_, prompt, retry_);
        rec.per_model["llm"] = r.label;
        votes.push_back(r.label);
    }

    rec.final = majority_vote(votes);
    return rec;
}

VoteRecord DetectionPipeline::detect(const LogSequence& seq) {
    if (seq.template_ids.empty()) throw input_error("cannot detect on an empty sequence");

    if (config_.cache_enabled) {
        if (auto cached = cache_.query(seq.template_ids)) {
            VoteRecord rec;
            rec.final = *cached;
            rec.source = VoteSource::CacheHit;
            return rec;
        }
    }
    VoteRecord rec = compute(seq);
    if (config_.cache_enabled) cache_.add(seq.template_ids, rec.final);
    return rec;
}

BatchResult DetectionPipeline::detect_batch(const std::vector<LogSequence>& seqs) {
    BatchResult result;
    result.records.resize(seqs.size());
    const auto batch_start = Clock::now();

    // Cache coherence requires sequential replay: a duplicate must observe
    // the write of its first occurrence, so invocation counts stay exact.
    const bool parallel = config_.parallelism > 1 && !config_.cache_enabled;

    if (!parallel) {
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            try {
                if (config_.cache_enabled) {
                    const auto cache_start = Clock::now();
                    const auto cached = cache_.query(seqs[i].template_ids);
                    result.timing.cache_seconds += seconds_since(cache_start);
                    if (cached) {
                        result.records[i].final = *cached;
                        result.records[i].source = VoteSource::CacheHit;
                        continue;
                    }
                }
                result.records[i] = compute(seqs[i]);
                if (config_.cache_enabled) {
                    const auto cache_start = Clock::now();
                    cache_.add(seqs[i].template_ids, result.records[i].final);
                    result.timing.cache_seconds += seconds_since(cache_start);
                }
            } catch (const backend_error& e) {
                if (!config_.fail_soft)
                    throw backend_error("batch aborted at sequence " + std::to_string(i) +
                                        ": " + e.what());
                result.errors.push_back({i, e.what()});
            } catch (const std::exception& e) {
                if (!config_.fail_soft)
                    throw input_error("batch aborted at sequence " + std::to_string(i) + ": " +
                                      e.what());
                result.errors.push_back({i, e.what()});
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::mutex error_mutex;
        std::vector<BatchError> errors;

        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= seqs.size() || stop.load()) return;
                try {
                    result.records[i] = compute(seqs[i]);
                } catch (const std::exception& e) {
                    std::lock_guard lock(error_mutex);
                    errors.push_back({i, e.what()});
                    if (!config_.fail_soft) stop.store(true);
                }
            }
        };

        const int workers =
            std::min<int>(config_.parallelism, static_cast<int>(seqs.size() ? seqs.size() : 1));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();

        if (!errors.empty() && !config_.fail_soft) {
            std::size_t first = errors[0].index;
            for (const BatchError& e : errors) first = std::min(first, e.index);
            for (const BatchError& e : errors)
                if (e.index == first)
                    throw input_error("batch aborted at sequence " + std::to_string(first) +
                                      ": " + e.message);
        }
        result.errors = std::move(errors);
    }

    result.timing.total_seconds = seconds_since(batch_start);
    result.timing.mean_seconds =
        seqs.empty() ? 0.0 : result.timing.total_seconds / static_cast<double>(seqs.size());
    return result;
}

}  // namespace logens
