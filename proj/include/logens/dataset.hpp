#pragma once

// Sequence construction and experiment-set manipulation: partitioning,
// test/train de-duplication, seeded instability injection, subset sampling
// and data-efficiency accounting.

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "logens/core.hpp"
#include "logens/parser.hpp"

namespace logens {

struct PartitionSpec {
    enum class Mode { Session, SlidingWindow, Truncate } mode = Mode::Session;
    std::size_t window = 50;   // SlidingWindow
    std::size_t step = 50;     // SlidingWindow, 1 <= step <= window
    std::size_t max_len = 30;  // Truncate

    void validate() const {
        if (mode == Mode::SlidingWindow && (step < 1 || step > window))
            throw config_error("sliding window requires 1 <= step <= window");
        if (mode == Mode::SlidingWindow && window < 1)
            throw config_error("sliding window requires window >= 1");
        if (mode == Mode::Truncate && max_len < 1)
            throw config_error("truncation requires max_len >= 1");
    }
};

struct InjectionSpec {
    enum class Level { Sequence, Template } level = Level::Sequence;
    double ratio = 0.0;  // in [0,1]
    std::uint64_t seed = 0;
    std::set<TemplateId> safe_template_ids;  // sequence-level edits touch only these
    std::size_t shuffle_span = 3;
};

struct InjectionReport {
    std::uint64_t seed = 0;
    double ratio = 0.0;
    std::string level;
    std::size_t edited = 0;
    std::size_t removed = 0;
    std::size_t duplicated = 0;
    std::size_t shuffled = 0;
    std::size_t word_added = 0;
    std::size_t word_removed = 0;
    std::size_t word_replaced = 0;
    std::size_t skipped_uneditable = 0;
};

struct EfficiencyStats {
    std::size_t d_count = 0;  // sequences in the subset
    std::size_t u_count = 0;  // unique sequences in the subset
    double u_pct = 0.0;       // u_count / unique sequences in the full set
    double delta_u_pct = 0.0; // 1 - u_pct
};

// One sequence per distinct session key, template ids in arrival order.
// Throws input_error when a message lacks a session key.
std::vector<LogSequence> partition_by_session(
    const std::vector<LogMessage>& messages,
    const std::function<TemplateId(const LogMessage&)>& parse);

// Windows start at 0, step, 2*step, ...; a trailing short window is kept
// unless the previous window was itself already truncated by the end of
// the stream (in which case the tail repeats covered messages only).
std::vector<LogSequence> partition_sliding_window(const std::vector<TemplateId>& ids,
                                                  std::size_t window, std::size_t step);

std::vector<LogSequence> truncate_sessions(std::vector<LogSequence> sequences,
                                           std::size_t max_len);

struct DedupResult {
    std::vector<LabeledSequence> dedup_test;
    double duplication_ratio = 0.0;
};

// Drops test sequences whose template-id list appears verbatim in train.
DedupResult deduplicate(const std::vector<LabeledSequence>& test,
                        const std::vector<LabeledSequence>& train);

// Applies exactly round(ratio * |test|) single edits to distinct test
// sequences: remove / duplicate one occurrence of a safe template, or
// shuffle a contiguous span. Labels and train are untouched.
std::pair<LabeledDataset, InjectionReport> inject_sequence_changes(
    const LabeledDataset& dataset, const InjectionSpec& spec);

// Edits round(ratio * |templates|) templates: insert, delete or replace one
// literal word (never deleting the last literal). Ids are preserved.
std::pair<TemplateStore, InjectionReport> inject_template_changes(
    const TemplateStore& store, const InjectionSpec& spec,
    const std::vector<std::string>& word_pool);

struct SamplingStrategy {
    enum class Kind { Random, AllAnomalousPlusNormalFraction } kind = Kind::Random;
    std::size_t n = 0;       // Random
    double fraction = 0.2;   // AllAnomalousPlusNormalFraction, in (0,1]
};

std::vector<LabeledSequence> sample_training_subset(
    const std::vector<LabeledSequence>& train, const SamplingStrategy& strategy,
    std::uint64_t seed);

EfficiencyStats compute_data_efficiency(const std::vector<LabeledSequence>& subset,
                                        const std::vector<LabeledSequence>& full);

}  // namespace logens
