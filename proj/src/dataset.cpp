#include "logens/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <unordered_map>

#include "logens/rng.hpp"

namespace logens {

namespace {

using IdList = std::vector<TemplateId>;

std::size_t round_count(double ratio, std::size_t n) {
    return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

}  // namespace

std::vector<LogSequence> partition_by_session(
    const std::vector<LogMessage>& messages,
    const std::function<TemplateId(const LogMessage&)>& parse) {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<TemplateId>> groups;
    for (const LogMessage& m : messages) {
        if (!m.session_key || m.session_key->empty())
            throw input_error("message " + std::to_string(m.arrival_index) +
                              " has no session key");
        auto [it, inserted] = groups.try_emplace(*m.session_key);
        if (inserted) order.push_back(*m.session_key);
        it->second.push_back(parse(m));
    }
    std::vector<LogSequence> out;
    out.reserve(order.size());
    for (const std::string& key : order) {
        LogSequence s;
        s.template_ids = std::move(groups[key]);
        s.origin = SequenceOrigin::session(key);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<LogSequence> partition_sliding_window(const std::vector<TemplateId>& ids,
                                                  std::size_t window, std::size_t step) {
    if (window < 1 || step < 1 || step > window)
        throw config_error("sliding window requires 1 <= step <= window");
    std::vector<LogSequence> out;
    bool prev_short = false;
    for (std::size_t start = 0; start < ids.size(); start += step) {
        const std::size_t end = std::min(start + window, ids.size());
        const bool is_short = (end - start) < window;
        if (is_short && prev_short) break;  // tail fully inside the previous one
        LogSequence s;
        s.template_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(start),
                              ids.begin() + static_cast<std::ptrdiff_t>(end));
        s.origin = SequenceOrigin::window(start);
        out.push_back(std::move(s));
        prev_short = is_short;
    }
    return out;
}

std::vector<LogSequence> truncate_sessions(std::vector<LogSequence> sequences,
                                           std::size_t max_len) {
    if (max_len < 1) throw config_error("truncation requires max_len >= 1");
    for (LogSequence& s : sequences)
        if (s.template_ids.size() > max_len) s.template_ids.resize(max_len);
    return sequences;
}

DedupResult deduplicate(const std::vector<LabeledSequence>& test,
                        const std::vector<LabeledSequence>& train) {
    std::set<IdList> seen;
    for (const LabeledSequence& ls : train) seen.insert(ls.sequence.template_ids);
    DedupResult r;
    for (const LabeledSequence& ls : test)
        if (!seen.count(ls.sequence.template_ids)) r.dedup_test.push_back(ls);
    r.duplication_ratio =
        test.empty() ? 0.0
                     : static_cast<double>(test.size() - r.dedup_test.size()) /
                           static_cast<double>(test.size());
    return r;
}

namespace {

enum class SeqEdit { Remove, Duplicate, Shuffle };

std::vector<std::size_t> safe_positions(const IdList& ids,
                                        const std::set<TemplateId>& safe) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (safe.count(ids[i])) pos.push_back(i);
    return pos;
}

// Starts of contiguous spans of length `span` holding at least two distinct
// values; only those admit a content-changing shuffle.
std::vector<std::size_t> shuffleable_starts(const IdList& ids, std::size_t span) {
    std::vector<std::size_t> starts;
    if (span < 2 || ids.size() < span) return starts;
    for (std::size_t s = 0; s + span <= ids.size(); ++s) {
        for (std::size_t i = s + 1; i < s + span; ++i) {
            if (ids[i] != ids[s]) {
                starts.push_back(s);
                break;
            }
        }
    }
    return starts;
}

}  // namespace

std::pair<LabeledDataset, InjectionReport> inject_sequence_changes(
    const LabeledDataset& dataset, const InjectionSpec& spec) {
    if (spec.level != InjectionSpec::Level::Sequence)
        throw config_error("inject_sequence_changes requires a sequence-level spec");
    if (spec.ratio < 0.0 || spec.ratio > 1.0)
        throw config_error("injection ratio must be in [0,1]");

    std::vector<LabeledSequence> test = dataset.test();
    const std::size_t target = round_count(spec.ratio, test.size());

    InjectionReport report;
    report.seed = spec.seed;
    report.ratio = spec.ratio;
    report.level = "sequence";

    SeededRng rng(spec.seed);
    std::vector<std::size_t> candidates(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) candidates[i] = i;
    rng.shuffle(candidates);

    std::size_t edited = 0;
    for (std::size_t idx : candidates) {
        if (edited == target) break;
        IdList& ids = test[idx].sequence.template_ids;

        const std::vector<std::size_t> safe = safe_positions(ids, spec.safe_template_ids);
        const std::size_t span = std::min(spec.shuffle_span, ids.size());
        const std::vector<std::size_t> starts = shuffleable_starts(ids, span);

        std::vector<SeqEdit> feasible;
        if (!safe.empty() && ids.size() >= 2) feasible.push_back(SeqEdit::Remove);
        if (!safe.empty()) feasible.push_back(SeqEdit::Duplicate);
        if (!starts.empty()) feasible.push_back(SeqEdit::Shuffle);
        if (feasible.empty()) {
            ++report.skipped_uneditable;
            std::cerr << "warning: injection skipped uneditable test sequence #" << idx
                      << "\n";
            continue;
        }

        switch (feasible[rng.next_below(feasible.size())]) {
            case SeqEdit::Remove: {
                const std::size_t p = safe[rng.next_below(safe.size())];
                ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(p));
                ++report.removed;
                break;
            }
            case SeqEdit::Duplicate: {
                const std::size_t p = safe[rng.next_below(safe.size())];
                ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(p), ids[p]);
                ++report.duplicated;
                break;
            }
            case SeqEdit::Shuffle: {
                const std::size_t s = starts[rng.next_below(starts.size())];
                std::vector<TemplateId> original(ids.begin() + static_cast<std::ptrdiff_t>(s),
                                                 ids.begin() + static_cast<std::ptrdiff_t>(s + span));
                std::vector<TemplateId> permuted = original;
                do {
                    rng.shuffle(permuted);
                } while (permuted == original);
                std::copy(permuted.begin(), permuted.end(),
                          ids.begin() + static_cast<std::ptrdiff_t>(s));
                ++report.shuffled;
                break;
            }
        }
        ++edited;
    }

    if (edited < target)
        throw input_error("injection infeasible: only " + std::to_string(edited) + " of " +
                          std::to_string(target) + " test sequences editable");
    report.edited = edited;

    LabeledDataset out(dataset.name());
    for (const auto& [id, t] : dataset.templates()) out.put_template(t);
    out.set_train(dataset.train());
    out.set_test(std::move(test));
    return {std::move(out), report};
}

namespace {

enum class WordEdit { Add, Delete, Replace };

std::vector<std::size_t> literal_positions(const LogTemplate& t) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < t.tokens.size(); ++i)
        if (!t.is_wildcard(i)) pos.push_back(i);
    return pos;
}

}  // namespace

std::pair<TemplateStore, InjectionReport> inject_template_changes(
    const TemplateStore& store, const InjectionSpec& spec,
    const std::vector<std::string>& word_pool) {
    if (spec.level != InjectionSpec::Level::Template)
        throw config_error("inject_template_changes requires a template-level spec");
    if (spec.ratio < 0.0 || spec.ratio > 1.0)
        throw config_error("injection ratio must be in [0,1]");

    TemplateStore out;
    for (const LogTemplate& t : store.all()) out.add(t.tokens);

    const std::size_t target = round_count(spec.ratio, store.size());

    InjectionReport report;
    report.seed = spec.seed;
    report.ratio = spec.ratio;
    report.level = "template";

    SeededRng rng(spec.seed);
    std::vector<std::size_t> candidates(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) candidates[i] = i;
    rng.shuffle(candidates);

    std::size_t edited = 0;
    for (std::size_t idx : candidates) {
        if (edited == target) break;
        LogTemplate& t = out.get_mutable(static_cast<TemplateId>(idx));
        const std::vector<std::size_t> literals = literal_positions(t);

        std::vector<WordEdit> pool = {WordEdit::Add, WordEdit::Delete, WordEdit::Replace};
        bool done = false;
        while (!pool.empty() && !done) {
            const std::size_t pick = rng.next_below(pool.size());
            const WordEdit edit = pool[pick];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            switch (edit) {
                case WordEdit::Add:
                    if (word_pool.empty()) break;
                    t.tokens.insert(
                        t.tokens.begin() +
                            static_cast<std::ptrdiff_t>(rng.next_below(t.tokens.size() + 1)),
                        word_pool[rng.next_below(word_pool.size())]);
                    ++report.word_added;
                    done = true;
                    break;
                case WordEdit::Delete:
                    if (literals.size() < 2) break;  // never delete the last literal
                    t.tokens.erase(t.tokens.begin() + static_cast<std::ptrdiff_t>(
                                                          literals[rng.next_below(literals.size())]));
                    ++report.word_removed;
                    done = true;
                    break;
                case WordEdit::Replace:
                    if (word_pool.empty() || literals.empty()) break;
                    t.tokens[literals[rng.next_below(literals.size())]] =
                        word_pool[rng.next_below(word_pool.size())];
                    ++report.word_replaced;
                    done = true;
                    break;
            }
        }
        if (!done) {
            ++report.skipped_uneditable;
            std::cerr << "warning: injection skipped uneditable template " << idx << "\n";
            continue;
        }
        ++edited;
    }

    if (edited < target)
        throw input_error("injection infeasible: only " + std::to_string(edited) + " of " +
                          std::to_string(target) + " templates editable");
    report.edited = edited;
    return {std::move(out), report};
}

std::vector<LabeledSequence> sample_training_subset(
    const std::vector<LabeledSequence>& train, const SamplingStrategy& strategy,
    std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<LabeledSequence> out;

    if (strategy.kind == SamplingStrategy::Kind::Random) {
        if (strategy.n > train.size())
            throw input_error("sample size " + std::to_string(strategy.n) +
                              " exceeds training set size " + std::to_string(train.size()));
        for (std::size_t i : rng.sample_indices(train.size(), strategy.n))
            out.push_back(train[i]);
        return out;
    }

    if (strategy.fraction <= 0.0 || strategy.fraction > 1.0)
        throw input_error("normal fraction must be in (0,1]");

    // All anomalous rows, plus one representative for a sampled fraction of
    // the unique normal sequences.
    std::map<IdList, std::size_t> normal_rep;  // id list -> first occurrence index
    std::vector<const IdList*> unique_normals; // in first-seen order
    for (std::size_t i = 0; i < train.size(); ++i) {
        const LabeledSequence& ls = train[i];
        if (ls.label == Label::Anomalous) {
            out.push_back(ls);
        } else {
            auto [it, inserted] = normal_rep.try_emplace(ls.sequence.template_ids, i);
            if (inserted) unique_normals.push_back(&it->first);
        }
    }
    const std::size_t want = round_count(strategy.fraction, unique_normals.size());
    std::vector<std::size_t> chosen = rng.sample_indices(unique_normals.size(), want);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t c : chosen) out.push_back(train[normal_rep[*unique_normals[c]]]);
    return out;
}

EfficiencyStats compute_data_efficiency(const std::vector<LabeledSequence>& subset,
                                        const std::vector<LabeledSequence>& full) {
    if (full.empty()) throw input_error("cannot compute data efficiency on an empty full set");
    std::set<IdList> full_unique;
    for (const LabeledSequence& ls : full) full_unique.insert(ls.sequence.template_ids);
    std::set<IdList> sub_unique;
    for (const LabeledSequence& ls : subset) {
        if (!full_unique.count(ls.sequence.template_ids))
            throw input_error("subset contains a sequence absent from the full set");
        sub_unique.insert(ls.sequence.template_ids);
    }
    EfficiencyStats stats;
    stats.d_count = subset.size();
    stats.u_count = sub_unique.size();
    stats.u_pct = static_cast<double>(sub_unique.size()) /
                  static_cast<double>(full_unique.size());
    stats.delta_u_pct = 1.0 - stats.u_pct;
    return stats;
}

}  // namespace logens
