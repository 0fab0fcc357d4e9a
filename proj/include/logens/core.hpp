#pragma once

// Shared domain types for the detection pipeline: labels, messages,
// templates, sequences and labeled datasets.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace logens {

// Error taxonomy. input_error covers malformed data and violated
// preconditions, config_error bad run configuration, backend_error an
// unreachable or misbehaving LLM backend, training_error a diverged fit.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct backend_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct training_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Label : int { Normal = 0, Anomalous = 1 };

inline int label_to_int(Label l) { return static_cast<int>(l); }

inline Label label_from_int(int v) {
    if (v == 0) return Label::Normal;
    if (v == 1) return Label::Anomalous;
    throw input_error("label value must be 0 or 1, got " + std::to_string(v));
}

inline const char* label_name(Label l) {
    return l == Label::Anomalous ? "anomalous" : "normal";
}

using TemplateId = int;

inline constexpr const char* kWildcard = "<*>";

struct LogMessage {
    std::string header;                      // timestamp/level etc., may be empty
    std::string content;                     // non-empty
    std::optional<std::string> session_key;  // absent for window-partitioned sources
    std::size_t arrival_index = 0;           // strictly increasing within a file
};

struct LogTemplate {
    TemplateId id = 0;
    std::vector<std::string> tokens;  // literals and kWildcard markers

    bool is_wildcard(std::size_t i) const { return tokens.at(i) == kWildcard; }

    std::size_t literal_count() const {
        std::size_t n = 0;
        for (const auto& t : tokens)
            if (t != kWildcard) ++n;
        return n;
    }

    // Tokens joined by single spaces; the key form used for knowledge-base
    // lookups and prompt rendering.
    std::string rendered() const {
        std::string out;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) out += ' ';
            out += tokens[i];
        }
        return out;
    }
};

struct SequenceOrigin {
    enum class Kind { Session, Window } kind = Kind::Session;
    std::string session_key;        // valid when kind == Session
    std::size_t window_start = 0;   // valid when kind == Window

    static SequenceOrigin session(std::string key) {
        SequenceOrigin o;
        o.kind = Kind::Session;
        o.session_key = std::move(key);
        return o;
    }
    static SequenceOrigin window(std::size_t start) {
        SequenceOrigin o;
        o.kind = Kind::Window;
        o.window_start = start;
        return o;
    }
};

struct LogSequence {
    std::vector<TemplateId> template_ids;  // non-empty
    SequenceOrigin origin;
};

struct LabeledSequence {
    LogSequence sequence;
    Label label = Label::Normal;
};

// Train/test collections plus the template store they reference.
// Mutations are rejected once the dataset is frozen for an experiment run.
class LabeledDataset {
public:
    LabeledDataset() = default;
    explicit LabeledDataset(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    const std::vector<LabeledSequence>& train() const { return train_; }
    const std::vector<LabeledSequence>& test() const { return test_; }
    const std::map<TemplateId, LogTemplate>& templates() const { return templates_; }
    bool frozen() const { return frozen_; }

    void add_train(LabeledSequence s) {
        check_mutable();
        train_.push_back(std::move(s));
    }
    void add_test(LabeledSequence s) {
        check_mutable();
        test_.push_back(std::move(s));
    }
    void put_template(LogTemplate t) {
        check_mutable();
        templates_[t.id] = std::move(t);
    }
    void set_test(std::vector<LabeledSequence> s) {
        check_mutable();
        test_ = std::move(s);
    }
    void set_train(std::vector<LabeledSequence> s) {
        check_mutable();
        train_ = std::move(s);
    }

    void freeze() { frozen_ = true; }

    // Every id referenced by train/test must resolve in the template store.
    bool references_resolve() const {
        auto ok = [&](const std::vector<LabeledSequence>& part) {
            for (const auto& ls : part)
                for (TemplateId id : ls.sequence.template_ids)
                    if (!templates_.count(id)) return false;
            return true;
        };
        return ok(train_) && ok(test_);
    }

private:
    void check_mutable() const {
        if (frozen_) throw input_error("dataset '" + name_ + "' is frozen");
    }

    std::string name_;
    std::vector<LabeledSequence> train_;
    std::vector<LabeledSequence> test_;
    std::map<TemplateId, LogTemplate> templates_;
    bool frozen_ = false;
};

}  // namespace logens
