#pragma once

// Chat-completion backends and the label-extraction retry policy. The HTTP
// backend speaks the common chat-completions JSON shape; mock backends
// (scripted responses, sequence rules) keep experiments offline and
// deterministic.

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "logens/core.hpp"
#include "logens/knowledge_base.hpp"
#include "logens/parser.hpp"
#include "logens/prompt.hpp"

namespace logens {

struct ChatRequest {
    std::string prompt;
    double temperature = 0.1;
    int max_tokens = 8;
};

struct ChatResponse {
    bool ok = false;          // transport-level success
    std::string content;
    std::string error;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct RetryPolicy {
    double base_temperature = 0.1;
    std::vector<double> ladder = {0.2, 0.4, 0.6, 0.8, 1.0};
    Label default_label = Label::Normal;

    int max_attempts() const { return 1 + static_cast<int>(ladder.size()); }
    void validate() const {
        if (base_temperature < 0.0) throw config_error("negative base temperature");
        double prev = base_temperature;
        for (double t : ladder) {
            if (t < prev) throw config_error("retry temperatures must be non-decreasing");
            prev = t;
        }
    }
};

// Whole-token scan, anomalous terms first: {anomalous, abnormal, 1} ->
// Anomalous, else {normal, 0} -> Normal, else no parse.
std::optional<Label> parse_label_response(const std::string& text);

struct ClassifyResult {
    Label label = Label::Normal;
    int attempts = 0;
};

// Attempt 1 at the base temperature, retries walk the ladder. Exhausting
// the ladder on parse failures falls back to the default label; exhausting
// it on a transport failure raises backend_error instead.
ClassifyResult classify_with_llm(ChatBackend& backend, const Prompt& prompt,
                                 const RetryPolicy& policy, int max_tokens = 8);

// ---- backend implementations ----

struct HttpBackendConfig {
    std::string endpoint;   // e.g. http://localhost:8000/v1/chat/completions
    std::string model;
    std::string token_env;  // environment variable holding the bearer token
    int timeout_seconds = 30;
};

class HttpBackend : public ChatBackend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);
    ChatResponse complete(const ChatRequest& request) override;

private:
    HttpBackendConfig cfg_;
    std::string host_;  // scheme://host:port
    std::string path_;
};

// Replays a fixed response list; entries equal to "!fail" simulate a
// transport failure. Records every request temperature.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    ChatResponse complete(const ChatRequest& request) override;

    std::vector<double> temperatures() const {
        std::lock_guard lock(mutex_);
        return temperatures_;
    }
    std::size_t calls() const {
        std::lock_guard lock(mutex_);
        return next_;
    }

private:
    std::vector<std::string> responses_;
    std::vector<double> temperatures_;
    std::size_t next_ = 0;
    mutable std::mutex mutex_;
};

// Deterministic label rules over the prompt's bracketed sequence items:
//   always:normal | always:anomalous | contains:item1|item2|...
// The contains rule answers "anomalous" when any listed item occurs.
class RuleBackend : public ChatBackend {
public:
    explicit RuleBackend(const std::string& rule);
    ChatResponse complete(const ChatRequest& request) override;

    std::size_t calls() const {
        std::lock_guard lock(mutex_);
        return calls_;
    }

    static std::vector<std::string> extract_items(const std::string& prompt);

private:
    enum class Kind { Always, Contains } kind_ = Kind::Always;
    Label always_ = Label::Normal;
    std::vector<std::string> needles_;
    mutable std::mutex mutex_;
    std::size_t calls_ = 0;
};

struct BackendConfig {
    std::string kind = "mock";  // http | mock | script
    HttpBackendConfig http;
    std::string rule = "always:normal";  // mock
    std::string script_path;             // script: one response per line
};

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& cfg);

// ---- fine-tuning export ----

struct FinetuneRecord {
    std::string prompt;
    std::string completion;  // "normal" | "anomalous"
};

std::vector<FinetuneRecord> export_finetune_dataset(
    const std::vector<LabeledSequence>& data, const TemplateStore& store,
    const KnowledgeBase& kb, const PromptOptions& options);

// One JSON object per line: {"prompt": ..., "completion": ...}
void write_finetune_jsonl(const std::vector<FinetuneRecord>& records,
                          const std::string& path);

}  // namespace logens
